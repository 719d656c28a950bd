// Acceptance driver: one PASS/FAIL line per criterion.
//   acceptance              run every criterion
//   acceptance --criterion k

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hch/heat.hpp"
#include "hch/hgroup.hpp"
#include "hch/magnetic.hpp"
#include "hch/rng.hpp"
#include "hch/schrodinger.hpp"
#include "hch/stochastic.hpp"

using namespace hch;

namespace {

constexpr double kPi = std::numbers::pi;

// Accumulates sub-checks of one criterion into a single report line.
class Report {
 public:
  void check(const std::string& what, double value, const std::string& relation, double bound, bool ok) {
    pass_ = pass_ && ok;
    std::ostringstream os;
    os << std::setprecision(3) << what << " " << value << " " << relation << " " << bound << (ok ? "" : " (FAILED)");
    parts_.push_back(os.str());
  }
  void at_most(const std::string& what, double value, double bound) {
    check(what, value, "<=", bound, std::isfinite(value) && value <= bound);
  }
  void flag(const std::string& what, bool ok) {
    pass_ = pass_ && ok;
    parts_.push_back(what + (ok ? " ok" : " (FAILED)"));
  }
  bool passed() const { return pass_; }
  std::string text() const {
    std::string s;
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "; " : "") + parts_[i];
    return s;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> parts_;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridSpec small_grid() { return GridSpec::uniform(1, 32, 7.0, 32, 12.0); }
GridSpec large_grid() { return GridSpec::uniform(1, 64, 8.0, 32, 16.0); }
Field small_packet() { return make_packet({HPoint::identity(1), {1.0, 1.0, 1.2}, {}}, small_grid()); }
Field large_packet() { return make_packet({HPoint::identity(1), {1.0, 1.0, 2.0}, {}}, large_grid()); }

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

// Least-squares slope of log(err) against log(n), negated.
double empirical_order(const std::vector<int>& ns, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(static_cast<double>(ns[i])), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string list(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(3) << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

void criterion_chernoff(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const Field f = small_packet();
  const auto zero = PotentialSpec::zero();
  const Field p = partial_ft(f);
  r.flag("S(0)=I heat dense/quadrature/MC",
         heat_step(f, 0.0, zero, DenseSpectral{}).values == f.values &&
             heat_step(f, 0.0, zero, Quadrature{8}).values == f.values &&
             heat_step(f, 0.0, zero, MonteCarlo{}).values == f.values);
  r.flag("S(0)=I schrodinger dense/interpolated", schrodinger_step(p, 0.0, ShearMethod::Dense).values == p.values &&
                                                       schrodinger_step(p, 0.0, ShearMethod::Interpolated).values == p.values);
  double grow_dense = -1e300, grow_quad = -1e300;
  for (double tau : {1e-3, 1e-2, 0.1, 0.5}) {
    grow_dense = std::max(grow_dense, l2_norm(heat_step(f, tau, zero, DenseSpectral{})) - l2_norm(f));
  }
  for (double tau : {1e-2, 0.05}) {
    grow_quad = std::max(grow_quad, l2_norm(heat_step(f, tau, zero, Quadrature{8})) / l2_norm(f) - 1.0);
  }
  r.at_most("heat dense norm growth", std::max(grow_dense, 0.0), 1e-8);
  r.at_most("heat quadrature relative norm growth", std::max(grow_quad, 0.0), 1e-3);

  bool mono_heat = true, mono_schr = true;
  double prev_h = 1e300, prev_s = 1e300;
  for (double tau = 0.2; tau > 1e-3; tau *= 0.5) {
    const double dh = l2_distance(heat_step(f, tau, zero, DenseSpectral{}), f);
    const double ds = l2_distance(schrodinger_step(f, tau, ShearMethod::Dense), f);
    mono_heat = mono_heat && dh < prev_h;
    mono_schr = mono_schr && ds < prev_s;
    prev_h = dh;
    prev_s = ds;
  }
  r.flag("strong continuity monotone (heat)", mono_heat);
  r.flag("strong continuity monotone (schrodinger)", mono_schr);

  const PotentialSpec c{[](const HPoint& q) { return 0.5 * std::cos(q.z[0]); }, 0.5};
  double worst_h = 0.0, worst_s = 0.0;
  double ph = generator_residual(f, 1e-2, c), ps = schrodinger_generator_residual(f, 1e-2);
  for (double tau : {5e-3, 2.5e-3}) {
    const double h = generator_residual(f, tau, c), s = schrodinger_generator_residual(f, tau);
    worst_h = std::max(worst_h, h / ph);
    worst_s = std::max(worst_s, s / ps);
    ph = h;
    ps = s;
  }
  r.at_most("heat residual ratio", worst_h, 0.7);
  r.at_most("schrodinger residual ratio", worst_s, 0.7);
  r.at_most("runtime s", elapsed(t0), 60.0);
}

void criterion_heat_convergence(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const Field f = large_packet();
  const double t = 0.25;
  const Field exact = oracle_evolve(f, t, Flavor::Heat);
  const std::vector<int> ns{2, 4, 8, 16};
  std::vector<double> err;
  for (int n : ns) err.push_back(relative_l2_error(chernoff_evolve_heat(f, t, n, PotentialSpec::zero(), DenseSpectral{}), exact));
  r.flag("errors " + list(err) + " decreasing", strictly_decreasing(err));
  const double order = empirical_order(ns, err);
  r.check("order", order, "in", 1.0, std::abs(order - 1.0) <= 0.3);
  r.at_most("runtime s", elapsed(t0), 300.0);
}

void criterion_oscillatory(Report& r) {
  const GridSpec g = GridSpec::uniform(1, 16, 7.0, 16, 8.0);
  const Field f = make_packet({HPoint::identity(1), {1.0, 1.0, 1.0}, {}}, g);
  const OscillatoryResult res = oscillatory_integral_direct(f, 0.1);
  r.at_most("direct vs dense", relative_l2_error(res.value, schrodinger_step(f, 0.1, ShearMethod::Dense)), 1e-3);
  r.at_most("regulator gap", res.regulator_gap, 1e-3);
  r.flag("limit converged", res.converged);
}

void criterion_schrodinger(Report& r) {
  const Field f = large_packet();
  const double t = 0.9;
  const Field exact = oracle_evolve(f, t, Flavor::Schrodinger);
  const std::vector<int> ns{2, 4, 8, 16};
  std::vector<double> err;
  for (int n : ns) {
    err.push_back(relative_l2_error(
        chernoff_evolve_schrodinger(f, t, n, VPotentialSpec::zero(), ShearMethod::Dense, StepOrder::SM), exact));
  }
  r.flag("errors " + list(err) + " decreasing", strictly_decreasing(err));

  SchrodingerLog log;
  const Field u = chernoff_evolve_schrodinger(f, t, 64, VPotentialSpec::zero(), ShearMethod::Dense, StepOrder::SM, &log);
  r.at_most("64-step unitarity drift", std::abs(l2_norm(u) / l2_norm(f) - 1.0), 1e-6);

  const Field g = small_packet();
  const VPotentialSpec v{{[](const HPoint& q) { return 0.8 * std::exp(-0.5 * (q.z[0] * q.z[0] + q.z[1] * q.z[1])); }, 0.8},
                         true};
  std::vector<double> gap;
  for (int n : ns) {
    const Field a = chernoff_evolve_schrodinger(g, 0.5, n, v, ShearMethod::Dense, StepOrder::SM);
    const Field b = chernoff_evolve_schrodinger(g, 0.5, n, v, ShearMethod::Dense, StepOrder::MS);
    gap.push_back(relative_l2_error(a, b));
  }
  r.flag("SM/MS gap " + list(gap) + " decreasing", strictly_decreasing(gap));
}

cplx heat_k(double alpha, double t, double x, double y, double xp, double yp) {
  const std::vector<double> z{x, y}, zp{xp, yp};
  return mehler_heat_kernel({alpha, t, Flavor::Heat}, z, zp);
}

template <class F>
cplx planar_sum(double half, double h, F&& f) {
  const int n = static_cast<int>(std::lround(2 * half / h));
  cplx acc{0.0, 0.0};
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) acc += f(-half + i * h, -half + j * h);
  }
  return acc * h * h;
}

void criterion_mehler(Report& r) {
  const double t = 0.7, r2 = 0.3 * 0.3 + 1.1 * 1.1;
  const cplx free = std::exp(-r2 / (2 * t)) / (2 * kPi * t);
  r.at_most("alpha=0 vs free kernel", std::abs(heat_k(0.0, t, 0.1, -0.5, 0.4, 0.6) - free) / std::abs(free), 1e-14);
  r.at_most("alpha=1e-7 vs free kernel", std::abs(heat_k(1e-7, t, 0.1, -0.5, 0.4, 0.6) - free) / std::abs(free), 1e-6);

  double ck = 0.0;
  for (double alpha : {0.0, 0.7, -1.3}) {
    const cplx lhs = planar_sum(12.0, 0.05, [&](double wx, double wy) {
      return heat_k(alpha, 0.3, 0.2, -0.4, wx, wy) * heat_k(alpha, 0.5, wx, wy, -0.5, 0.3);
    });
    const cplx rhs = heat_k(alpha, 0.8, 0.2, -0.4, -0.5, 0.3);
    ck = std::max(ck, std::abs(lhs - rhs) / std::abs(rhs));
  }
  r.at_most("Chapman-Kolmogorov", ck, 1e-6);

  const cplx mass = planar_sum(12.0, 0.05, [&](double xp, double yp) { return heat_k(0.0, 0.4, 0.3, 0.1, xp, yp); });
  const Field f = small_packet();
  const Field out = oracle_evolve(f, 0.5, Flavor::Heat);
  cplx before{0.0, 0.0}, after{0.0, 0.0};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    before += f.values[i];
    after += out.values[i];
  }
  r.at_most("alpha=0 slice mass - 1", std::abs(mass - 1.0), 1e-6);
  r.at_most("total mass drift", std::abs(after - before) / std::abs(before), 1e-6);

  const Field g = large_packet();
  double uni = 0.0;
  for (double s : {0.6, 0.75, 0.9}) uni = std::max(uni, std::abs(l2_norm(oracle_evolve(g, s, Flavor::Schrodinger)) / l2_norm(g) - 1.0));
  r.at_most("schrodinger kernel unitarity", uni, 1e-6);
}

void criterion_fk(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const Field f = large_packet();
  const double t = 0.25, h = 1e-3;
  const std::vector<HPoint> probes{HPoint({0, 0}, 0),  HPoint({1, 0}, 0),     HPoint({0, 1}, 0),
                                   HPoint({-1, 0}, 1), HPoint({0, -1}, -1),   HPoint({1, 1}, 2),
                                   HPoint({-1, 1}, 0), HPoint({0.5, -0.5}, 1), HPoint({0, 0}, 3)};
  const FKBudget b = fk_estimate_with_budget(f, probes, t, 100000, static_cast<int>(std::lround(t / h)), RngStream{0, 0});
  double worst = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const cplx exact = oracle_evaluate_point(f, probes[i], t, Flavor::Heat);
    const double tol = 3 * b.estimates[i].se + b.time_budget[i] + b.interp_budget[i];
    worst = std::max(worst, std::abs(b.estimates[i].mean - exact) / tol);
  }
  r.at_most("max |diff| / (3 SE + budget) over 9 probes", worst, 1.0);
  r.at_most("runtime s", elapsed(t0), 300.0);
}

struct LevyStats {
  double mean, se_mean, var, se_var;
  std::vector<double> cf, se_cf;
};

LevyStats levy_stats(const std::vector<double>& a, const std::vector<double>& lambdas) {
  const double m = static_cast<double>(a.size());
  LevyStats s{};
  double sum = 0, sum2 = 0;
  for (double v : a) {
    sum += v;
    sum2 += v * v;
  }
  s.mean = sum / m;
  const double var = sum2 / m - s.mean * s.mean;
  s.se_mean = std::sqrt(var / m);
  s.var = var * m / (m - 1);
  double c4 = 0;
  for (double v : a) c4 += std::pow((v - s.mean) * (v - s.mean) - var, 2);
  s.se_var = std::sqrt(c4 / m / m);
  for (double lam : lambdas) {
    double c = 0, c2 = 0;
    for (double v : a) {
      const double x = std::cos(lam * v);
      c += x;
      c2 += x * x;
    }
    c /= m;
    s.cf.push_back(c);
    s.se_cf.push_back(std::sqrt((c2 / m - c * c) / m));
  }
  return s;
}

void criterion_levy(Report& r) {
  // Areas at step h and h/2 from the same Brownian paths: the coarse sum uses every other node.
  const double t = 1.0;
  const int fine_steps = 200;
  const std::size_t paths = 100000;
  std::vector<double> coarse(paths), fine(paths);
  const RngStream root{77, 1};
  for (std::size_t i = 0; i < paths; ++i) {
    const BMPath p = sample_bm_levy(t, fine_steps, root.split(i));
    fine[i] = p.levy.back();
    double a = 0.0;
    std::vector<double> db(2);
    for (int k = 0; k + 2 <= fine_steps; k += 2) {
      const auto& b0 = p.b[static_cast<std::size_t>(k)];
      const auto& b2 = p.b[static_cast<std::size_t>(k + 2)];
      db[0] = b2[0] - b0[0];
      db[1] = b2[1] - b0[1];
      a += sigma_form(b0, db);
    }
    coarse[i] = a;
  }
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  const LevyStats c = levy_stats(coarse, lambdas);
  const LevyStats f = levy_stats(fine, lambdas);
  r.at_most("|mean| / SE (h)", std::abs(c.mean) / c.se_mean, 3.0);
  r.at_most("|mean| / SE (h/2)", std::abs(f.mean) / f.se_mean, 3.0);
  r.at_most("variance h vs h/2 in combined SE", std::abs(c.var - f.var) / std::hypot(c.se_var, f.se_var), 2.0);
  double dcf = 0.0;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    dcf = std::max(dcf, std::abs(c.cf[k] - f.cf[k]) / std::hypot(c.se_cf[k], f.se_cf[k]));
  }
  r.at_most("char. function h vs h/2 in combined SE", dcf, 2.0);
  std::ostringstream os;
  os << std::setprecision(4) << "pinned at h/2: var " << f.var << " +- " << f.se_var << ", cf(0.5, 1, 2) " << f.cf[0]
     << " " << f.cf[1] << " " << f.cf[2];
  r.flag(os.str(), true);
}

void criterion_walks(Report& r) {
  const double t = 1.0;
  const std::vector<std::array<double, 2>> centers{{0, 0}, {0.5, 0}, {0, -0.5}, {0.7, 0.7}, {-1, 0.3}};
  std::vector<GaussianBump> fns;
  for (double w : {1.0, 2.0}) {
    for (const auto& z : centers) fns.push_back({HPoint({z[0], z[1]}, 0.0), w});
  }
  const HPoint start = HPoint::identity(1);
  const auto ref = heat_reference_values(fns, start, t, GridSpec::uniform(1, 64, 16.0, 64, 16.0));
  const std::vector<int> ns{4, 16, 64};
  const auto rows = weak_convergence_table(ns, t, fns, ref, start, 100000, RngStream{88, 0});
  int decreasing = 0;
  double worst_ratio = 0.0;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    std::vector<double> disc;
    for (const auto& row : rows) {
      if (row.fn == static_cast<int>(f)) disc.push_back(row.disc_z);
    }
    decreasing += strictly_decreasing(disc) ? 1 : 0;
    worst_ratio = std::max(worst_ratio, disc.back() / disc.front());
  }
  r.check("bumps with decreasing |E f(Z_n) - V f|", decreasing, "of", static_cast<double>(fns.size()),
          decreasing == static_cast<int>(fns.size()));
  r.flag("worst disc(64)/disc(4) " + list({worst_ratio}), true);

  const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
  const auto tight = tightness_diagnostic(ns, deltas, 0.5, t, 2000, RngStream{88, 1});
  double worst = -1e300;
  for (std::size_t i = 1; i < tight.size(); ++i) {
    if (tight[i].n != tight[i - 1].n) continue;
    const double se = std::hypot(tight[i].se, tight[i - 1].se);
    worst = std::max(worst, tight[i].p_hat - tight[i - 1].p_hat - 2 * se);
  }
  r.at_most("tightness increase beyond 2 SE as delta shrinks", std::max(worst, 0.0), 0.0);
}

double point_gap(const HPoint& a, const HPoint& b) {
  double m = std::abs(a.s - b.s);
  for (std::size_t i = 0; i < a.z.size(); ++i) m = std::max(m, std::abs(a.z[i] - b.z[i]));
  return m;
}

void criterion_group(Report& r) {
  Philox rng(RngStream{99, 0});
  double assoc = 0, inv = 0, homog = 0;
  for (int d = 1; d <= 3; ++d) {
    for (int k = 0; k < 200; ++k) {
      auto draw = [&] {
        std::vector<double> z(static_cast<std::size_t>(2 * d));
        for (auto& v : z) v = 2 * rng.normal();
        return HPoint(z, 2 * rng.normal());
      };
      const HPoint p = draw(), q = draw(), w = draw();
      assoc = std::max(assoc, point_gap(group_mul(group_mul(p, q), w), group_mul(p, group_mul(q, w))));
      inv = std::max({inv, point_gap(group_mul(p, group_inv(p)), HPoint::identity(d)),
                      point_gap(group_mul(group_inv(p), p), HPoint::identity(d))});
      const double lam = 0.1 + 3 * rng.uniform();
      homog = std::max(homog, std::abs(koranyi_gauge(dilate(p, lam)).value - lam * koranyi_gauge(p).value) /
                                  std::max(1.0, lam * koranyi_gauge(p).value));
    }
  }
  double comm = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int j = 0; j < d; ++j) {
      HPoint x = HPoint::identity(d), y = HPoint::identity(d);
      x.z[static_cast<std::size_t>(j)] = 1.0;
      y.z[static_cast<std::size_t>(d + j)] = 1.0;
      const HPoint c = group_mul(group_mul(x, y), group_mul(group_inv(x), group_inv(y)));
      HPoint expect = HPoint::identity(d);
      expect.s = -2.0;
      comm = std::max(comm, point_gap(c, expect));
    }
  }
  r.at_most("associativity", assoc, 1e-12);
  r.at_most("inverse", inv, 1e-12);
  r.at_most("commutator center - (-2)", comm, 1e-12);
  r.at_most("gauge homogeneity", homog, 1e-12);
}

struct Criterion {
  int id;
  std::string name;
  std::function<void(Report&)> body;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "Chernoff conditions", criterion_chernoff},
      {2, "heat Chernoff convergence", criterion_heat_convergence},
      {3, "oscillatory integral equivalence", criterion_oscillatory},
      {4, "Schrodinger Chernoff convergence", criterion_schrodinger},
      {5, "magnetic oracle self-consistency", criterion_mehler},
      {6, "Feynman-Kac cross-check", criterion_fk},
      {7, "Levy area statistics", criterion_levy},
      {8, "weak convergence of walks", criterion_walks},
      {9, "group algebra", criterion_group},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  bool all = true;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    Report r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(r);
    } catch (const std::exception& e) {
      r.flag(std::string("exception: ") + e.what(), false);
    }
    all = all && r.passed();
    std::cout << (r.passed() ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
              << std::setprecision(3) << elapsed(t0) << " s): " << r.text() << std::endl;
  }
  return all ? 0 : 1;
}
