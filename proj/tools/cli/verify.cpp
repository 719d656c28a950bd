#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "run.hpp"

namespace hch::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  double tolerance;
  // Returns the measured discrepancy; the check passes when it is <= tolerance.
  std::function<double()> measure;
};

double point_gap(const HPoint& a, const HPoint& b) {
  double m = std::abs(a.s - b.s);
  for (std::size_t i = 0; i < a.z.size(); ++i) m = std::max(m, std::abs(a.z[i] - b.z[i]));
  return m;
}

std::vector<HPoint> sample_points(int d, int count) {
  Philox rng(RngStream{2024, 7});
  std::vector<HPoint> pts;
  for (int k = 0; k < count; ++k) {
    std::vector<double> z(static_cast<std::size_t>(2 * d));
    for (auto& v : z) v = 2.0 * rng.normal();
    pts.emplace_back(z, 2.0 * rng.normal());
  }
  return pts;
}

GridSpec small_grid() { return GridSpec::uniform(1, 32, 7.0, 32, 12.0); }

Field small_packet() { return make_packet({HPoint::identity(1), {1.0, 1.0, 1.2}, {0.2, -0.1, 0.3}}, small_grid()); }

double group_axioms() {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const auto pts = sample_points(d, 12);
    for (std::size_t i = 0; i + 2 < pts.size(); ++i) {
      const HPoint &p = pts[i], &q = pts[i + 1], &r = pts[i + 2];
      worst = std::max(worst, point_gap(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r))));
      worst = std::max(worst, point_gap(group_mul(p, group_inv(p)), HPoint::identity(d)));
      worst = std::max(worst, point_gap(group_mul(group_inv(p), p), HPoint::identity(d)));
    }
  }
  return worst;
}

double commutator_center() {
  HPoint x = HPoint::identity(1), y = HPoint::identity(1);
  x.z[0] = 1.0;
  y.z[1] = 1.0;
  const HPoint c = group_mul(group_mul(x, y), group_mul(group_inv(x), group_inv(y)));
  return std::max({std::abs(c.s + 2.0), std::abs(c.z[0]), std::abs(c.z[1])});
}

double gauge_homogeneity() {
  double worst = 0.0;
  for (const auto& p : sample_points(2, 8)) {
    for (double lam : {0.3, 2.5}) {
      const double lhs = koranyi_gauge(dilate(p, lam)).value;
      const double rhs = lam * koranyi_gauge(p).value;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
    }
  }
  return worst;
}

double partial_roundtrip() {
  const Field f = small_packet();
  return relative_l2_error(inverse_partial_ft(partial_ft(f)), f);
}

double heat_identity_and_contraction() {
  const Field f = small_packet();
  double worst = l2_distance(heat_step(f, 0.0, PotentialSpec::zero(), DenseSpectral{}), f);
  for (double tau : {1e-3, 1e-2, 0.1}) {
    worst = std::max(worst, l2_norm(heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{})) - l2_norm(f));
  }
  return std::max(worst, 0.0);
}

double strong_continuity() {
  const Field f = small_packet();
  double prev = 1e300;
  double violation = 0.0;
  for (double tau = 0.1; tau > 1e-3; tau *= 0.5) {
    const double dist = l2_distance(heat_step(f, tau, PotentialSpec::zero(), DenseSpectral{}), f);
    violation = std::max(violation, dist - prev);
    prev = dist;
  }
  return std::max(violation, 0.0);
}

double generator_order() {
  const Field f = small_packet();
  double worst = 0.0;
  double ph = generator_residual(f, 1e-2, PotentialSpec::zero());
  double ps = schrodinger_generator_residual(f, 1e-2);
  for (double tau : {5e-3, 2.5e-3}) {
    const double h = generator_residual(f, tau, PotentialSpec::zero());
    const double s = schrodinger_generator_residual(f, tau);
    worst = std::max({worst, h / ph, s / ps});
    ph = h;
    ps = s;
  }
  return worst;
}

double factor_unitarity() {
  const Field p = partial_ft(small_packet());
  return std::max(std::abs(l2_norm(u1_apply(p, 0.1)) - l2_norm(p)), std::abs(l2_norm(u2_apply(p, 0.1)) - l2_norm(p)));
}

double sublaplacian_symmetry() {
  const GridSpec g = small_grid();
  const Field f = small_packet();
  const Field h = make_packet({HPoint({0.2, -0.3}, 0.5), {1.0, 1.1, 1.3}, {0.0, 0.4, -0.2}}, g);
  return std::abs(inner_product(apply_sublaplacian(f), h) - inner_product(f, apply_sublaplacian(h)));
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

cplx heat_k(double alpha, double t, double x, double y, double xp, double yp) {
  const std::vector<double> z{x, y}, zp{xp, yp};
  return mehler_heat_kernel({alpha, t, Flavor::Heat}, z, zp);
}

double kernel_free_limit() {
  const double t = 0.6, r2 = 0.5 * 0.5 + 0.2 * 0.2;
  const cplx k = heat_k(0.0, t, 0.3, 0.1, -0.2, 0.3);
  return std::abs(k - std::exp(-r2 / (2 * t)) / (2 * kPi * t));
}

double chapman_kolmogorov() {
  const double alpha = 0.8, t = 0.25, s = 0.35;
  const cplx lhs = planar_sum(12.0, 0.05, [&](double wx, double wy) {
    return heat_k(alpha, t, 0.1, 0.2, wx, wy) * heat_k(alpha, s, wx, wy, -0.4, 0.3);
  });
  const cplx rhs = heat_k(alpha, t + s, 0.1, 0.2, -0.4, 0.3);
  return std::abs(lhs - rhs) / std::abs(rhs);
}

double center_mode_conservation() {
  const Field f = small_packet();
  const Field out = oracle_evolve(f, 0.4, Flavor::Heat);
  cplx a{0.0, 0.0}, b{0.0, 0.0};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    a += f.values[i];
    b += out.values[i];
  }
  return std::abs(a - b) / std::abs(a);
}

double schrodinger_oracle_unitarity() {
  const GridSpec g = GridSpec::uniform(1, 64, 8.0, 32, 16.0);
  const Field f = make_packet({HPoint::identity(1), {1.0, 1.0, 2.0}, {}}, g);
  return std::abs(l2_norm(oracle_evolve(f, 0.75, Flavor::Schrodinger)) - l2_norm(f)) / l2_norm(f);
}

double levy_area_moments() {
  // Mean within 4 standard errors and variance t^2 (1 - 1/n) within 5 standard errors.
  const double t = 0.5;
  const int steps = 100;
  const std::size_t paths = 20000;
  const auto a = levy_area_samples(t, steps, paths, RngStream{31, 0});
  double m = 0.0, m2 = 0.0;
  for (double v : a) {
    m += v;
    m2 += v * v;
  }
  m /= static_cast<double>(paths);
  m2 /= static_cast<double>(paths);
  const double var = t * t * (1.0 - 1.0 / steps);
  const double se_mean = std::sqrt(var / static_cast<double>(paths));
  // Fourth moment of a sech-law variable is 5 var^2.
  const double se_var = std::sqrt(4.0 * var * var / static_cast<double>(paths));
  return std::max(std::abs(m) / (4.0 * se_mean), std::abs(m2 - var) / (5.0 * se_var));
}

double rng_reproducibility() {
  Philox a(RngStream{9, 3}), b(RngStream{9, 3}), c(RngStream{9, 4});
  double same = 0.0;
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const double x = a.normal(), y = b.normal(), z = c.normal();
    same = std::max(same, std::abs(x - y));
    differs = differs || x != z;
  }
  return differs ? same : 1.0;
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all{
      {"group_axioms", 1e-12, group_axioms},
      {"commutator_center", 1e-12, commutator_center},
      {"gauge_homogeneity", 1e-12, gauge_homogeneity},
      {"partial_ft_roundtrip", 1e-12, partial_roundtrip},
      {"heat_identity_contraction", 1e-8, heat_identity_and_contraction},
      {"strong_continuity", 0.0, strong_continuity},
      {"generator_first_order", 0.7, generator_order},
      {"factor_unitarity", 1e-12, factor_unitarity},
      {"sublaplacian_symmetry", 1e-10, sublaplacian_symmetry},
      {"kernel_free_limit", 1e-14, kernel_free_limit},
      {"chapman_kolmogorov", 1e-6, chapman_kolmogorov},
      {"center_mode_conservation", 1e-6, center_mode_conservation},
      {"schrodinger_oracle_unitarity", 1e-6, schrodinger_oracle_unitarity},
      {"levy_area_moments", 1.0, levy_area_moments},
      {"rng_reproducibility", 0.0, rng_reproducibility},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& invariant_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : checks()) n.push_back(c.name);
    return n;
  }();
  return names;
}

std::vector<CheckResult> run_invariants(const std::vector<std::string>& only) {
  std::vector<CheckResult> out;
  for (const auto& c : checks()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const double v = c.measure();
    out.push_back({c.name, std::isfinite(v) && v <= c.tolerance, v, c.tolerance});
  }
  return out;
}

}  // namespace hch::cli
