#include "hch/heat.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hch/dense.hpp"
#include "hch/parallel.hpp"
#include "hch/quadrature.hpp"

namespace hch {

namespace {

// Shift table: N directions zeta in R^{2d} with probability weights.
struct ShiftRule {
  std::vector<std::vector<double>> zeta;
  std::vector<double> weight;
};

ShiftRule tensor_hermite(int d, int q) {
  if (q < 2) throw std::invalid_argument("heat_step: quadrature order must be >= 2");
  const QuadratureRule gh = gauss_hermite_normal(q);
  const int r = 2 * d;
  std::size_t total = 1;
  for (int a = 0; a < r; ++a) total *= static_cast<std::size_t>(q);
  ShiftRule rule;
  rule.zeta.reserve(total);
  rule.weight.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    std::vector<double> z(static_cast<std::size_t>(r));
    double w = 1.0;
    for (int a = r - 1; a >= 0; --a) {
      const auto i = rem % static_cast<std::size_t>(q);
      rem /= static_cast<std::size_t>(q);
      z[static_cast<std::size_t>(a)] = gh.nodes[i];
      w *= gh.weights[i];
    }
    rule.zeta.push_back(std::move(z));
    rule.weight.push_back(w);
  }
  return rule;
}

ShiftRule monte_carlo_rule(int d, const MonteCarlo& mc) {
  if (mc.samples < 1000) throw std::invalid_argument("heat_step: Monte Carlo needs at least 1000 samples");
  Philox gen(mc.stream);
  ShiftRule rule;
  rule.zeta.resize(mc.samples, std::vector<double>(2 * static_cast<std::size_t>(d)));
  rule.weight.assign(mc.samples, 1.0 / static_cast<double>(mc.samples));
  for (auto& z : rule.zeta) {
    for (auto& v : z) v = gen.normal();
  }
  return rule;
}

// sum_q w_q psi(z + sqrt(tau) zeta_q, s + sqrt(tau) sigma(z, zeta_q)) at every node.
Field average_over_shifts(const Field& f, double tau, const ShiftRule& rule, InterpStats* stats) {
  const GridSpec& g = f.grid;
  const int r = 2 * g.dim();
  const int ns = g.center().n;
  const double rt = std::sqrt(tau);
  Field out(g, Repr::Physical);
  std::vector<InterpStats> local(g.slice_size());
  parallel_for(g.slice_size(), [&](std::size_t zf) {
    std::vector<double> z(static_cast<std::size_t>(r));
    g.z_coords(zf, z);
    std::vector<double> coord(static_cast<std::size_t>(r + 1));
    std::vector<double> ds(rule.zeta.size());
    for (std::size_t q = 0; q < rule.zeta.size(); ++q) ds[q] = rt * sigma_form(z, rule.zeta[q]);
    for (int m = 0; m < ns; ++m) {
      const double s = g.center().node(m);
      cplx acc{0.0, 0.0};
      for (std::size_t q = 0; q < rule.zeta.size(); ++q) {
        for (int a = 0; a < r; ++a) {
          coord[static_cast<std::size_t>(a)] = z[static_cast<std::size_t>(a)] + rt * rule.zeta[q][static_cast<std::size_t>(a)];
        }
        coord[static_cast<std::size_t>(r)] = s + ds[q];
        acc += rule.weight[q] * interpolate(f, coord, &local[zf]);
      }
      out.at(zf, m) = acc;
    }
  });
  if (stats) {
    for (const auto& l : local) *stats += l;
  }
  return out;
}

Field dense_heat_average(const Field& f, double tau) {
  const GridSpec& g = f.grid;
  Field p = partial_ft(f);
  for (int m = 0; m < g.center().n; ++m) {
    const double alpha = g.center().freq(m);
    auto slice = p.slice(m);
    fft_z_slice(g, slice);
    const auto factors = twisted_symbol_factors(g, alpha, [tau](double u) { return cplx{std::exp(-0.5 * tau * u * u), 0.0}; });
    const auto res = apply_separable(g, slice, factors);
    p.set_slice(m, res);
  }
  return inverse_partial_ft(p);
}

void add_potential_term(Field& out, const Field& f, double tau, const PotentialSpec& c) {
  if (c.is_zero()) return;
  const auto cv = sample_potential(c, f.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += tau * cv[i] * f.values[i];
}

void partial_sublaplacian_inplace(Field& p) {
  const GridSpec& g = p.grid;
  const int d = g.dim();
  const int r = 2 * d;
  parallel_for(static_cast<std::size_t>(g.center().n), [&](std::size_t mu) {
    const int m = static_cast<int>(mu);
    const double alpha = g.center().freq(m);
    const auto base = p.slice(m);
    auto hat = base;
    fft_z_slice(g, hat);
    std::vector<cplx> acc(base.size(), cplx{0.0, 0.0});
    std::vector<int> idx(static_cast<std::size_t>(r));
    std::vector<cplx> d1(base.size()), d2(base.size());
    for (int a = 0; a < r; ++a) {
      for (std::size_t k = 0; k < hat.size(); ++k) {
        g.z_unflat(k, idx);
        const double eta = g.axis(a).freq(idx[static_cast<std::size_t>(a)]);
        d1[k] = cplx{0.0, eta} * hat[k];
        d2[k] = -eta * eta * hat[k];
      }
      inverse_fft_z_slice(g, d1);
      inverse_fft_z_slice(g, d2);
      const int pa = partner_axis(a, d);
      const double sign = a < d ? 1.0 : -1.0;
      for (std::size_t k = 0; k < base.size(); ++k) {
        g.z_unflat(k, idx);
        const double w = sign * g.axis(pa).node(idx[static_cast<std::size_t>(pa)]);
        acc[k] += d2[k] + cplx{0.0, 2.0 * alpha * w} * d1[k] - alpha * alpha * w * w * base[k];
      }
    }
    p.set_slice(m, acc);
  });
}

}  // namespace

PotentialSpec PotentialSpec::constant(double kappa) {
  return PotentialSpec{[kappa](const HPoint&) { return kappa; }, std::abs(kappa)};
}

std::vector<double> sample_potential(const PotentialSpec& c, const GridSpec& g) {
  std::vector<double> out(g.size(), 0.0);
  if (c.is_zero()) return out;
  const int r = 2 * g.dim();
  const int ns = g.center().n;
  std::vector<double> z(static_cast<std::size_t>(r));
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, z);
    HPoint p(z, 0.0);
    for (int m = 0; m < ns; ++m) {
      p.s = g.center().node(m);
      const double v = c.fn(p);
      if (!std::isfinite(v) || std::abs(v) > c.bound * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream os;
        os << "potential value " << v << " exceeds declared bound " << c.bound;
        throw std::invalid_argument(os.str());
      }
      out[zf * static_cast<std::size_t>(ns) + static_cast<std::size_t>(m)] = v;
    }
  }
  return out;
}

Field heat_step(const Field& f, double tau, const PotentialSpec& c, const HeatStepMethod& method,
                StepStats* stats) {
  require_repr(f, Repr::Physical, "heat_step");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("heat_step: tau must be finite and >= 0");
  const double bm = boundary_mass(f);
  if (stats) stats->boundary_mass = bm;
  if (bm > 1e-6) {
    std::ostringstream os;
    os << "heat_step: boundary mass " << bm << " exceeds 1e-6";
    throw NumericalAbort(os.str());
  }
  if (tau == 0.0) return f;
  const int d = f.grid.dim();
  Field out = std::visit(
      [&](const auto& m) -> Field {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Quadrature>) {
          return average_over_shifts(f, tau, tensor_hermite(d, m.q), stats ? &stats->interp : nullptr);
        } else if constexpr (std::is_same_v<M, MonteCarlo>) {
          return average_over_shifts(f, tau, monte_carlo_rule(d, m), stats ? &stats->interp : nullptr);
        } else {
          return dense_heat_average(f, tau);
        }
      },
      method);
  add_potential_term(out, f, tau, c);
  return out;
}

Field apply_sublaplacian(const Field& f) {
  if (f.repr == Repr::Spectral) throw RepresentationError("apply_sublaplacian: spectral input not supported");
  Field p = f.repr == Repr::Physical ? partial_ft(f) : f;
  partial_sublaplacian_inplace(p);
  return f.repr == Repr::Physical ? inverse_partial_ft(p) : p;
}

double generator_residual(const Field& f, double tau, const PotentialSpec& c) {
  if (!(tau > 0.0)) throw std::invalid_argument("generator_residual: tau must be > 0");
  const Field s = heat_step(f, tau, c, DenseSpectral{});
  Field lf = apply_sublaplacian(f);
  lf *= 0.5;
  add_potential_term(lf, f, 1.0, c);
  Field r = s - f;
  r *= 1.0 / tau;
  r -= lf;
  return l2_norm(r);
}

Field chernoff_evolve_heat(const Field& f0, double t, int n, const PotentialSpec& c,
                           const HeatStepMethod& method, EvolutionLog* log) {
  require_repr(f0, Repr::Physical, "chernoff_evolve_heat");
  if (n < 1) throw std::invalid_argument("chernoff_evolve_heat: n must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("chernoff_evolve_heat: t must be >= 0");
  if (t == 0.0) return f0;
  const double tau = t / n;
  Field cur = f0;
  for (int k = 0; k < n; ++k) {
    StepStats st;
    HeatStepMethod m = method;
    if (auto* mc = std::get_if<MonteCarlo>(&m)) mc->stream = mc->stream.split(static_cast<std::uint64_t>(k));
    cur = heat_step(cur, tau, c, m, &st);
    if (log) {
      log->interp += st.interp;
      log->steps.push_back({k + 1, l2_norm(cur), boundary_mass(cur)});
    }
  }
  check_boundary_mass(cur, 1e-6, "chernoff_evolve_heat");
  return cur;
}

}  // namespace hch
