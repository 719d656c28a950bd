#include "hch/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hch/dense.hpp"
#include "hch/parallel.hpp"
#include "hch/quadrature.hpp"

namespace hch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

Field as_partial(const Field& f, const char* op) {
  if (f.repr == Repr::Physical) return partial_ft(f);
  require_repr(f, Repr::Partial, op);
  return f;
}

double max_abs_alpha(const GridSpec& g) {
  double m = 0.0;
  for (int k = 0; k < g.center().n; ++k) m = std::max(m, std::abs(g.center().freq(k)));
  return m;
}

double min_half_width_z(const GridSpec& g) {
  double l = g.axis(0).half_width;
  for (int a = 1; a < 2 * g.dim(); ++a) l = std::min(l, g.axis(a).half_width);
  return l;
}

double max_half_width_z(const GridSpec& g) {
  double l = g.axis(0).half_width;
  for (int a = 1; a < 2 * g.dim(); ++a) l = std::max(l, g.axis(a).half_width);
  return l;
}

// Neville extrapolation of values taken at x_i to x = 0.
Field neville_to_zero(const std::vector<double>& x, std::vector<Field> v) {
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double xi = x[i], xj = x[i + level];
      Field next = v[i + 1];
      for (std::size_t k = 0; k < next.values.size(); ++k) {
        // p(0) = (x_j p_i - x_i p_{i+1}) / (x_j - x_i) with p_i on [i, i+level-1], p_{i+1} on [i+1, i+level]
        next.values[k] = (xj * v[i].values[k] - xi * v[i + 1].values[k]) / (xj - xi);
      }
      v[i] = std::move(next);
    }
  }
  return v[0];
}

struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite Gauss-Legendre on [lo, hi] with panels sized to the local oscillation
// frequency |zeta| + extra of the integrand.
PanelRule graded_rule(double lo, double hi, double extra, double scale, const QuadratureRule& ref) {
  PanelRule r;
  double a = lo;
  while (a < hi) {
    double width = scale * 2.0 * kPi / (std::abs(a) + extra + 1.0);
    width = std::min(width, scale * 2.0 * kPi / (std::abs(a + width) + extra + 1.0));
    double b = std::min(hi, a + width);
    if (hi - b < 1e-3 * width) b = hi;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      r.nodes.push_back(mid + half * ref.nodes[i]);
      r.weights.push_back(half * ref.weights[i]);
    }
    a = b;
  }
  return r;
}

double regulator_value(Regulator reg, double u) {
  if (reg == Regulator::Gaussian) return std::exp(-0.5 * u * u);
  const double u2 = u * u;
  return u2 >= 1.0 ? 0.0 : std::exp(-u2 / (1.0 - u2));
}

// One regularized evaluation for fixed eps, regulator and panel scale.
Field direct_once(const Field& f, const std::vector<cplx>& coeff, double tau, double eps, Regulator reg,
                  double scale, int gl_points) {
  const GridSpec& g = f.grid;
  const int d = g.dim();
  const int r = 2 * d;
  const int ns = g.center().n;
  const double rt = std::sqrt(tau);
  const QuadratureRule ref = gauss_legendre(gl_points);
  const cplx axis_norm = 1.0 / std::sqrt(cplx{0.0, 2.0 * kPi});
  std::vector<double> alpha(static_cast<std::size_t>(ns));
  for (int m = 0; m < ns; ++m) alpha[static_cast<std::size_t>(m)] = g.center().freq(m);
  const double amax = max_abs_alpha(g);

  Field out(g, Repr::Physical);
  parallel_for(g.slice_size(), [&](std::size_t zf) {
    std::vector<double> z(static_cast<std::size_t>(r));
    g.z_coords(zf, z);
    // P[a](k, m) = (2 pi i)^{-1/2} int e^{i zeta^2/2} phi(eps zeta) e^{i eta_k (z_a + rt zeta)} e^{i alpha_m b_a zeta}
    std::vector<MatrixXc> P(static_cast<std::size_t>(r));
    for (int a = 0; a < r; ++a) {
      const Axis& ax = g.axis(a);
      const int pa = partner_axis(a, d);
      const double w = (a < d ? 1.0 : -1.0) * z[static_cast<std::size_t>(pa)];
      const double b = rt * w;
      const double za = z[static_cast<std::size_t>(a)];
      const double lo = (-ax.half_width - za) / rt;
      const double hi = (ax.half_width - za) / rt;
      const double extra = rt * (ax.n / 2) * ax.freq_spacing() + amax * std::abs(b);
      const PanelRule pr = graded_rule(lo, hi, extra, scale, ref);
      const auto nq = static_cast<Eigen::Index>(pr.nodes.size());
      MatrixXc E(ax.n, nq);
      MatrixXc F(nq, ns);
      for (Eigen::Index i = 0; i < nq; ++i) {
        const double zeta = pr.nodes[static_cast<std::size_t>(i)];
        const double wq = pr.weights[static_cast<std::size_t>(i)] * regulator_value(reg, eps * zeta);
        const cplx weight = wq * std::polar(1.0, 0.5 * zeta * zeta);
        // eta_k = (k - n/2) d_eta: start at k = 0 and step by e^{i d_eta rt zeta}.
        const cplx step = std::polar(1.0, ax.freq_spacing() * rt * zeta);
        cplx cur = std::polar(1.0, ax.freq(0) * rt * zeta) * weight;
        for (int k = 0; k < ax.n; ++k) {
          E(k, i) = cur;
          cur *= step;
        }
        const cplx astep = std::polar(1.0, g.center().freq_spacing() * b * zeta);
        cplx acur = std::polar(1.0, alpha[0] * b * zeta);
        for (int m = 0; m < ns; ++m) {
          F(i, m) = acur;
          acur *= astep;
        }
      }
      MatrixXc pa_mat = E * F;
      for (int k = 0; k < ax.n; ++k) pa_mat.row(k) *= axis_norm * std::polar(1.0, ax.freq(k) * za);
      P[static_cast<std::size_t>(a)] = std::move(pa_mat);
    }
    // R[m] = sum_k c[k, m] prod_a P_a[k_a, m], contracting the last horizontal axis first.
    std::vector<cplx> red(static_cast<std::size_t>(ns));
    std::vector<cplx> cur;
    for (int m = 0; m < ns; ++m) {
      cur.resize(g.slice_size());
      for (std::size_t k = 0; k < g.slice_size(); ++k) {
        cur[k] = coeff[k * static_cast<std::size_t>(ns) + static_cast<std::size_t>(m)];
      }
      std::size_t len = cur.size();
      for (int a = r - 1; a >= 0; --a) {
        const int n = g.axis(a).n;
        const std::size_t outer = len / static_cast<std::size_t>(n);
        const MatrixXc& pm = P[static_cast<std::size_t>(a)];
        for (std::size_t o = 0; o < outer; ++o) {
          cplx acc{0.0, 0.0};
          for (int k = 0; k < n; ++k) acc += pm(k, m) * cur[o * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
          cur[o] = acc;
        }
        len = outer;
      }
      red[static_cast<std::size_t>(m)] = cur[0];
    }
    for (int j = 0; j < ns; ++j) {
      const double s = g.center().node(j);
      cplx acc{0.0, 0.0};
      for (int m = 0; m < ns; ++m) acc += std::polar(1.0, alpha[static_cast<std::size_t>(m)] * s) * red[static_cast<std::size_t>(m)];
      out.at(zf, j) = acc;
    }
  });
  return out;
}

}  // namespace

Field u1_apply(const Field& f, double tau) {
  require_repr(f, Repr::Partial, "u1_apply");
  if (tau == 0.0) return f;
  const GridSpec& g = f.grid;
  Field out = f;
  std::vector<int> idx(static_cast<std::size_t>(2 * g.dim()));
  std::vector<cplx> mult(g.slice_size());
  for (std::size_t k = 0; k < mult.size(); ++k) {
    g.z_unflat(k, idx);
    double e2 = 0.0;
    for (int a = 0; a < 2 * g.dim(); ++a) {
      const double e = g.axis(a).freq(idx[static_cast<std::size_t>(a)]);
      e2 += e * e;
    }
    mult[k] = std::polar(1.0, -0.5 * tau * e2);
  }
  parallel_for(static_cast<std::size_t>(g.center().n), [&](std::size_t mu) {
    const int m = static_cast<int>(mu);
    auto s = out.slice(m);
    fft_z_slice(g, s);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] *= mult[k];
    inverse_fft_z_slice(g, s);
    out.set_slice(m, s);
  });
  return out;
}

Field shear_apply(const Field& f, double tau, ShearMethod method, InterpStats* stats) {
  require_repr(f, Repr::Partial, "shear_apply");
  if (method == ShearMethod::Dense) {
    throw std::invalid_argument("shear_apply: the dense shear is folded into schrodinger_step_dense");
  }
  if (tau == 0.0) return f;
  const GridSpec& g = f.grid;
  const double reach = std::abs(tau) * max_abs_alpha(g) * max_half_width_z(g);
  if (reach > 0.5 * min_half_width_z(g)) {
    std::ostringstream os;
    os << "shear_apply: |tau| alpha_max z_max = " << reach << " exceeds half the box " << 0.5 * min_half_width_z(g);
    throw std::invalid_argument(os.str());
  }
  const int d = g.dim();
  const int ns = g.center().n;
  Field out(g, Repr::Partial);
  std::vector<InterpStats> local(static_cast<std::size_t>(ns));
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t mu) {
    const int m = static_cast<int>(mu);
    const double alpha = g.center().freq(m);
    const auto src = f.slice(m);
    std::vector<double> z(static_cast<std::size_t>(2 * d)), zs(static_cast<std::size_t>(2 * d));
    std::vector<cplx> dst(src.size());
    for (std::size_t k = 0; k < src.size(); ++k) {
      g.z_coords(k, z);
      for (int i = 0; i < d; ++i) {
        const double x = z[static_cast<std::size_t>(i)], y = z[static_cast<std::size_t>(d + i)];
        zs[static_cast<std::size_t>(i)] = x - tau * alpha * y;
        zs[static_cast<std::size_t>(d + i)] = y + tau * alpha * x;
      }
      dst[k] = alpha == 0.0 ? src[k] : interpolate_slice_data(g, src, zs, &local[mu]);
    }
    out.set_slice(m, dst);
  });
  if (stats) {
    for (const auto& l : local) *stats += l;
  }
  return out;
}

Field u2_apply(const Field& f, double tau) {
  require_repr(f, Repr::Partial, "u2_apply");
  if (tau == 0.0) return f;
  const GridSpec& g = f.grid;
  Field out = f;
  std::vector<double> z(static_cast<std::size_t>(2 * g.dim()));
  for (std::size_t k = 0; k < g.slice_size(); ++k) {
    g.z_coords(k, z);
    double r2 = 0.0;
    for (double v : z) r2 += v * v;
    for (int m = 0; m < g.center().n; ++m) {
      const double a = g.center().freq(m);
      out.at(k, m) *= std::polar(1.0, -0.5 * tau * a * a * r2);
    }
  }
  return out;
}

Field schrodinger_step_dense(const Field& f, double tau) {
  require_repr(f, Repr::Partial, "schrodinger_step_dense");
  if (tau == 0.0) return f;
  const GridSpec& g = f.grid;
  Field out = f;
  for (int m = 0; m < g.center().n; ++m) {
    const double alpha = g.center().freq(m);
    auto s = out.slice(m);
    fft_z_slice(g, s);
    const auto factors = twisted_symbol_factors(g, alpha, [tau](double u) { return std::polar(1.0, -0.5 * tau * u * u); });
    out.set_slice(m, apply_separable(g, s, factors));
  }
  return out;
}

Field schrodinger_step(const Field& f, double tau, ShearMethod method, SchrodingerStepStats* stats) {
  if (!std::isfinite(tau)) throw std::invalid_argument("schrodinger_step: tau must be finite");
  const Field p = as_partial(f, "schrodinger_step");
  Field out;
  if (method == ShearMethod::Dense) {
    out = schrodinger_step_dense(p, tau);
  } else {
    InterpStats st;
    out = u2_apply(shear_apply(u1_apply(p, tau), tau, method, &st), tau);
    if (stats) {
      stats->interp += st;
      stats->clip_warning = st.clip_rate() > 1e-3;
    }
  }
  return f.repr == Repr::Physical ? inverse_partial_ft(out) : out;
}

Field potential_phase(const Field& f, double tau, const VPotentialSpec& v) {
  require_repr(f, Repr::Physical, "potential_phase");
  if (v.is_zero() || tau == 0.0) return f;
  const auto vals = sample_potential(v.v, f.grid);
  Field out = f;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= std::polar(1.0, -tau * vals[i]);
  return out;
}

Field chernoff_evolve_schrodinger(const Field& f0, double t, int n, const VPotentialSpec& v, ShearMethod method,
                                  StepOrder order, SchrodingerLog* log) {
  require_repr(f0, Repr::Physical, "chernoff_evolve_schrodinger");
  if (n < 1) throw std::invalid_argument("chernoff_evolve_schrodinger: n must be >= 1");
  if (t == 0.0) return f0;
  check_boundary_mass(f0, 1e-6, "chernoff_evolve_schrodinger");
  const double tau = t / n;
  Field cur = f0;
  for (int k = 0; k < n; ++k) {
    SchrodingerStepStats st;
    if (order == StepOrder::SM) {
      cur = schrodinger_step(potential_phase(cur, tau, v), tau, method, &st);
    } else {
      cur = potential_phase(schrodinger_step(cur, tau, method, &st), tau, v);
    }
    const double bm = boundary_mass(cur);
    if (log) {
      log->interp += st.interp;
      if (st.clip_warning) ++log->clip_warnings;
      log->steps.push_back({k + 1, l2_norm(cur), bm});
    }
    if (bm > 1e-6) {
      std::ostringstream os;
      os << "chernoff_evolve_schrodinger: boundary mass " << bm << " after step " << k + 1;
      throw NumericalAbort(os.str());
    }
  }
  return cur;
}

double schrodinger_generator_residual(const Field& f, double tau) {
  require_repr(f, Repr::Physical, "schrodinger_generator_residual");
  if (!(tau > 0.0)) throw std::invalid_argument("schrodinger_generator_residual: tau must be > 0");
  Field diff = schrodinger_step(f, tau, ShearMethod::Dense);
  diff -= f;
  diff *= cplx{1.0 / tau, 0.0};
  Field gen = apply_sublaplacian(f);
  gen *= cplx{0.0, 0.5};
  diff -= gen;
  return l2_norm(diff);
}

OscillatoryResult oscillatory_integral_direct(const Field& f, double tau, const OscillatoryOptions& opt) {
  require_repr(f, Repr::Physical, "oscillatory_integral_direct");
  if (!(tau >= 0.0)) throw std::invalid_argument("oscillatory_integral_direct: tau must be >= 0");
  for (int a = 0; a < 2 * f.grid.dim(); ++a) {
    if (f.grid.axis(a).n > 32) throw std::invalid_argument("oscillatory_integral_direct: horizontal axes limited to 32 nodes");
  }
  if (opt.eps.size() < 2) throw std::invalid_argument("oscillatory_integral_direct: need at least two eps values");
  for (std::size_t i = 0; i < opt.eps.size(); ++i) {
    if (!(opt.eps[i] > 0.0) || (i > 0 && !(opt.eps[i] < opt.eps[i - 1]))) {
      throw std::invalid_argument("oscillatory_integral_direct: eps must be positive and decreasing");
    }
  }
  check_boundary_mass(f, 1e-6, "oscillatory_integral_direct");
  OscillatoryResult res;
  if (tau == 0.0) {
    res.value = f;
    res.bump_value = f;
    res.converged = true;
    return res;
  }
  const GridSpec& g = f.grid;
  const Field spec = to_repr(f, Repr::Spectral);
  double cell = g.center().freq_spacing();
  for (int a = 0; a < 2 * g.dim(); ++a) cell *= g.axis(a).freq_spacing();
  std::vector<cplx> coeff(spec.values.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) coeff[i] = cell * spec.values[i];

  std::vector<double> x2;
  for (double e : opt.eps) x2.push_back(e * e);

  auto extrapolate = [&](Regulator reg, double& scale_out, double& qchange, double& echange) {
    // Panel refinement at the smallest eps, then reuse that panel scale for every eps.
    double scale = 2.0;
    Field prev = direct_once(f, coeff, tau, opt.eps.back(), reg, scale, opt.gl_points);
    qchange = 1.0;
    for (int it = 0; it < opt.max_refinements; ++it) {
      const Field next = direct_once(f, coeff, tau, opt.eps.back(), reg, 0.5 * scale, opt.gl_points);
      qchange = relative_l2_error(prev, next);
      prev = next;
      scale *= 0.5;
      if (qchange <= 0.1 * opt.tolerance) break;
    }
    std::vector<Field> vals;
    for (std::size_t i = 0; i + 1 < opt.eps.size(); ++i) {
      vals.push_back(direct_once(f, coeff, tau, opt.eps[i], reg, scale, opt.gl_points));
    }
    vals.push_back(prev);
    Field ex = neville_to_zero(x2, vals);
    echange = relative_l2_error(prev, ex);
    scale_out = scale;
    return ex;
  };

  double sg = 0, sb = 0, qg = 0, qb = 0, eg = 0, eb = 0;
  res.value = extrapolate(Regulator::Gaussian, sg, qg, eg);
  res.bump_value = extrapolate(Regulator::Bump, sb, qb, eb);
  res.regulator_gap = relative_l2_error(res.bump_value, res.value);
  res.extrapolation_change = std::max(eg, eb);
  res.quadrature_change = std::max(qg, qb);
  res.converged = res.regulator_gap <= opt.tolerance && res.extrapolation_change <= opt.tolerance &&
                  res.quadrature_change <= opt.tolerance;
  if (!res.converged) {
    std::ostringstream os;
    os << "oscillatory_integral_direct: no settled limit (regulator gap " << res.regulator_gap
       << ", extrapolation change " << res.extrapolation_change << ", quadrature change "
       << res.quadrature_change << ", tolerance " << opt.tolerance << ")";
    throw NumericalAbort(os.str());
  }
  return res;
}

FeynmanResult feynman_piecewise_geodesic(const Field& f0, double t, int n, const VPotentialSpec& v,
                                         PotentialSampling sampling, const OscillatoryOptions& opt, double tol) {
  require_repr(f0, Repr::Physical, "feynman_piecewise_geodesic");
  if (n != 1 && n != 2) throw std::invalid_argument("feynman_piecewise_geodesic: n must be 1 or 2");
  const double tau = t / n;
  // Innermost integral first; level j carries the phase at gamma(j t/n).
  Field cur = f0;
  for (int j = n; j >= 1; --j) {
    if (sampling == PotentialSampling::PathEnd) {
      cur = oscillatory_integral_direct(potential_phase(cur, tau, v), tau, opt).value;
    } else {
      cur = potential_phase(oscillatory_integral_direct(cur, tau, opt).value, tau, v);
    }
  }
  FeynmanResult res;
  res.value = cur;
  const StepOrder order = sampling == PotentialSampling::PathEnd ? StepOrder::SM : StepOrder::MS;
  res.composition = chernoff_evolve_schrodinger(f0, t, n, v, ShearMethod::Dense, order);
  res.discrepancy = relative_l2_error(res.value, res.composition);
  if (res.discrepancy > tol) {
    std::ostringstream os;
    os << "feynman_piecewise_geodesic: discrepancy " << res.discrepancy << " against the Chernoff composition";
    throw NumericalAbort(os.str());
  }
  return res;
}

double swept_area(std::span<const std::array<double, 2>> samples) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    acc += samples[i][0] * samples[i + 1][1] - samples[i + 1][0] * samples[i][1];
  }
  return acc;
}

double renormalization_term(std::span<const std::vector<std::array<double, 2>>> basis) {
  double acc = 0.0;
  for (const auto& e : basis) acc += swept_area(e);
  return acc;
}

double path_area_term(std::span<const double> z0, std::span<const std::array<double, 2>> xi, double dt) {
  if (z0.size() != 2) throw DimensionError("path_area_term: planar start point required");
  std::vector<std::array<double, 2>> gamma{{0.0, 0.0}};
  for (const auto& v : xi) {
    const auto& last = gamma.back();
    gamma.push_back({last[0] + dt * v[0], last[1] + dt * v[1]});
  }
  const auto& end = gamma.back();
  const std::vector<double> endv{end[0], end[1]};
  return sigma_form(z0, endv) - swept_area(gamma);
}

}  // namespace hch
