#include "hch/magnetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hch/dense.hpp"
#include "hch/parallel.hpp"

namespace hch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKernelCaustic = 1e-6;
constexpr double kOracleCaustic = 1e-3;

// Gaussian coefficient a and prefactor p with K = p exp(a |dz|^2) * gauge phase.
struct KernelCoeffs {
  cplx width;
  cplx prefactor;
};

double x_over_sinh(double x) { return x == 0.0 ? 1.0 : x / std::sinh(x); }
double x_coth(double x) { return x == 0.0 ? 1.0 : x / std::tanh(x); }
double x_over_sin(double x) { return x == 0.0 ? 1.0 : x / std::sin(x); }
double x_cot(double x) { return x == 0.0 ? 1.0 : x / std::tan(x); }

KernelCoeffs coeffs(const MehlerKernelSpec& spec) {
  if (!(spec.t > 0.0)) throw std::invalid_argument("mehler kernel: t must be > 0");
  const double x = spec.alpha * spec.t;
  if (spec.flavor == Flavor::Heat) {
    return {cplx{-x_coth(x) / (2.0 * spec.t), 0.0}, cplx{x_over_sinh(x) / (2.0 * kPi * spec.t), 0.0}};
  }
  if (std::abs(x) >= 0.5 * kPi && std::abs(std::sin(x)) <= kKernelCaustic) {
    std::ostringstream os;
    os << "mehler_schrodinger_kernel: caustic proximity, |sin(alpha t)| = " << std::abs(std::sin(x))
       << " at alpha t = " << x;
    throw CausticError(os.str(), {spec.alpha});
  }
  return {cplx{0.0, x_cot(x) / (2.0 * spec.t)}, x_over_sin(x) / (cplx{0.0, 2.0 * kPi * spec.t})};
}

void require_planar(std::span<const double> z, std::span<const double> zp) {
  if (z.size() != 2 || zp.size() != 2) throw DimensionError("mehler kernel: points must be in R^2");
}

cplx kernel_value(const MehlerKernelSpec& spec, std::span<const double> z, std::span<const double> zp) {
  require_planar(z, zp);
  const KernelCoeffs k = coeffs(spec);
  const double dx = z[0] - zp[0], dy = z[1] - zp[1];
  const double phase = -spec.alpha * (z[0] * zp[1] - zp[0] * z[1]);
  return k.prefactor * std::exp(k.width * (dx * dx + dy * dy) + cplx{0.0, phase});
}

void guard_oracle(const GridSpec& g, double t, Flavor flavor) {
  if (flavor != Flavor::Schrodinger) return;
  std::vector<double> bad;
  for (int m = 0; m < g.center().n; ++m) {
    const double a = g.center().freq(m);
    if (caustic_distance(a, t) <= kOracleCaustic) bad.push_back(a);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "oracle_evolve: " << bad.size() << " alpha nodes within caustic tolerance at t = " << t << ":";
    for (double a : bad) os << ' ' << a;
    throw CausticError(os.str(), bad);
  }
}

// Per-slice kernel quadrature as a separable dense operator from `in` nodes to `out` nodes.
std::vector<AxisFactors> kernel_factors(const GridSpec& out, const GridSpec& in, const MehlerKernelSpec& spec) {
  const KernelCoeffs k = coeffs(spec);
  const Axis& ox = out.axis(0);
  const Axis& oy = out.axis(1);
  const Axis& ix = in.axis(0);
  const Axis& iy = in.axis(1);
  std::vector<AxisFactors> f(2);
  // axis x: own(i, i') = e^{a (x_i - x'_i')^2} h_x, partner(j, i') = e^{i alpha x'_i' y_j}
  f[0].own.resize(ox.n, ix.n);
  f[0].partner.resize(oy.n, ix.n);
  for (int kk = 0; kk < ix.n; ++kk) {
    const double xp = ix.node(kk);
    for (int i = 0; i < ox.n; ++i) {
      const double dx = ox.node(i) - xp;
      f[0].own(i, kk) = std::exp(k.width * (dx * dx)) * ix.spacing();
    }
    for (int j = 0; j < oy.n; ++j) f[0].partner(j, kk) = std::polar(1.0, spec.alpha * xp * oy.node(j));
  }
  // axis y: own(j, j') = e^{a (y_j - y'_j')^2} h_y, partner(i, j') = e^{-i alpha x_i y'_j'}
  f[1].own.resize(oy.n, iy.n);
  f[1].partner.resize(ox.n, iy.n);
  for (int kk = 0; kk < iy.n; ++kk) {
    const double yp = iy.node(kk);
    for (int j = 0; j < oy.n; ++j) {
      const double dy = oy.node(j) - yp;
      f[1].own(j, kk) = std::exp(k.width * (dy * dy)) * iy.spacing();
    }
    for (int i = 0; i < ox.n; ++i) f[1].partner(i, kk) = std::polar(1.0, -spec.alpha * ox.node(i) * yp);
  }
  f[0].own *= k.prefactor;
  return f;
}

constexpr int kMaxRefine = 8;
constexpr double kNegligibleSlice = 1e-10;
constexpr double kSpectralFloor = 1e-13;

// Largest |frequency| per horizontal axis carrying more than kSpectralFloor of the peak coefficient.
std::array<double, 2> slice_bandwidth(const GridSpec& g, std::span<const cplx> slice) {
  std::vector<cplx> hat(slice.begin(), slice.end());
  fft_z_slice(g, hat);
  double peak = 0.0;
  for (const auto& v : hat) peak = std::max(peak, std::abs(v));
  std::array<double, 2> band{0.0, 0.0};
  if (peak == 0.0) return band;
  std::array<int, 2> idx{};
  for (std::size_t zf = 0; zf < hat.size(); ++zf) {
    if (std::abs(hat[zf]) <= kSpectralFloor * peak) continue;
    g.z_unflat(zf, idx);
    for (int a = 0; a < 2; ++a) band[a] = std::max(band[a], std::abs(g.axis(a).freq(idx[a])));
  }
  return band;
}

// Bandwidth along axis a of z' -> K(z, z') psi(z') over outputs with |z_b| <= reach[b]. Trapezoid
// sums are exact for integrands band-limited below 2 pi / h.
double integrand_bandwidth(const GridSpec& g, const MehlerKernelSpec& spec, int a, double data_band,
                           const std::array<double, 2>& reach) {
  const KernelCoeffs k = coeffs(spec);
  const double gauge = std::abs(spec.alpha) * reach[static_cast<std::size_t>(1 - a)];
  const double span = reach[static_cast<std::size_t>(a)] + g.axis(a).half_width;
  if (spec.flavor == Flavor::Heat) {
    // Gaussian factor e^{-b u^2} has spectrum below e^{-36} beyond 12 sqrt(b).
    return 12.0 * std::sqrt(-k.width.real()) + gauge + data_band;
  }
  return 2.0 * std::abs(k.width.imag()) * span + gauge + data_band;
}

// Slice data on a grid fine enough for the kernel quadrature at this alpha.
struct ResolvedSlice {
  GridSpec grid;
  std::vector<cplx> data;
  int refine = 1;
};

ResolvedSlice resolve_slice(const GridSpec& g, std::span<const cplx> slice, const MehlerKernelSpec& spec,
                            bool negligible, const std::array<double, 2>& reach) {
  const auto band = slice_bandwidth(g, slice);
  int refine = 1;
  for (int a = 0; a < 2; ++a) {
    const double need = integrand_bandwidth(g, spec, a, band[static_cast<std::size_t>(a)], reach);
    while (2.0 * kPi * refine / g.axis(a).spacing() <= need && refine < 2 * kMaxRefine) refine *= 2;
  }
  if (refine > kMaxRefine) {
    if (!negligible) {
      std::ostringstream os;
      os << "oracle: kernel quadrature at alpha = " << spec.alpha << ", t = " << spec.t
         << " needs more than " << kMaxRefine << "x refinement; use a finer horizontal grid";
      throw NumericalAbort(os.str());
    }
    refine = kMaxRefine;
  }
  if (refine == 1) return {g, std::vector<cplx>(slice.begin(), slice.end()), 1};
  std::vector<Axis> axes;
  for (int a = 0; a < 2; ++a) axes.push_back(Axis{g.axis(a).n * refine, g.axis(a).half_width});
  axes.push_back(g.center());
  GridSpec fine(1, std::move(axes));
  std::vector<cplx> hat(slice.begin(), slice.end());
  fft_z_slice(g, hat);
  std::vector<cplx> padded(fine.slice_size(), cplx{0.0, 0.0});
  const int off0 = (fine.axis(0).n - g.axis(0).n) / 2;
  const int off1 = (fine.axis(1).n - g.axis(1).n) / 2;
  for (int i = 0; i < g.axis(0).n; ++i) {
    for (int j = 0; j < g.axis(1).n; ++j) {
      padded[static_cast<std::size_t>(i + off0) * static_cast<std::size_t>(fine.axis(1).n) +
             static_cast<std::size_t>(j + off1)] = hat[static_cast<std::size_t>(i) * static_cast<std::size_t>(g.axis(1).n) +
                                                       static_cast<std::size_t>(j)];
    }
  }
  inverse_fft_z_slice(fine, padded);
  return {std::move(fine), std::move(padded), refine};
}

// Slice l2 norms and the flag marking slices too small to affect any result.
std::vector<bool> negligible_slices(const Field& p) {
  const int ns = p.grid.center().n;
  std::vector<double> norms(static_cast<std::size_t>(ns), 0.0);
  for (std::size_t zf = 0; zf < p.grid.slice_size(); ++zf) {
    for (int m = 0; m < ns; ++m) norms[static_cast<std::size_t>(m)] += std::norm(p.at(zf, m));
  }
  const double top = *std::max_element(norms.begin(), norms.end());
  std::vector<bool> out(static_cast<std::size_t>(ns));
  for (int m = 0; m < ns; ++m) {
    out[static_cast<std::size_t>(m)] = std::sqrt(norms[static_cast<std::size_t>(m)]) <= kNegligibleSlice * std::sqrt(top);
  }
  return out;
}

}  // namespace

const char* flavor_name(Flavor f) { return f == Flavor::Heat ? "heat" : "schrodinger"; }

cplx mehler_heat_kernel(const MehlerKernelSpec& spec, std::span<const double> z, std::span<const double> zp) {
  if (spec.flavor != Flavor::Heat) throw std::invalid_argument("mehler_heat_kernel: flavor must be heat");
  return kernel_value(spec, z, zp);
}

cplx mehler_schrodinger_kernel(const MehlerKernelSpec& spec, std::span<const double> z,
                               std::span<const double> zp) {
  if (spec.flavor != Flavor::Schrodinger) {
    throw std::invalid_argument("mehler_schrodinger_kernel: flavor must be schrodinger");
  }
  return kernel_value(spec, z, zp);
}

cplx mehler_kernel(const MehlerKernelSpec& spec, std::span<const double> z, std::span<const double> zp) {
  return kernel_value(spec, z, zp);
}

double caustic_distance(double alpha, double t) {
  const double x = alpha * t;
  return std::abs(x) < 0.5 * kPi ? 1.0 : std::abs(std::sin(x));
}

Field oracle_evolve(const Field& f0, double t, Flavor flavor) {
  require_repr(f0, Repr::Physical, "oracle_evolve");
  if (f0.grid.dim() != 1) throw DimensionError("oracle_evolve: only d = 1 is supported");
  if (!(t >= 0.0)) throw std::invalid_argument("oracle_evolve: t must be >= 0");
  if (t == 0.0) return f0;
  const GridSpec& g = f0.grid;
  guard_oracle(g, t, flavor);
  Field p = partial_ft(f0);
  const auto skip = negligible_slices(p);
  for (int m = 0; m < g.center().n; ++m) {
    const MehlerKernelSpec spec{g.center().freq(m), t, flavor};
    const ResolvedSlice r = resolve_slice(g, p.slice(m), spec, skip[static_cast<std::size_t>(m)],
                                          {g.axis(0).half_width, g.axis(1).half_width});
    p.set_slice(m, apply_separable(g, r.grid, r.data, kernel_factors(g, r.grid, spec)));
  }
  return inverse_partial_ft(p);
}

cplx oracle_evaluate_point(const Field& f0, const HPoint& pt, double t, Flavor flavor) {
  require_repr(f0, Repr::Physical, "oracle_evaluate_point");
  if (f0.grid.dim() != 1) throw DimensionError("oracle_evaluate_point: only d = 1 is supported");
  if (pt.dim() != 1) throw DimensionError("oracle_evaluate_point: point dimension");
  const GridSpec& g = f0.grid;
  const Field p = partial_ft(f0);
  if (t == 0.0) {
    const std::vector<double> c{pt.z[0], pt.z[1], pt.s};
    return interpolate(f0, c);
  }
  guard_oracle(g, t, flavor);
  const int ns = g.center().n;
  const auto skip = negligible_slices(p);
  std::vector<cplx> per_alpha(static_cast<std::size_t>(ns));
  for (int m = 0; m < ns; ++m) {
    const double alpha = g.center().freq(m);
    const MehlerKernelSpec spec{alpha, t, flavor};
    const ResolvedSlice r = resolve_slice(g, p.slice(m), spec, skip[static_cast<std::size_t>(m)],
                                          {std::abs(pt.z[0]), std::abs(pt.z[1])});
    const double cell = r.grid.axis(0).spacing() * r.grid.axis(1).spacing();
    std::vector<cplx> partial(r.grid.slice_size());
    parallel_for(r.grid.slice_size(), [&](std::size_t zf) {
      const cplx v = r.data[zf];
      if (v == cplx{0.0, 0.0}) return;
      std::array<double, 2> zp{};
      r.grid.z_coords(zf, zp);
      partial[zf] = kernel_value(spec, pt.z, zp) * v;
    });
    cplx acc{0.0, 0.0};
    for (const auto& v : partial) acc += v;
    per_alpha[static_cast<std::size_t>(m)] = acc * cell * std::polar(g.center().freq_spacing(), alpha * pt.s);
  }
  cplx out{0.0, 0.0};
  for (const auto& v : per_alpha) out += v;
  return out;
}

std::vector<KernelRow> kernel_table(Flavor flavor, std::span<const double> alphas, double t,
                                    std::span<const std::vector<double>> z, std::span<const std::vector<double>> zp) {
  if (z.size() != zp.size()) throw DimensionError("kernel_table: point lists differ in length");
  std::vector<KernelRow> rows;
  for (double a : alphas) {
    const MehlerKernelSpec spec{a, t, flavor};
    for (std::size_t i = 0; i < z.size(); ++i) {
      rows.push_back({a, t, z[i].at(0), z[i].at(1), zp[i].at(0), zp[i].at(1), kernel_value(spec, z[i], zp[i])});
    }
  }
  return rows;
}

void write_kernel_csv(const std::vector<KernelRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("write_kernel_csv: cannot open " + path);
  os.precision(17);
  os << "alpha,t,x,y,xp,yp,re_k,im_k\n";
  for (const auto& r : rows) {
    os << r.alpha << ',' << r.t << ',' << r.x << ',' << r.y << ',' << r.xp << ',' << r.yp << ','
       << r.value.real() << ',' << r.value.imag() << '\n';
  }
}

}  // namespace hch
