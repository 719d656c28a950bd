#include "hch/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

namespace hch {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// (-1)^k for possibly negative k.
inline double alt_sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

// In-place FFTW transform over `rank` axes with sizes `dims`, element stride
// `stride` and `howmany` batches separated by `dist`.
void run_fft(cplx* data, std::vector<int> dims, int stride, int howmany, int dist, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, p, nullptr, stride,
                              dist, p, nullptr, stride, dist, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// Sign pattern for the centered grids: positions carry (-1)^j, frequencies (-1)^(m - n/2).
std::vector<double> node_signs(const Axis& ax) {
  std::vector<double> s(static_cast<std::size_t>(ax.n));
  for (int j = 0; j < ax.n; ++j) s[static_cast<std::size_t>(j)] = alt_sign(j);
  return s;
}

std::vector<double> freq_signs(const Axis& ax) {
  std::vector<double> s(static_cast<std::size_t>(ax.n));
  for (int m = 0; m < ax.n; ++m) s[static_cast<std::size_t>(m)] = alt_sign(m - ax.n / 2);
  return s;
}

// Product over the horizontal axes of per-axis sign tables, as a flat slice table.
std::vector<double> slice_sign_table(const GridSpec& g, bool freq) {
  std::vector<double> out(g.slice_size(), 1.0);
  std::vector<int> idx(static_cast<std::size_t>(2 * g.dim()));
  std::vector<std::vector<double>> tabs;
  for (int a = 0; a < 2 * g.dim(); ++a) tabs.push_back(freq ? freq_signs(g.axis(a)) : node_signs(g.axis(a)));
  for (std::size_t f = 0; f < out.size(); ++f) {
    g.z_unflat(f, idx);
    double s = 1.0;
    for (std::size_t a = 0; a < idx.size(); ++a) s *= tabs[a][static_cast<std::size_t>(idx[a])];
    out[f] = s;
  }
  return out;
}

double z_forward_scale(const GridSpec& g) {
  double s = 1.0;
  for (int a = 0; a < 2 * g.dim(); ++a) s *= g.axis(a).spacing() / (2.0 * kPi);
  return s;
}

double z_inverse_scale(const GridSpec& g) {
  double s = 1.0;
  for (int a = 0; a < 2 * g.dim(); ++a) s *= g.axis(a).freq_spacing();
  return s;
}

std::vector<int> z_dims(const GridSpec& g) {
  std::vector<int> dims;
  for (int a = 0; a < 2 * g.dim(); ++a) dims.push_back(g.axis(a).n);
  return dims;
}

// Catmull-Rom weights for offset t in [0,1) at stencil points -1, 0, 1, 2.
inline void cr_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

constexpr int kMaxAxes = 7;

cplx interp_core(const cplx* data, int naxes, const Axis* axes, const std::size_t* strides,
                 const double* coord, InterpStats* stats) {
  if (stats) ++stats->evaluations;
  int base[kMaxAxes];
  double w[kMaxAxes][4];
  for (int a = 0; a < naxes; ++a) {
    const Axis& ax = axes[a];
    const double u = (coord[a] + ax.half_width) / ax.spacing();
    constexpr double slack = 1e-9;
    if (!(u >= -slack && u <= (ax.n - 1) + slack)) {
      if (stats) ++stats->clipped;
      return {0.0, 0.0};
    }
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, ax.n - 1);
    double t = u - i;
    if (t < 0.0) t = 0.0;
    base[a] = i;
    cr_weights(t, w[a]);
  }
  cplx acc{0.0, 0.0};
  int off[kMaxAxes] = {0};
  const int total = 1 << (2 * naxes);
  for (int c = 0; c < total; ++c) {
    int cc = c;
    double weight = 1.0;
    std::size_t pos = 0;
    bool inside = true;
    for (int a = naxes - 1; a >= 0; --a) {
      off[a] = cc & 3;
      cc >>= 2;
      const int j = base[a] + off[a] - 1;
      if (j < 0 || j >= axes[a].n) {
        inside = false;
        break;
      }
      weight *= w[a][off[a]];
      pos += static_cast<std::size_t>(j) * strides[a];
    }
    if (!inside || weight == 0.0) continue;
    acc += weight * data[pos];
  }
  return acc;
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("hfld: truncated file");
  return v;
}

}  // namespace

const char* repr_name(Repr r) {
  switch (r) {
    case Repr::Physical: return "physical";
    case Repr::Partial: return "partial";
    case Repr::Spectral: return "spectral";
  }
  return "unknown";
}

double Axis::freq_spacing() const { return kPi / half_width; }

GridSpec::GridSpec(int d, std::vector<Axis> axes) : d_(d), axes_(std::move(axes)) {
  if (d < 1 || d > 3) throw DimensionError("GridSpec: d must be in 1..3");
  if (axes_.size() != static_cast<std::size_t>(2 * d + 1)) {
    throw DimensionError("GridSpec: expected 2d+1 axes");
  }
  slice_size_ = 1;
  for (int a = 0; a < rank(); ++a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    if (ax.n < 4) throw DimensionError("GridSpec: every axis needs at least 4 nodes");
    if (!(ax.half_width > 0.0) || !std::isfinite(ax.half_width)) {
      throw DimensionError("GridSpec: half widths must be positive and finite");
    }
    if (a < 2 * d) {
      if (!is_pow2(ax.n)) throw DimensionError("GridSpec: horizontal node counts must be powers of two");
      slice_size_ *= static_cast<std::size_t>(ax.n);
    } else if (ax.n % 2 != 0) {
      throw DimensionError("GridSpec: center-axis node count must be even");
    }
  }
}

GridSpec GridSpec::uniform(int d, int nz, double lz, int ns, double ls) {
  std::vector<Axis> ax(static_cast<std::size_t>(2 * d), Axis{nz, lz});
  ax.push_back(Axis{ns, ls});
  return GridSpec(d, std::move(ax));
}

std::size_t GridSpec::z_flat(std::span<const int> idx) const {
  std::size_t f = 0;
  for (int a = 0; a < 2 * d_; ++a) {
    f = f * static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].n) +
        static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
  }
  return f;
}

void GridSpec::z_unflat(std::size_t flat, std::span<int> idx) const {
  for (int a = 2 * d_ - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].n);
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
    flat /= n;
  }
}

void GridSpec::z_coords(std::size_t flat, std::span<double> out) const {
  for (int a = 2 * d_ - 1; a >= 0; --a) {
    const Axis& ax = axes_[static_cast<std::size_t>(a)];
    const auto n = static_cast<std::size_t>(ax.n);
    out[static_cast<std::size_t>(a)] = ax.node(static_cast<int>(flat % n));
    flat /= n;
  }
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (d_ != o.d_ || axes_.size() != o.axes_.size()) return false;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (axes_[a].n != o.axes_[a].n || axes_[a].half_width != o.axes_[a].half_width) return false;
  }
  return true;
}

Field::Field(GridSpec g, Repr r) : grid(std::move(g)), repr(r), values(grid.size(), cplx{0.0, 0.0}) {}

Field::Field(GridSpec g, Repr r, std::vector<cplx> v) : grid(std::move(g)), repr(r), values(std::move(v)) {
  if (values.size() != grid.size()) throw DimensionError("Field: value count does not match grid");
}

std::vector<cplx> Field::slice(int m) const {
  std::vector<cplx> out(grid.slice_size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = at(f, m);
  return out;
}

void Field::set_slice(int m, std::span<const cplx> data) {
  if (data.size() != grid.slice_size()) throw DimensionError("Field::set_slice: size mismatch");
  for (std::size_t f = 0; f < data.size(); ++f) at(f, m) = data[f];
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

Field& Field::operator*=(cplx a) {
  for (auto& v : values) v *= a;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx a, Field f) { return f *= a; }

void require_repr(const Field& f, Repr r, const char* op) {
  if (f.repr != r) {
    throw RepresentationError(std::string(op) + ": expected " + repr_name(r) + " representation, got " +
                              repr_name(f.repr));
  }
}

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid == b.grid)) throw DimensionError(std::string(op) + ": grids differ");
  if (a.repr != b.repr) throw RepresentationError(std::string(op) + ": representations differ");
}

Field partial_ft(const Field& f) {
  require_repr(f, Repr::Physical, "partial_ft");
  const Axis& ax = f.grid.center();
  const auto ns = static_cast<std::size_t>(ax.n);
  Field out(f.grid, Repr::Partial, f.values);
  const auto pre = node_signs(ax);
  auto post = freq_signs(ax);
  const double scale = ax.spacing() / (2.0 * kPi);
  for (auto& v : post) v *= scale;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= pre[i % ns];
  run_fft(out.values.data(), {ax.n}, 1, static_cast<int>(f.grid.slice_size()), ax.n, FFTW_FORWARD);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= post[i % ns];
  return out;
}

Field inverse_partial_ft(const Field& f) {
  require_repr(f, Repr::Partial, "inverse_partial_ft");
  const Axis& ax = f.grid.center();
  const auto ns = static_cast<std::size_t>(ax.n);
  Field out(f.grid, Repr::Physical, f.values);
  const auto pre = freq_signs(ax);
  auto post = node_signs(ax);
  for (auto& v : post) v *= ax.freq_spacing();
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= pre[i % ns];
  run_fft(out.values.data(), {ax.n}, 1, static_cast<int>(f.grid.slice_size()), ax.n, FFTW_BACKWARD);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= post[i % ns];
  return out;
}

namespace {

void z_transform(Field& f, bool forward) {
  const GridSpec& g = f.grid;
  const auto ns = static_cast<std::size_t>(g.center().n);
  const auto pre = slice_sign_table(g, !forward);
  auto post = slice_sign_table(g, forward);
  const double scale = forward ? z_forward_scale(g) : z_inverse_scale(g);
  for (auto& v : post) v *= scale;
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= pre[i / ns];
  run_fft(f.values.data(), z_dims(g), static_cast<int>(ns), static_cast<int>(ns), 1,
          forward ? FFTW_FORWARD : FFTW_BACKWARD);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= post[i / ns];
}

void z_transform_slice(const GridSpec& g, std::span<cplx> data, bool forward) {
  if (data.size() != g.slice_size()) throw DimensionError("fft_z_slice: size mismatch");
  const auto pre = slice_sign_table(g, !forward);
  auto post = slice_sign_table(g, forward);
  const double scale = forward ? z_forward_scale(g) : z_inverse_scale(g);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= pre[i];
  run_fft(data.data(), z_dims(g), 1, 1, 0, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= post[i] * scale;
}

}  // namespace

Field fft_z(const Field& f) {
  require_repr(f, Repr::Partial, "fft_z");
  Field out(f.grid, Repr::Spectral, f.values);
  z_transform(out, true);
  return out;
}

Field inverse_fft_z(const Field& f) {
  require_repr(f, Repr::Spectral, "inverse_fft_z");
  Field out(f.grid, Repr::Partial, f.values);
  z_transform(out, false);
  return out;
}

void fft_z_slice(const GridSpec& g, std::span<cplx> data) { z_transform_slice(g, data, true); }
void inverse_fft_z_slice(const GridSpec& g, std::span<cplx> data) { z_transform_slice(g, data, false); }

Field to_repr(const Field& f, Repr target) {
  Field cur = f;
  while (cur.repr != target) {
    if (static_cast<int>(cur.repr) < static_cast<int>(target)) {
      cur = cur.repr == Repr::Physical ? partial_ft(cur) : fft_z(cur);
    } else {
      cur = cur.repr == Repr::Spectral ? inverse_fft_z(cur) : inverse_partial_ft(cur);
    }
  }
  return cur;
}

double norm_weight(const GridSpec& g, Repr r) {
  double w = 1.0;
  for (int a = 0; a < 2 * g.dim(); ++a) {
    w *= r == Repr::Spectral ? 2.0 * kPi * g.axis(a).freq_spacing() : g.axis(a).spacing();
  }
  w *= r == Repr::Physical ? g.center().spacing() : 2.0 * kPi * g.center().freq_spacing();
  return w;
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * norm_weight(f.grid, f.repr));
}

cplx inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner_product");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * std::conj(g.values[i]);
  return acc * norm_weight(f.grid, f.repr);
}

double l2_distance(const Field& a, const Field& b) {
  require_same_grid(a, b, "l2_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(acc * norm_weight(a.grid, a.repr));
}

double relative_l2_error(const Field& a, const Field& b) {
  const double nb = l2_norm(b);
  if (nb == 0.0) throw std::invalid_argument("relative_l2_error: reference field is zero");
  return l2_distance(a, b) / nb;
}

double sup_norm_sampled(const Field& f) {
  require_repr(f, Repr::Physical, "sup_norm_sampled");
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

cplx interpolate(const Field& f, std::span<const double> coord, InterpStats* stats) {
  require_repr(f, Repr::Physical, "interpolate");
  const int r = f.grid.rank();
  if (coord.size() != static_cast<std::size_t>(r)) throw DimensionError("interpolate: coordinate rank");
  std::size_t strides[kMaxAxes];
  strides[r - 1] = 1;
  for (int a = r - 2; a >= 0; --a) strides[a] = strides[a + 1] * static_cast<std::size_t>(f.grid.axis(a + 1).n);
  return interp_core(f.values.data(), r, f.grid.axes().data(), strides, coord.data(), stats);
}

cplx interpolate_bandlimited(const Field& f, std::span<const double> coord) {
  require_repr(f, Repr::Physical, "interpolate_bandlimited");
  const int r = f.grid.rank();
  if (coord.size() != static_cast<std::size_t>(r)) throw DimensionError("interpolate_bandlimited: coordinate rank");
  std::vector<cplx> cur = f.values, next;
  for (int a = r - 1; a >= 0; --a) {
    const Axis& ax = f.grid.axis(a);
    // Dirichlet weights: (1/n) sum_m exp(i freq(m) (x - x_j)).
    std::vector<cplx> w(static_cast<std::size_t>(ax.n));
    for (int j = 0; j < ax.n; ++j) {
      const double theta = std::numbers::pi * (coord[static_cast<std::size_t>(a)] - ax.node(j)) / ax.half_width;
      const cplx q = std::polar(1.0, theta);
      const cplx lead = std::polar(1.0, -0.5 * ax.n * theta);
      w[static_cast<std::size_t>(j)] =
          std::abs(q - 1.0) < 1e-12 ? lead : lead * (std::polar(1.0, ax.n * theta) - 1.0) / (q - 1.0) / double(ax.n);
    }
    const std::size_t outer = cur.size() / static_cast<std::size_t>(ax.n);
    next.assign(outer, cplx{0.0, 0.0});
    for (std::size_t o = 0; o < outer; ++o) {
      const cplx* row = cur.data() + o * static_cast<std::size_t>(ax.n);
      cplx acc{0.0, 0.0};
      for (int j = 0; j < ax.n; ++j) acc += row[j] * w[static_cast<std::size_t>(j)];
      next[o] = acc;
    }
    cur.swap(next);
  }
  return cur.front();
}

cplx interpolate_slice_data(const GridSpec& g, std::span<const cplx> slice, std::span<const double> z,
                            InterpStats* stats) {
  const int r = 2 * g.dim();
  if (z.size() != static_cast<std::size_t>(r)) throw DimensionError("interpolate_slice: coordinate rank");
  if (slice.size() != g.slice_size()) throw DimensionError("interpolate_slice: slice size");
  std::size_t strides[kMaxAxes];
  strides[r - 1] = 1;
  for (int a = r - 2; a >= 0; --a) strides[a] = strides[a + 1] * static_cast<std::size_t>(g.axis(a + 1).n);
  return interp_core(slice.data(), r, g.axes().data(), strides, z.data(), stats);
}

cplx interpolate_slice(const Field& f, int m, std::span<const double> z, InterpStats* stats) {
  if (f.repr == Repr::Spectral) throw RepresentationError("interpolate_slice: spectral field");
  const int r = 2 * f.grid.dim();
  if (z.size() != static_cast<std::size_t>(r)) throw DimensionError("interpolate_slice: coordinate rank");
  std::size_t strides[kMaxAxes];
  const auto ns = static_cast<std::size_t>(f.grid.center().n);
  strides[r - 1] = ns;
  for (int a = r - 2; a >= 0; --a) strides[a] = strides[a + 1] * static_cast<std::size_t>(f.grid.axis(a + 1).n);
  return interp_core(f.values.data() + m, r, f.grid.axes().data(), strides, z.data(), stats);
}

Field make_packet(const GaussianPacketSpec& spec, const GridSpec& grid) {
  const int r = grid.rank();
  if (spec.center.dim() != grid.dim()) throw DimensionError("make_packet: center dimension differs from grid");
  if (spec.widths.size() != static_cast<std::size_t>(r)) throw DimensionError("make_packet: need 2d+1 widths");
  if (!spec.momentum.empty() && spec.momentum.size() != static_cast<std::size_t>(r)) {
    throw DimensionError("make_packet: need 2d+1 momentum components");
  }
  std::vector<std::vector<cplx>> factors(static_cast<std::size_t>(r));
  for (int a = 0; a < r; ++a) {
    const Axis& ax = grid.axis(a);
    const double c = a < 2 * grid.dim() ? spec.center.z[static_cast<std::size_t>(a)] : spec.center.s;
    const double w = spec.widths[static_cast<std::size_t>(a)];
    const double k = spec.momentum.empty() ? 0.0 : spec.momentum[static_cast<std::size_t>(a)];
    if (!(w > 0.0)) throw std::invalid_argument("make_packet: widths must be positive");
    if (w < ax.spacing()) {
      std::ostringstream os;
      os << "make_packet: width " << w << " on axis " << a << " is below the grid spacing " << ax.spacing();
      throw std::invalid_argument(os.str());
    }
    const double lo_margin = (c - ax.node(0)) / w;
    const double hi_margin = (ax.node(ax.n - 1) - c) / w;
    if (lo_margin < 6.0 || hi_margin < 6.0) {
      std::ostringstream os;
      os << "make_packet: axis " << a << " boundary margin " << std::min(lo_margin, hi_margin)
         << " widths, need at least 6";
      throw std::invalid_argument(os.str());
    }
    auto& fac = factors[static_cast<std::size_t>(a)];
    fac.resize(static_cast<std::size_t>(ax.n));
    for (int j = 0; j < ax.n; ++j) {
      const double u = ax.node(j);
      fac[static_cast<std::size_t>(j)] =
          std::exp(-(u - c) * (u - c) / (2.0 * w * w)) * std::polar(1.0, k * u);
    }
  }
  Field f(grid, Repr::Physical);
  std::vector<int> idx(static_cast<std::size_t>(2 * grid.dim()));
  const int ns = grid.center().n;
  for (std::size_t zf = 0; zf < grid.slice_size(); ++zf) {
    grid.z_unflat(zf, idx);
    cplx zval{1.0, 0.0};
    for (std::size_t a = 0; a < idx.size(); ++a) zval *= factors[a][static_cast<std::size_t>(idx[a])];
    for (int m = 0; m < ns; ++m) f.at(zf, m) = zval * factors.back()[static_cast<std::size_t>(m)];
  }
  const double nrm = l2_norm(f);
  f *= 1.0 / nrm;
  return f;
}

double boundary_mass(const Field& f) {
  const GridSpec& g = f.grid;
  const int rz = 2 * g.dim();
  std::vector<int> band(static_cast<std::size_t>(g.rank()));
  for (int a = 0; a < g.rank(); ++a) band[static_cast<std::size_t>(a)] = std::max(1, g.axis(a).n / 16);
  std::vector<int> idx(static_cast<std::size_t>(rz));
  double edge = 0.0, total = 0.0;
  const int ns = g.center().n;
  const int bs = band.back();
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_unflat(zf, idx);
    bool z_edge = false;
    for (int a = 0; a < rz; ++a) {
      const int i = idx[static_cast<std::size_t>(a)];
      const int b = band[static_cast<std::size_t>(a)];
      if (i < b || i >= g.axis(a).n - b) z_edge = true;
    }
    for (int m = 0; m < ns; ++m) {
      const double v = std::norm(f.at(zf, m));
      total += v;
      if (z_edge || m < bs || m >= ns - bs) edge += v;
    }
  }
  return total == 0.0 ? 0.0 : edge / total;
}

void check_boundary_mass(const Field& f, double threshold, const char* where) {
  const double bm = boundary_mass(f);
  if (bm > threshold) {
    std::ostringstream os;
    os << where << ": boundary mass " << bm << " exceeds " << threshold;
    throw NumericalAbort(os.str());
  }
}

void write_hfld(const Field& f, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "HFLD1 writer assumes a little-endian host");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_hfld: cannot open " + path);
  os.write("HFLD1", 5);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.dim()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(f.repr));
  for (const auto& ax : f.grid.axes()) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ax.n));
    put<double>(os, ax.half_width);
  }
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.values.size()));
  for (const auto& v : f.values) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw std::runtime_error("write_hfld: write failed for " + path);
}

Field read_hfld(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_hfld: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "HFLD1", 5) != 0) throw std::runtime_error("read_hfld: bad magic");
  const auto d = static_cast<int>(get<std::uint32_t>(is));
  const auto repr = get<std::uint8_t>(is);
  if (repr > 2) throw std::runtime_error("read_hfld: bad representation tag");
  if (d < 1 || d > 3) throw std::runtime_error("read_hfld: bad dimension");
  std::vector<Axis> axes;
  for (int a = 0; a < 2 * d + 1; ++a) {
    Axis ax;
    ax.n = static_cast<int>(get<std::uint32_t>(is));
    ax.half_width = get<double>(is);
    axes.push_back(ax);
  }
  GridSpec g(d, std::move(axes));
  const auto count = get<std::uint64_t>(is);
  if (count != g.size()) throw std::runtime_error("read_hfld: count does not match grid");
  std::vector<cplx> vals(count);
  for (auto& v : vals) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    v = {re, im};
  }
  return Field(std::move(g), static_cast<Repr>(repr), std::move(vals));
}

void write_slice_csv(const Field& f, int axis, const std::string& path) {
  const GridSpec& g = f.grid;
  if (axis < 0 || axis >= g.rank()) throw DimensionError("write_slice_csv: axis out of range");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("write_slice_csv: cannot open " + path);
  os.precision(17);
  os << "coord,re,im,abs\n";
  std::vector<int> idx(static_cast<std::size_t>(2 * g.dim()));
  for (int a = 0; a < 2 * g.dim(); ++a) idx[static_cast<std::size_t>(a)] = g.axis(a).n / 2;
  int m = g.center().n / 2;
  const Axis& ax = g.axis(axis);
  for (int j = 0; j < ax.n; ++j) {
    if (axis < 2 * g.dim()) {
      idx[static_cast<std::size_t>(axis)] = j;
    } else {
      m = j;
    }
    const bool dual_z = f.repr == Repr::Spectral && axis < 2 * g.dim();
    const bool dual_s = f.repr != Repr::Physical && axis == 2 * g.dim();
    const double coord = (dual_z || dual_s) ? ax.freq(j) : ax.node(j);
    const cplx v = f.at(g.z_flat(idx), m);
    os << coord << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
  }
}

}  // namespace hch
