#include "hch/dense.hpp"

#include "hch/parallel.hpp"

namespace hch {

namespace {

using RowMatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_shapes(const GridSpec& go, const GridSpec& gi, std::span<const cplx> in, const std::vector<AxisFactors>& f) {
  const int d = go.dim();
  if (gi.dim() != d) throw DimensionError("apply_separable: grid dimensions differ");
  if (in.size() != gi.slice_size()) throw DimensionError("apply_separable: slice size mismatch");
  if (f.size() != static_cast<std::size_t>(2 * d)) throw DimensionError("apply_separable: need 2d factor pairs");
  for (int a = 0; a < 2 * d; ++a) {
    const auto n = go.axis(a).n;
    const auto ni = gi.axis(a).n;
    const auto np = go.axis(partner_axis(a, d)).n;
    const auto& fa = f[static_cast<std::size_t>(a)];
    if (fa.own.rows() != n || fa.own.cols() != ni || fa.partner.rows() != np || fa.partner.cols() != ni) {
      throw DimensionError("apply_separable: factor table shape mismatch");
    }
  }
}

// d = 1: for each output row i, T_i = B_i * in^T with B_i(j, k1) = own1(j, k1) part1(i, k1),
// then out(i, j) = sum_k0 own0(i, k0) part0(j, k0) T_i(j, k0).
std::vector<cplx> apply_d1(const GridSpec& go, const GridSpec& gi, std::span<const cplx> in,
                           const std::vector<AxisFactors>& f) {
  const int n0 = go.axis(0).n, n1 = go.axis(1).n;
  Eigen::Map<const RowMatC> inmat(in.data(), gi.axis(0).n, gi.axis(1).n);
  const MatrixXc in_t = inmat.transpose();
  const MatrixXc& own0 = f[0].own;
  const MatrixXc& part0 = f[0].partner;
  const MatrixXc& own1 = f[1].own;
  const MatrixXc& part1 = f[1].partner;
  std::vector<cplx> out(go.slice_size());
  parallel_for(static_cast<std::size_t>(n0), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    const MatrixXc b = (own1.array().rowwise() * part1.row(i).array()).matrix();
    const MatrixXc t = b * in_t;
    const Eigen::VectorXcd row =
        ((part0.array() * t.array()).rowwise() * own0.row(i).array()).rowwise().sum().matrix();
    for (int j = 0; j < n1; ++j) out[iu * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)] = row(j);
  });
  return out;
}

// General d: per output node, contract the input one axis at a time from the last.
std::vector<cplx> apply_generic(const GridSpec& go, const GridSpec& gi, std::span<const cplx> in,
                                const std::vector<AxisFactors>& f) {
  const int d = go.dim();
  const int r = 2 * d;
  std::vector<cplx> out(go.slice_size());
  parallel_for(go.slice_size(), [&](std::size_t zf) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    go.z_unflat(zf, idx);
    std::vector<cplx> cur(in.begin(), in.end());
    std::size_t len = cur.size();
    for (int a = r - 1; a >= 0; --a) {
      const auto& fa = f[static_cast<std::size_t>(a)];
      const int n = gi.axis(a).n;
      const auto i = idx[static_cast<std::size_t>(a)];
      const auto j = idx[static_cast<std::size_t>(partner_axis(a, d))];
      std::vector<cplx> vec(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) vec[static_cast<std::size_t>(k)] = fa.own(i, k) * fa.partner(j, k);
      const std::size_t outer = len / static_cast<std::size_t>(n);
      for (std::size_t o = 0; o < outer; ++o) {
        cplx acc{0.0, 0.0};
        const cplx* src = cur.data() + o * static_cast<std::size_t>(n);
        for (int k = 0; k < n; ++k) acc += vec[static_cast<std::size_t>(k)] * src[k];
        cur[o] = acc;
      }
      len = outer;
    }
    out[zf] = cur[0];
  });
  return out;
}

}  // namespace

std::vector<cplx> apply_separable(const GridSpec& g, std::span<const cplx> in,
                                  const std::vector<AxisFactors>& factors) {
  return apply_separable(g, g, in, factors);
}

std::vector<cplx> apply_separable(const GridSpec& out_grid, const GridSpec& in_grid, std::span<const cplx> in,
                                  const std::vector<AxisFactors>& factors) {
  check_shapes(out_grid, in_grid, in, factors);
  return out_grid.dim() == 1 ? apply_d1(out_grid, in_grid, in, factors) : apply_generic(out_grid, in_grid, in, factors);
}

std::vector<AxisFactors> twisted_symbol_factors(const GridSpec& g, double alpha,
                                                const std::function<cplx(double)>& symbol) {
  const int d = g.dim();
  std::vector<AxisFactors> out(static_cast<std::size_t>(2 * d));
  for (int a = 0; a < 2 * d; ++a) {
    const Axis& ax = g.axis(a);
    const Axis& px = g.axis(partner_axis(a, d));
    const double sign = a < d ? 1.0 : -1.0;
    auto& fa = out[static_cast<std::size_t>(a)];
    fa.own.resize(ax.n, ax.n);
    fa.partner.resize(px.n, ax.n);
    for (int k = 0; k < ax.n; ++k) {
      const double eta = ax.freq(k);
      for (int i = 0; i < ax.n; ++i) fa.own(i, k) = std::polar(ax.freq_spacing(), eta * ax.node(i));
      for (int j = 0; j < px.n; ++j) fa.partner(j, k) = symbol(eta + alpha * sign * px.node(j));
    }
  }
  return out;
}

}  // namespace hch
