#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "hch/field.hpp"

namespace hch {

using MatrixXc = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

/// Factor tables for one horizontal axis a of a separable dense operator.
/// own(i, k): i indexes output nodes along axis a.
/// partner(j, k): j indexes output nodes along the conjugate axis (x^i <-> y^i).
/// k indexes the summed input index along axis a.
struct AxisFactors {
  MatrixXc own;
  MatrixXc partner;
};

/// Conjugate axis of a horizontal axis: x^i pairs with y^i.
inline int partner_axis(int a, int d) { return a < d ? a + d : a - d; }

/// out(z) = sum_k prod_a own_a(z_a, k_a) * partner_a(z_{p(a)}, k_a) * in(k)
/// over one horizontal slice. Covers spectral multipliers with z-dependent
/// symbols and integral kernels with magnetic phases alike.
std::vector<cplx> apply_separable(const GridSpec& g, std::span<const cplx> in,
                                  const std::vector<AxisFactors>& factors);

/// Same with input nodes from `in_grid` and output nodes from `out_grid`; own is
/// (out n_a x in n_a), partner is (out n_{p(a)} x in n_a).
std::vector<cplx> apply_separable(const GridSpec& out_grid, const GridSpec& in_grid, std::span<const cplx> in,
                                  const std::vector<AxisFactors>& factors);

/// Factors of the left-quantized operator
///   psi(z) = sum_eta e^{i eta.z} prod_a symbol(eta_a + alpha w_a(z)) psihat(eta) dEta,
/// with w = ztilde(z), i.e. w_a = y^i on x-axes and -x^i on y-axes.
/// Input is a spectral slice, output a partial slice.
std::vector<AxisFactors> twisted_symbol_factors(const GridSpec& g, double alpha,
                                                const std::function<cplx(double)>& symbol);

}  // namespace hch
