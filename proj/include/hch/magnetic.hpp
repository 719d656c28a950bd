#pragma once

#include <span>
#include <string>
#include <vector>

#include "hch/field.hpp"
#include "hch/hgroup.hpp"

namespace hch {

enum class Flavor { Heat, Schrodinger };

const char* flavor_name(Flavor f);

/// Constant field B = 2 alpha, evolution time t.
struct MehlerKernelSpec {
  double alpha = 0.0;
  double t = 0.0;
  Flavor flavor = Flavor::Heat;
};

/// Raised when alpha t sits too close to a nonzero multiple of pi.
class CausticError : public NumericalAbort {
 public:
  CausticError(const std::string& what, std::vector<double> offending)
      : NumericalAbort(what), offending_alpha(std::move(offending)) {}
  std::vector<double> offending_alpha;
};

/// Kernel of e^{t L_alpha / 2}, L_alpha = (d_x + i alpha y)^2 + (d_y - i alpha x)^2:
///   alpha / (2 pi sinh(alpha t)) exp(-(alpha/2) coth(alpha t) |z - z'|^2 - i alpha (x y' - x' y)).
/// The prefactor is the one that reduces to the free kernel (2 pi t)^{-1} e^{-|z-z'|^2 / 2t}
/// at alpha = 0 and satisfies the semigroup law.
cplx mehler_heat_kernel(const MehlerKernelSpec& spec, std::span<const double> z, std::span<const double> zp);

/// Kernel of e^{i t L_alpha / 2}:
///   alpha / (2 pi i sin(alpha t)) exp(i (alpha/2) cot(alpha t) |z - z'|^2 - i alpha (x y' - x' y)).
/// Requires |sin(alpha t)| > 1e-6 away from alpha t = 0.
cplx mehler_schrodinger_kernel(const MehlerKernelSpec& spec, std::span<const double> z,
                               std::span<const double> zp);

/// Dispatches on spec.flavor.
cplx mehler_kernel(const MehlerKernelSpec& spec, std::span<const double> z, std::span<const double> zp);

/// |sin(alpha t)| when |alpha t| >= pi/2, otherwise 1 (no caustic before the first focus).
double caustic_distance(double alpha, double t);

/// Exact evolution for d = 1: partial transform, per-slice kernel quadrature, inverse.
/// Heat evolves by e^{tL/2}, Schrodinger by e^{itL/2}.
Field oracle_evolve(const Field& f0, double t, Flavor flavor);

/// Value of the oracle evolution at one (possibly off-grid) point.
cplx oracle_evaluate_point(const Field& f0, const HPoint& p, double t, Flavor flavor);

struct KernelRow {
  double alpha, t;
  double x, y, xp, yp;
  cplx value;
};

/// Kernel samples for every combination of the given alphas and point pairs.
std::vector<KernelRow> kernel_table(Flavor flavor, std::span<const double> alphas, double t,
                                    std::span<const std::vector<double>> z, std::span<const std::vector<double>> zp);
void write_kernel_csv(const std::vector<KernelRow>& rows, const std::string& path);

}  // namespace hch
