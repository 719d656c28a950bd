#pragma once

#include <array>
#include <span>
#include <vector>

#include "hch/field.hpp"
#include "hch/heat.hpp"

namespace hch {

enum class ShearMethod { Interpolated, Dense };

/// Bounded real potential for the Schrodinger step; `smooth` marks C_b^infinity data.
struct VPotentialSpec {
  PotentialSpec v;
  bool smooth = true;

  static VPotentialSpec zero() { return {}; }
  static VPotentialSpec constant(double kappa) { return {PotentialSpec::constant(kappa), true}; }
  bool is_zero() const { return v.is_zero(); }
};

enum class StepOrder {
  SM,  // potential phase first, then the free step
  MS,  // free step first, then the potential phase
};

/// Spectral multiplier e^{-i tau |eta|^2 / 2} on every alpha slice. Partial in, partial out.
Field u1_apply(const Field& f, double tau);

/// Per slice, psi(z) -> psi(z - tau alpha ztilde(z)) by cubic resampling.
/// Requires tau * alpha_max * z_max <= L_z / 2. The dense method has no
/// standalone form and is rejected here.
Field shear_apply(const Field& f, double tau, ShearMethod method, InterpStats* stats = nullptr);

/// Pointwise phase e^{-i tau alpha^2 |z|^2 / 2}. Partial in, partial out.
Field u2_apply(const Field& f, double tau);

struct SchrodingerStepStats {
  InterpStats interp;
  bool clip_warning = false;
};

/// U2 V U1 on every alpha slice. Accepts physical or partial input and returns
/// the same representation.
Field schrodinger_step(const Field& f, double tau, ShearMethod method, SchrodingerStepStats* stats = nullptr);

/// Per slice: sum_eta e^{i eta.z} e^{-(i/2) tau |eta + alpha ztilde|^2} psihat(eta, alpha).
/// Partial in, partial out.
Field schrodinger_step_dense(const Field& f, double tau);

/// Pointwise e^{-i tau v}. Physical in, physical out.
Field potential_phase(const Field& f, double tau, const VPotentialSpec& v);

struct SchrodingerLog {
  std::vector<StepRecord> steps;
  InterpStats interp;
  int clip_warnings = 0;
};

/// n steps of S(t/n) M(t/n) (order SM) or M(t/n) S(t/n) (order MS). Physical in and out.
Field chernoff_evolve_schrodinger(const Field& f0, double t, int n, const VPotentialSpec& v, ShearMethod method,
                                  StepOrder order, SchrodingerLog* log = nullptr);

/// ||(S(tau) f - f) / tau - (i/2) L f|| with the dense step. Physical input.
double schrodinger_generator_residual(const Field& f, double tau);

enum class Regulator { Gaussian, Bump };

struct OscillatoryOptions {
  std::vector<double> eps = {0.01, 0.005, 0.0025};
  double tolerance = 1e-3;
  int gl_points = 16;
  int max_refinements = 4;
};

struct OscillatoryResult {
  Field value;                          // extrapolated, Gaussian regulator
  Field bump_value;                     // extrapolated, bump regulator
  double regulator_gap = 0.0;           // ||gauss - bump|| / ||gauss||
  double extrapolation_change = 0.0;    // ||extrapolated - smallest-eps value|| / ||extrapolated||
  double quadrature_change = 0.0;       // last panel-refinement change
  bool converged = false;
};

/// (2 pi i)^{-d} int phi(eps zeta) e^{i |zeta|^2 / 2} psi(z + sqrt(tau) zeta, s + sqrt(tau) sigma(z, zeta)) dzeta
/// at every node, psi being the band-limited interpolant of the grid data inside the
/// box and zero outside. Each eps uses adaptive composite Gauss-Legendre quadrature;
/// the eps -> 0 limit is taken by Richardson extrapolation in eps^2 for both a
/// Gaussian and a compact bump regulator. Physical in, physical out. Throws
/// NumericalAbort when the limit does not settle within the tolerance.
OscillatoryResult oscillatory_integral_direct(const Field& f, double tau, const OscillatoryOptions& opt = {});

/// Which path nodes carry the potential in the Riemann sum of the action.
enum class PotentialSampling {
  PathEnd,    // v(gamma(j t/n)) for j = 1..n
  PathStart,  // v(gamma(j t/n)) for j = 0..n-1
};

struct FeynmanResult {
  Field value;
  Field composition;  // matching Chernoff composition
  double discrepancy = 0.0;
};

/// n-fold iterated oscillatory integral over piecewise-horizontal paths (n = 1 or 2),
/// evaluated by nesting oscillatory_integral_direct with the potential phase applied at
/// the path nodes. Compares against the Chernoff composition with the matching order
/// (PathEnd -> SM, PathStart -> MS) and throws NumericalAbort if they differ by more than tol.
FeynmanResult feynman_piecewise_geodesic(const Field& f0, double t, int n, const VPotentialSpec& v,
                                         PotentialSampling sampling = PotentialSampling::PathEnd,
                                         const OscillatoryOptions& opt = {}, double tol = 1e-3);

/// Area integral int_0^T e(r) ^ e'(r) dr of a planar path given by equally spaced samples,
/// exact for piecewise-linear interpolation of the samples.
double swept_area(std::span<const std::array<double, 2>> samples);

/// Sum over basis paths of their swept areas: the renormalization counterterm of the
/// finite-dimensional approximations for constant magnetic field (up to the field factor).
double renormalization_term(std::span<const std::vector<std::array<double, 2>>> basis);

/// z.sigma gamma(T) - int gamma ^ gamma' for the piecewise-linear path from z0 with
/// velocities xi_j held for dt each; equals sum_j sigma_form(z_j, xi_{j+1}) dt.
double path_area_term(std::span<const double> z0, std::span<const std::array<double, 2>> xi, double dt);

}  // namespace hch
