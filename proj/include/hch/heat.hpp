#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "hch/field.hpp"
#include "hch/hgroup.hpp"
#include "hch/rng.hpp"

namespace hch {

/// Bounded real zero-order term c on H^d with its declared sup bound.
struct PotentialSpec {
  std::function<double(const HPoint&)> fn;
  double bound = 0.0;

  static PotentialSpec zero() { return {}; }
  static PotentialSpec constant(double kappa);

  bool is_zero() const { return !fn; }
  double operator()(const HPoint& p) const { return fn ? fn(p) : 0.0; }
};

/// Samples c on every node of the grid. Throws std::invalid_argument when a
/// sample is non-finite or exceeds the declared bound.
std::vector<double> sample_potential(const PotentialSpec& c, const GridSpec& g);

/// Tensor Gauss-Hermite in zeta with cubic interpolation for off-grid reads.
struct Quadrature {
  int q = 8;
};

/// M Gaussian draws shared by every output node of a step.
struct MonteCarlo {
  std::size_t samples = 4096;
  RngStream stream;
};

/// Exact per-slice multiplier e^{-tau |eta + alpha ztilde|^2 / 2}.
struct DenseSpectral {};

using HeatStepMethod = std::variant<Quadrature, MonteCarlo, DenseSpectral>;

struct StepStats {
  InterpStats interp;
  double boundary_mass = 0.0;
};

/// One heat Chernoff step
///   [S(tau) psi](z, s) = E psi(z + sqrt(tau) zeta, s + sqrt(tau) sigma(z, zeta)) + tau c psi.
/// Input and output are physical. Aborts when the input leaks onto the boundary.
Field heat_step(const Field& f, double tau, const PotentialSpec& c, const HeatStepMethod& method,
                StepStats* stats = nullptr);

/// Sub-Laplacian sum_i X_i^2 + Y_i^2 via the per-slice symbol -|eta + alpha ztilde|^2.
/// Accepts physical or partial input and returns the same representation.
Field apply_sublaplacian(const Field& f);

/// ||(S(tau) f - f) / tau - (L/2 + c) f|| with the dense step.
double generator_residual(const Field& f, double tau, const PotentialSpec& c);

struct StepRecord {
  int step = 0;
  double l2_norm = 0.0;
  double boundary_mass = 0.0;
};

struct EvolutionLog {
  std::vector<StepRecord> steps;
  InterpStats interp;
};

/// S(t/n)^n f0. Records norm and boundary mass after every step.
Field chernoff_evolve_heat(const Field& f0, double t, int n, const PotentialSpec& c,
                           const HeatStepMethod& method, EvolutionLog* log = nullptr);

}  // namespace hch
