#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hch/field.hpp"
#include "hch/hgroup.hpp"
#include "hch/rng.hpp"

namespace hch {

/// Planar (or 2d-dimensional) Brownian path on a uniform time grid with the
/// Lévy-area accumulators sum_j int B^{y,j} dB^{x,j} - B^{x,j} dB^{y,j}.
struct BMPath {
  int d = 1;
  double h = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> b;  // b[k] in R^{2d}
  std::vector<double> levy;            // left-point (Ito) sums
  std::vector<double> levy_midpoint;   // midpoint sums
};

/// Euler-Maruyama Brownian path with steps of size t / steps.
BMPath sample_bm_levy(double t, int steps, RngStream rng, int d = 1);

/// Endpoint of a Brownian path with its Lévy area, without storing the path.
struct BMEndpoint {
  std::vector<double> b;
  double levy = 0.0;
  double levy_midpoint = 0.0;
};

/// Same draws as sample_bm_levy with the same arguments, endpoint only.
BMEndpoint sample_bm_endpoint(double t, int steps, RngStream rng, int d = 1);

struct Estimate {
  cplx mean{0.0, 0.0};
  double se = 0.0;
};

/// Feynman-Kac estimate u(t, z, s) = E psi0(z + B_t, s + sigma(z, B_t) + A_t), with
/// psi0 read by cubic interpolation. Path i uses rng.split(i).
Estimate fk_estimate(const Field& f0, const HPoint& p, double t, std::size_t paths, int steps, RngStream rng);

/// Same estimator at several points with common random numbers.
std::vector<Estimate> fk_estimate_many(const Field& f0, std::span<const HPoint> points, double t, std::size_t paths,
                                       int steps, RngStream rng);

/// Lévy-area samples A(t) of `paths` independent paths; path i uses rng.split(i).
std::vector<double> levy_area_samples(double t, int steps, std::size_t paths, RngStream rng, int d = 1);

/// Feynman-Kac estimates with a systematic-error budget per point:
///   time_budget   |estimate(h) - estimate(2h)| on common random numbers,
///   interp_budget |mean| + 3 SE of (Catmull-Rom read - band-limited read) at the
///                 endpoints of the first interp_paths paths.
struct FKBudget {
  std::vector<Estimate> estimates;
  std::vector<double> time_budget;
  std::vector<double> interp_budget;
};

FKBudget fk_estimate_with_budget(const Field& f0, std::span<const HPoint> points, double t, std::size_t paths,
                                 int steps, RngStream rng, std::size_t interp_paths = 2000);

/// Every other node on every axis.
Field subsample_field(const Field& f);

enum class PathKind { Jump, Interpolated };

struct PathSample {
  PathKind kind = PathKind::Jump;
  int n = 1;                   // chain steps per unit time
  std::vector<double> times;
  std::vector<HPoint> points;
};

/// Chain Y_{k+1} = Y_k (z_k + zeta / sqrt(n), s_k + sigma(z_k, zeta) / sqrt(n)) on [0, T];
/// X_n(t) = Y_{floor(n t)}. Samples stored at the jump times k / n.
PathSample sample_jump_path(const HPoint& start, int n, double horizon, RngStream rng);

/// Continuous path through the jump points along horizontal segments with velocity
/// n (z_{k+1} - z_k), sampled `per_step` times per interval (endpoints included).
PathSample interpolate_geodesic(const PathSample& jump, int per_step = 8);

/// Jump path value at time t (right-continuous step function).
const HPoint& jump_value_at(const PathSample& jump, double t);

/// max Koranyi distance over sampled pairs in [0, T] with |t_i - t_j| < delta.
double modulus_of_continuity(const PathSample& path, double horizon, double delta);
/// Same for several deltas in one pass.
std::vector<double> modulus_of_continuity(const PathSample& path, double horizon, std::span<const double> deltas);

struct TightnessRow {
  int n = 0;
  double delta = 0.0;
  double eps = 0.0;
  double p_hat = 0.0;
  double se = 0.0;
};

/// P(w_T(Z_n, delta) >= eps) estimated from `paths` interpolated walks started at the
/// identity; paths are shared across deltas.
std::vector<TightnessRow> tightness_diagnostic(std::span<const int> n_list, std::span<const double> delta_list,
                                               double eps, double horizon, std::size_t paths, RngStream rng,
                                               int d = 1, int per_step = 8);

/// Isotropic Gaussian bump exp(-(|z - c_z|^2 + (s - c_s)^2) / (2 w^2)).
struct GaussianBump {
  HPoint center;
  double width = 1.0;

  double operator()(const HPoint& p) const;
};

/// The bump sampled on a grid, as a physical field.
Field bump_field(const GaussianBump& f, const GridSpec& g);

/// V(t) f at `start` for every bump, V(t) = e^{t L / 2}, via the exact kernel (d = 1).
std::vector<double> heat_reference_values(std::span<const GaussianBump> fns, const HPoint& start, double t,
                                          const GridSpec& g);

struct WeakRow {
  int n = 0;
  int fn = 0;
  double mean_z = 0.0, se_z = 0.0;   // E f(Z_n(t))
  double mean_x = 0.0, se_x = 0.0;   // E f(X_n(t))
  double reference = 0.0;
  double disc_z = 0.0, disc_x = 0.0;
  // SE of the paired difference disc_z(previous n) - disc_z(this n); 0 in the first row of each fn.
  double se_step = 0.0;
};

/// |E f(Z_n(t)) - V(t) f(start)| and the same for X_n, for every n and bump.
/// The walks are coupled across n: the increments of the finest chain are summed in
/// groups to drive the coarser ones, so consecutive rows can be compared through
/// paired differences.
std::vector<WeakRow> weak_convergence_table(std::span<const int> n_list, double t, std::span<const GaussianBump> fns,
                                            std::span<const double> reference, const HPoint& start,
                                            std::size_t paths, RngStream rng);

/// Single-n form of the table above.
std::vector<WeakRow> weak_convergence_stat(int n, double t, std::span<const GaussianBump> fns,
                                           std::span<const double> reference, const HPoint& start,
                                           std::size_t paths, RngStream rng);

/// CSV writers: path dumps (time, x.., y.., s) and diagnostic tables.
void write_path_csv(const PathSample& path, const std::string& file);
void write_tightness_csv(const std::vector<TightnessRow>& rows, const std::string& file);
void write_weak_csv(const std::vector<WeakRow>& rows, const std::string& file);

/// Kolmogorov-Smirnov distance between two samples.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace hch
