#include "hch/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "hch/magnetic.hpp"
#include "hch/parallel.hpp"

namespace hch {

namespace {

void require_positive_steps(int steps, const char* where) {
  if (steps < 1) throw std::invalid_argument(std::string(where) + ": steps must be >= 1");
}

void require_dim(int d, const char* where) {
  if (d < 1 || d > 3) throw DimensionError(std::string(where) + ": d must be in 1..3");
}

// Brownian endpoint driven by fine increments; optionally also the chain that uses
// pairs of fine increments (step 2h).
struct EndpointPair {
  std::vector<double> b;
  double levy = 0.0;
  double levy_mid = 0.0;
  double levy_coarse = 0.0;
};

EndpointPair run_endpoint(double t, int steps, RngStream rng, int d, bool coarse) {
  Philox gen(rng);
  const int k = 2 * d;
  const double sq = std::sqrt(t / steps);
  EndpointPair out;
  out.b.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<double> db(static_cast<std::size_t>(k));
  std::vector<double> mid(static_cast<std::size_t>(k));
  std::vector<double> coarse_b(coarse ? static_cast<std::size_t>(k) : 0, 0.0);
  std::vector<double> coarse_db(coarse ? static_cast<std::size_t>(k) : 0, 0.0);
  for (int step = 0; step < steps; ++step) {
    for (auto& v : db) v = sq * gen.normal();
    out.levy += sigma_form(out.b, db);
    for (int i = 0; i < k; ++i) mid[i] = out.b[i] + 0.5 * db[i];
    out.levy_mid += sigma_form(mid, db);
    for (int i = 0; i < k; ++i) out.b[i] += db[i];
    if (coarse) {
      for (int i = 0; i < k; ++i) coarse_db[i] += db[i];
      if (step % 2 == 1 || step == steps - 1) {
        out.levy_coarse += sigma_form(coarse_b, coarse_db);
        for (int i = 0; i < k; ++i) {
          coarse_b[i] += coarse_db[i];
          coarse_db[i] = 0.0;
        }
      }
    }
  }
  return out;
}

std::vector<double> fk_coord(const HPoint& p, std::span<const double> b, double levy) {
  const std::size_t k = p.z.size();
  std::vector<double> c(k + 1);
  for (std::size_t i = 0; i < k; ++i) c[i] = p.z[i] + b[i];
  c[k] = p.s + sigma_form(p.z, b) + levy;
  return c;
}

Estimate summarize(const std::vector<cplx>& v) {
  Estimate e;
  const double n = static_cast<double>(v.size());
  e.mean = pairwise_sum(v) / n;
  if (v.size() < 2) return e;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = std::norm(v[i] - e.mean);
  e.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

struct RealStat {
  double mean = 0.0;
  double se = 0.0;
};

RealStat summarize_real(const std::vector<double>& v) {
  RealStat r;
  const double n = static_cast<double>(v.size());
  r.mean = pairwise_sum(v) / n;
  if (v.size() < 2) return r;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - r.mean) * (v[i] - r.mean);
  r.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return r;
}

double gauge_distance(const HPoint& p, const HPoint& q) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < p.z.size(); ++i) {
    const double dz = p.z[i] - q.z[i];
    r2 += dz * dz;
  }
  const double ds = p.s - q.s + sigma_form(p.z, q.z);
  return std::pow(r2 * r2 + ds * ds, 0.25);
}

std::size_t steps_within(int n, double horizon) {
  return static_cast<std::size_t>(std::ceil(n * horizon - 1e-9));
}

}  // namespace

BMPath sample_bm_levy(double t, int steps, RngStream rng, int d) {
  require_positive_steps(steps, "sample_bm_levy");
  require_dim(d, "sample_bm_levy");
  if (!(t > 0.0)) throw std::invalid_argument("sample_bm_levy: t must be > 0");
  Philox gen(rng);
  const int k = 2 * d;
  BMPath path;
  path.d = d;
  path.h = t / steps;
  const double sq = std::sqrt(path.h);
  path.times.reserve(static_cast<std::size_t>(steps) + 1);
  path.b.reserve(static_cast<std::size_t>(steps) + 1);
  path.times.push_back(0.0);
  path.b.emplace_back(static_cast<std::size_t>(k), 0.0);
  path.levy.push_back(0.0);
  path.levy_midpoint.push_back(0.0);
  std::vector<double> db(static_cast<std::size_t>(k));
  std::vector<double> mid(static_cast<std::size_t>(k));
  for (int step = 0; step < steps; ++step) {
    for (auto& v : db) v = sq * gen.normal();
    const auto& cur = path.b.back();
    for (int i = 0; i < k; ++i) mid[i] = cur[i] + 0.5 * db[i];
    const double ito = path.levy.back() + sigma_form(cur, db);
    const double midpoint = path.levy_midpoint.back() + sigma_form(mid, db);
    std::vector<double> next(cur);
    for (int i = 0; i < k; ++i) next[i] += db[i];
    path.b.push_back(std::move(next));
    path.levy.push_back(ito);
    path.levy_midpoint.push_back(midpoint);
    path.times.push_back((step + 1) * path.h);
  }
  return path;
}

BMEndpoint sample_bm_endpoint(double t, int steps, RngStream rng, int d) {
  require_positive_steps(steps, "sample_bm_endpoint");
  require_dim(d, "sample_bm_endpoint");
  if (!(t > 0.0)) throw std::invalid_argument("sample_bm_endpoint: t must be > 0");
  EndpointPair e = run_endpoint(t, steps, rng, d, false);
  return {std::move(e.b), e.levy, e.levy_mid};
}

std::vector<double> levy_area_samples(double t, int steps, std::size_t paths, RngStream rng, int d) {
  require_positive_steps(steps, "levy_area_samples");
  require_dim(d, "levy_area_samples");
  if (!(t > 0.0)) throw std::invalid_argument("levy_area_samples: t must be > 0");
  std::vector<double> out(paths);
  parallel_for(paths, [&](std::size_t i) { out[i] = run_endpoint(t, steps, rng.split(i), d, false).levy; });
  return out;
}

Estimate fk_estimate(const Field& f0, const HPoint& p, double t, std::size_t paths, int steps, RngStream rng) {
  return fk_estimate_many(f0, std::span<const HPoint>(&p, 1), t, paths, steps, rng).front();
}

std::vector<Estimate> fk_estimate_many(const Field& f0, std::span<const HPoint> points, double t, std::size_t paths,
                                       int steps, RngStream rng) {
  require_repr(f0, Repr::Physical, "fk_estimate");
  require_positive_steps(steps, "fk_estimate");
  if (paths < 2) throw std::invalid_argument("fk_estimate: need at least 2 paths");
  if (!(t >= 0.0)) throw std::invalid_argument("fk_estimate: t must be >= 0");
  const int d = f0.grid.dim();
  for (const auto& p : points) {
    if (p.dim() != d) throw DimensionError("fk_estimate: point dimension does not match the field");
  }
  std::vector<Estimate> out;
  if (t == 0.0) {
    for (const auto& p : points) out.push_back({interpolate(f0, fk_coord(p, std::vector<double>(2 * d, 0.0), 0.0)), 0.0});
    return out;
  }
  const std::size_t np = points.size();
  std::vector<cplx> vals(paths * np);
  parallel_for(paths, [&](std::size_t i) {
    const EndpointPair e = run_endpoint(t, steps, rng.split(i), d, false);
    for (std::size_t j = 0; j < np; ++j) vals[j * paths + i] = interpolate(f0, fk_coord(points[j], e.b, e.levy));
  });
  for (std::size_t j = 0; j < np; ++j) {
    out.push_back(summarize(std::vector<cplx>(vals.begin() + j * paths, vals.begin() + (j + 1) * paths)));
  }
  return out;
}

Field subsample_field(const Field& f) {
  require_repr(f, Repr::Physical, "subsample_field");
  const GridSpec& g = f.grid;
  std::vector<Axis> axes;
  for (const auto& a : g.axes()) {
    if (a.n % 2 != 0) throw std::invalid_argument("subsample_field: axis sizes must be even");
    axes.push_back({a.n / 2, a.half_width});
  }
  GridSpec coarse(g.dim(), axes);
  Field out{coarse, Repr::Physical, std::vector<cplx>(coarse.size())};
  const int r = coarse.rank();
  std::vector<int> idx(static_cast<std::size_t>(r - 1));
  for (std::size_t zf = 0; zf < coarse.slice_size(); ++zf) {
    coarse.z_unflat(zf, idx);
    for (auto& v : idx) v *= 2;
    const std::size_t src = g.z_flat(idx);
    for (int m = 0; m < coarse.center().n; ++m) out.at(zf, m) = f.at(src, 2 * m);
  }
  return out;
}

FKBudget fk_estimate_with_budget(const Field& f0, std::span<const HPoint> points, double t, std::size_t paths,
                                 int steps, RngStream rng, std::size_t interp_paths) {
  require_repr(f0, Repr::Physical, "fk_estimate_with_budget");
  if (steps < 2) throw std::invalid_argument("fk_estimate_with_budget: steps must be >= 2");
  if (paths < 2) throw std::invalid_argument("fk_estimate_with_budget: need at least 2 paths");
  if (interp_paths < 2) throw std::invalid_argument("fk_estimate_with_budget: need at least 2 interpolation paths");
  if (!(t > 0.0)) throw std::invalid_argument("fk_estimate_with_budget: t must be > 0");
  const int d = f0.grid.dim();
  const std::size_t np = points.size();
  const std::size_t ni = std::min(paths, interp_paths);
  std::vector<cplx> fine(paths * np), half(paths * np), gap(ni * np);
  parallel_for(paths, [&](std::size_t i) {
    const EndpointPair e = run_endpoint(t, steps, rng.split(i), d, true);
    for (std::size_t j = 0; j < np; ++j) {
      const auto c = fk_coord(points[j], e.b, e.levy);
      fine[j * paths + i] = interpolate(f0, c);
      half[j * paths + i] = interpolate(f0, fk_coord(points[j], e.b, e.levy_coarse));
      if (i < ni) gap[j * ni + i] = fine[j * paths + i] - interpolate_bandlimited(f0, c);
    }
  });
  FKBudget out;
  const double n = static_cast<double>(paths);
  for (std::size_t j = 0; j < np; ++j) {
    const auto lo = fine.begin() + j * paths, hi = lo + paths;
    out.estimates.push_back(summarize(std::vector<cplx>(lo, hi)));
    std::vector<cplx> dt(paths);
    for (std::size_t i = 0; i < paths; ++i) dt[i] = fine[j * paths + i] - half[j * paths + i];
    out.time_budget.push_back(std::abs(pairwise_sum(dt) / n));
    const Estimate g = summarize(std::vector<cplx>(gap.begin() + j * ni, gap.begin() + (j + 1) * ni));
    out.interp_budget.push_back(std::abs(g.mean) + 3.0 * g.se);
  }
  return out;
}

PathSample sample_jump_path(const HPoint& start, int n, double horizon, RngStream rng) {
  if (n < 1) throw std::invalid_argument("sample_jump_path: n must be >= 1");
  if (!(horizon >= 0.0)) throw std::invalid_argument("sample_jump_path: horizon must be >= 0");
  const int d = start.dim();
  require_dim(d, "sample_jump_path");
  Philox gen(rng);
  const std::size_t k = steps_within(n, horizon);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  PathSample path;
  path.kind = PathKind::Jump;
  path.n = n;
  path.times.reserve(k + 1);
  path.points.reserve(k + 1);
  path.times.push_back(0.0);
  path.points.push_back(start);
  HPoint step(std::vector<double>(2 * static_cast<std::size_t>(d)), 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (auto& v : step.z) v = scale * gen.normal();
    path.points.push_back(group_mul(path.points.back(), step));
    path.times.push_back(static_cast<double>(j + 1) / n);
  }
  return path;
}

PathSample interpolate_geodesic(const PathSample& jump, int per_step) {
  if (jump.kind != PathKind::Jump) throw std::invalid_argument("interpolate_geodesic: input must be a jump path");
  if (per_step < 1) throw std::invalid_argument("interpolate_geodesic: per_step must be >= 1");
  PathSample out;
  out.kind = PathKind::Interpolated;
  out.n = jump.n;
  if (jump.points.empty()) return out;
  const double dt = 1.0 / jump.n;
  for (std::size_t k = 0; k + 1 < jump.points.size(); ++k) {
    const HPoint& a = jump.points[k];
    const HPoint& b = jump.points[k + 1];
    HVelocity xi{std::vector<double>(a.z.size())};
    for (std::size_t i = 0; i < a.z.size(); ++i) xi.xi[i] = (b.z[i] - a.z[i]) * jump.n;
    out.times.push_back(jump.times[k]);
    out.points.push_back(a);
    for (int q = 1; q < per_step; ++q) {
      const double r = dt * q / per_step;
      out.times.push_back(jump.times[k] + r);
      out.points.push_back(horizontal_segment(a, xi, r));
    }
  }
  out.times.push_back(jump.times.back());
  out.points.push_back(jump.points.back());
  return out;
}

const HPoint& jump_value_at(const PathSample& jump, double t) {
  if (jump.kind != PathKind::Jump || jump.points.empty()) {
    throw std::invalid_argument("jump_value_at: input must be a nonempty jump path");
  }
  if (t < 0.0) throw std::invalid_argument("jump_value_at: t must be >= 0");
  const auto k = static_cast<std::size_t>(std::floor(t * jump.n + 1e-9));
  return jump.points[std::min(k, jump.points.size() - 1)];
}

double modulus_of_continuity(const PathSample& path, double horizon, double delta) {
  return modulus_of_continuity(path, horizon, std::span<const double>(&delta, 1)).front();
}

std::vector<double> modulus_of_continuity(const PathSample& path, double horizon, std::span<const double> deltas) {
  double widest = 0.0;
  for (double dl : deltas) {
    if (!(dl > 0.0)) throw std::invalid_argument("modulus_of_continuity: delta must be > 0");
    widest = std::max(widest, dl);
  }
  std::vector<double> w(deltas.size(), 0.0);
  const double tmax = horizon + 1e-12;
  for (std::size_t i = 0; i < path.times.size() && path.times[i] <= tmax; ++i) {
    for (std::size_t j = i + 1; j < path.times.size() && path.times[j] <= tmax; ++j) {
      const double gap = path.times[j] - path.times[i];
      if (gap >= widest) break;
      const double dist = gauge_distance(path.points[i], path.points[j]);
      for (std::size_t q = 0; q < deltas.size(); ++q) {
        if (gap < deltas[q]) w[q] = std::max(w[q], dist);
      }
    }
  }
  return w;
}

std::vector<TightnessRow> tightness_diagnostic(std::span<const int> n_list, std::span<const double> delta_list,
                                               double eps, double horizon, std::size_t paths, RngStream rng, int d,
                                               int per_step) {
  if (paths < 2) throw std::invalid_argument("tightness_diagnostic: need at least 2 paths");
  require_dim(d, "tightness_diagnostic");
  std::vector<TightnessRow> rows;
  const HPoint origin = HPoint::identity(d);
  for (int n : n_list) {
    const RngStream base = rng.split(static_cast<std::uint64_t>(n));
    std::vector<std::vector<double>> hits(delta_list.size(), std::vector<double>(paths));
    parallel_for(paths, [&](std::size_t i) {
      const PathSample z = interpolate_geodesic(sample_jump_path(origin, n, horizon, base.split(i)), per_step);
      const auto w = modulus_of_continuity(z, horizon, delta_list);
      for (std::size_t q = 0; q < w.size(); ++q) hits[q][i] = w[q] >= eps ? 1.0 : 0.0;
    });
    for (std::size_t q = 0; q < delta_list.size(); ++q) {
      const double p = pairwise_sum(hits[q]) / static_cast<double>(paths);
      rows.push_back({n, delta_list[q], eps, p, std::sqrt(p * (1.0 - p) / static_cast<double>(paths))});
    }
  }
  return rows;
}

double GaussianBump::operator()(const HPoint& p) const {
  double r2 = (p.s - center.s) * (p.s - center.s);
  for (std::size_t i = 0; i < p.z.size(); ++i) r2 += (p.z[i] - center.z.at(i)) * (p.z[i] - center.z.at(i));
  return std::exp(-r2 / (2.0 * width * width));
}

Field bump_field(const GaussianBump& f, const GridSpec& g) {
  if (f.center.dim() != g.dim()) throw DimensionError("bump_field: center dimension does not match the grid");
  Field out{g, Repr::Physical, std::vector<cplx>(g.size())};
  HPoint p(std::vector<double>(2 * static_cast<std::size_t>(g.dim())), 0.0);
  for (std::size_t zf = 0; zf < g.slice_size(); ++zf) {
    g.z_coords(zf, p.z);
    for (int m = 0; m < g.center().n; ++m) {
      p.s = g.center().node(m);
      out.at(zf, m) = f(p);
    }
  }
  return out;
}

std::vector<double> heat_reference_values(std::span<const GaussianBump> fns, const HPoint& start, double t,
                                          const GridSpec& g) {
  std::vector<double> out;
  for (const auto& f : fns) out.push_back(oracle_evaluate_point(bump_field(f, g), start, t, Flavor::Heat).real());
  return out;
}

std::vector<WeakRow> weak_convergence_table(std::span<const int> n_list, double t, std::span<const GaussianBump> fns,
                                            std::span<const double> reference, const HPoint& start,
                                            std::size_t paths, RngStream rng) {
  if (n_list.empty()) throw std::invalid_argument("weak_convergence_table: empty n list");
  if (reference.size() != fns.size()) throw std::invalid_argument("weak_convergence_table: one reference per bump");
  if (paths < 2) throw std::invalid_argument("weak_convergence_table: need at least 2 paths");
  if (!(t >= 0.0)) throw std::invalid_argument("weak_convergence_table: t must be >= 0");
  const int finest = *std::max_element(n_list.begin(), n_list.end());
  for (int n : n_list) {
    if (n < 1 || finest % n != 0) {
      throw std::invalid_argument("weak_convergence_table: every n must divide the largest n");
    }
  }
  const int d = start.dim();
  require_dim(d, "weak_convergence_table");
  const std::size_t k = 2 * static_cast<std::size_t>(d);
  const std::size_t nn = n_list.size(), nf = fns.size();
  // Fine increments needed: enough for floor(n t) + 1 coarse steps of every chain.
  std::size_t fine_steps = 0;
  for (int n : n_list) {
    fine_steps = std::max(fine_steps, (static_cast<std::size_t>(std::floor(n * t + 1e-9)) + 1) *
                                          static_cast<std::size_t>(finest / n));
  }
  // vals[(ni * nf + f) * paths + i], separately for Z and X.
  std::vector<double> vz(nn * nf * paths), vx(nn * nf * paths);
  const double fine_scale = 1.0 / std::sqrt(static_cast<double>(finest));
  parallel_for(paths, [&](std::size_t i) {
    Philox gen(rng.split(i));
    std::vector<double> inc(fine_steps * k);
    for (auto& v : inc) v = fine_scale * gen.normal();
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const int n = n_list[ni];
      const std::size_t group = static_cast<std::size_t>(finest / n);
      const auto kk = static_cast<std::size_t>(std::floor(n * t + 1e-9));
      HPoint y = start;
      HPoint step(std::vector<double>(k), 0.0);
      auto load = [&](std::size_t j) {
        std::fill(step.z.begin(), step.z.end(), 0.0);
        for (std::size_t g = 0; g < group; ++g) {
          for (std::size_t c = 0; c < k; ++c) step.z[c] += inc[(j * group + g) * k + c];
        }
      };
      for (std::size_t j = 0; j < kk; ++j) {
        load(j);
        y = group_mul(y, step);
      }
      const HPoint x_end = y;
      const double r = t - static_cast<double>(kk) / n;
      HPoint z_end = y;
      if (r > 1e-12) {
        load(kk);
        HVelocity xi{std::vector<double>(k)};
        for (std::size_t c = 0; c < k; ++c) xi.xi[c] = step.z[c] * n;
        z_end = horizontal_segment(y, xi, r);
      }
      for (std::size_t f = 0; f < nf; ++f) {
        vz[(ni * nf + f) * paths + i] = fns[f](z_end);
        vx[(ni * nf + f) * paths + i] = fns[f](x_end);
      }
    }
  });
  std::vector<WeakRow> rows;
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const auto at = [&](std::vector<double>& v, std::size_t idx) {
        return std::vector<double>(v.begin() + (idx * nf + f) * paths, v.begin() + (idx * nf + f + 1) * paths);
      };
      const RealStat sz = summarize_real(at(vz, ni));
      const RealStat sx = summarize_real(at(vx, ni));
      WeakRow row;
      row.n = n_list[ni];
      row.fn = static_cast<int>(f);
      row.mean_z = sz.mean;
      row.se_z = sz.se;
      row.mean_x = sx.mean;
      row.se_x = sx.se;
      row.reference = reference[f];
      row.disc_z = std::abs(sz.mean - reference[f]);
      row.disc_x = std::abs(sx.mean - reference[f]);
      if (ni > 0) {
        std::vector<double> diff = at(vz, ni - 1);
        const std::vector<double> cur = at(vz, ni);
        for (std::size_t i = 0; i < paths; ++i) diff[i] -= cur[i];
        row.se_step = summarize_real(diff).se;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<WeakRow> weak_convergence_stat(int n, double t, std::span<const GaussianBump> fns,
                                           std::span<const double> reference, const HPoint& start,
                                           std::size_t paths, RngStream rng) {
  return weak_convergence_table(std::span<const int>(&n, 1), t, fns, reference, start, paths, rng);
}

void write_path_csv(const PathSample& path, const std::string& file) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw std::runtime_error("write_path_csv: cannot open " + file);
  os.precision(17);
  const int d = path.points.empty() ? 1 : path.points.front().dim();
  os << "time";
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  for (int i = 1; i <= d; ++i) os << ",y" << i;
  os << ",s\n";
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    os << path.times[k];
    for (double v : path.points[k].z) os << ',' << v;
    os << ',' << path.points[k].s << '\n';
  }
}

void write_tightness_csv(const std::vector<TightnessRow>& rows, const std::string& file) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw std::runtime_error("write_tightness_csv: cannot open " + file);
  os.precision(17);
  os << "n,delta,eps,p_hat,se\n";
  for (const auto& r : rows) os << r.n << ',' << r.delta << ',' << r.eps << ',' << r.p_hat << ',' << r.se << '\n';
}

void write_weak_csv(const std::vector<WeakRow>& rows, const std::string& file) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw std::runtime_error("write_weak_csv: cannot open " + file);
  os.precision(17);
  os << "n,fn,mean_z,se_z,mean_x,se_x,reference,disc_z,disc_x,se_step\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.fn << ',' << r.mean_z << ',' << r.se_z << ',' << r.mean_x << ',' << r.se_x << ','
       << r.reference << ',' << r.disc_z << ',' << r.disc_x << ',' << r.se_step << '\n';
  }
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    worst = std::max(worst, std::abs(i / na - j / nb));
  }
  return worst;
}

}  // namespace hch
