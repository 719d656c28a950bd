#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "run.hpp"

namespace hch::cli {

namespace {

std::string join_key(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Typed access to one JSON object that rejects unknown keys on finish().
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "'" + display() + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(join_key(path_, key), "key '" + join_key(path_, key) + "' has the wrong type");
    }
  }

  const json& sub(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string key(const std::string& k) const { return join_key(path_, k); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(join_key(path_, item.key()), "unknown key '" + join_key(path_, item.key()) + "'");
      }
    }
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, key + ": " + what);
}

std::vector<int> positive_int_list(const std::vector<int>& v, const std::string& key) {
  require(!v.empty(), key, "must be a non-empty list");
  for (int n : v) require(n >= 1, key, "entries must be >= 1");
  for (std::size_t i = 1; i < v.size(); ++i) require(v[i] > v[i - 1], key, "entries must be strictly increasing");
  return v;
}

GridSpec parse_grid(const json& j, const std::string& path, GridSpec fallback) {
  ObjectReader r(j, path);
  const int d = r.get<int>("d", fallback.dim());
  const int nz = r.get<int>("nz", fallback.axis(0).n);
  const double lz = r.get<double>("lz", fallback.axis(0).half_width);
  const int ns = r.get<int>("ns", fallback.center().n);
  const double ls = r.get<double>("ls", fallback.center().half_width);
  r.finish();
  try {
    return GridSpec::uniform(d, nz, lz, ns, ls);
  } catch (const std::exception& e) {
    throw ConfigError(path, path + ": " + e.what());
  }
}

HPoint point_from(const std::vector<double>& c, int d, const std::string& key) {
  require(c.size() == static_cast<std::size_t>(2 * d + 1), key, "needs 2d+1 coordinates");
  for (double v : c) require(std::isfinite(v), key, "coordinates must be finite");
  return HPoint(std::vector<double>(c.begin(), c.end() - 1), c.back());
}

GaussianPacketSpec parse_initial(const json& j, const std::string& path, int d) {
  ObjectReader r(j, path);
  const auto r1 = static_cast<std::size_t>(2 * d + 1);
  GaussianPacketSpec p;
  p.center = point_from(r.get<std::vector<double>>("center", std::vector<double>(r1, 0.0)), d, r.key("center"));
  std::vector<double> widths(r1, 1.0);
  widths.back() = 2.0;
  p.widths = r.get<std::vector<double>>("widths", widths);
  p.momentum = r.get<std::vector<double>>("momentum", {});
  r.finish();
  require(p.widths.size() == r1, r.key("widths"), "needs 2d+1 entries");
  require(p.momentum.empty() || p.momentum.size() == r1, r.key("momentum"), "needs 2d+1 entries");
  return p;
}

PotentialConfig parse_potential(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PotentialConfig p;
  p.type = r.get<std::string>("type", p.type);
  p.amplitude = r.get<double>("amplitude", p.amplitude);
  p.width = r.get<double>("width", p.width);
  r.finish();
  require(p.type == "zero" || p.type == "constant" || p.type == "gaussian", r.key("type"),
          "must be zero, constant or gaussian");
  require(std::isfinite(p.amplitude), r.key("amplitude"), "must be finite");
  require(p.width > 0.0 && std::isfinite(p.width), r.key("width"), "must be > 0");
  return p;
}

PotentialConfig potential_or_default(ObjectReader& r) {
  return r.has("potential") ? parse_potential(r.sub("potential"), r.key("potential")) : PotentialConfig{};
}

void require_time(double t, const std::string& key) {
  require(std::isfinite(t) && t > 0.0, key, "must be a finite positive number");
}

void require_oracle_grid(const GridSpec& g, const std::string& what) {
  if (g.dim() != 1) throw ConfigError("grid.d", "grid.d: " + what + " needs the exact oracle, which is d = 1 only");
}

void require_no_caustic(const GridSpec& g, double t, const std::string& key) {
  for (int m = 0; m < g.center().n; ++m) {
    const double a = g.center().freq(m);
    if (caustic_distance(a, t) <= 1e-3) {
      std::ostringstream os;
      os << key << ": alpha node " << a << " sits on a caustic at t = " << t;
      throw ConfigError(key, os.str());
    }
  }
}

double max_abs_alpha(const GridSpec& g) { return std::abs(g.center().freq(0)); }

HeatPlan parse_heat(ObjectReader& r, const ExperimentConfig& c) {
  HeatPlan p;
  p.t = r.get<double>("t", p.t);
  p.n_list = positive_int_list(r.get<std::vector<int>>("n_list", p.n_list), r.key("n_list"));
  p.method = r.get<std::string>("method", p.method);
  p.q = r.get<int>("q", p.q);
  p.samples = r.get<std::size_t>("samples", p.samples);
  p.potential = potential_or_default(r);
  p.write_fields = r.get<bool>("write_fields", p.write_fields);
  require_time(p.t, r.key("t"));
  require(p.method == "dense" || p.method == "quadrature" || p.method == "monte_carlo", r.key("method"),
          "must be dense, quadrature or monte_carlo");
  require(p.q >= 1 && p.q <= 64, r.key("q"), "must be in 1..64");
  require(p.samples >= 1000, r.key("samples"), "Monte Carlo needs at least 1000 samples");
  require_oracle_grid(c.grid, "kind heat");
  return p;
}

SchrodingerPlan parse_schrodinger(ObjectReader& r, const ExperimentConfig& c) {
  SchrodingerPlan p;
  p.t = r.get<double>("t", p.t);
  p.n_list = positive_int_list(r.get<std::vector<int>>("n_list", p.n_list), r.key("n_list"));
  p.shear = r.get<std::string>("shear", p.shear);
  p.orders = r.get<std::vector<std::string>>("orders", p.orders);
  p.potential = potential_or_default(r);
  p.write_fields = r.get<bool>("write_fields", p.write_fields);
  require_time(p.t, r.key("t"));
  require(p.shear == "dense" || p.shear == "interpolated", r.key("shear"), "must be dense or interpolated");
  require(!p.orders.empty(), r.key("orders"), "must be non-empty");
  for (const auto& o : p.orders) require(o == "SM" || o == "MS", r.key("orders"), "entries must be SM or MS");
  require_oracle_grid(c.grid, "kind schrodinger");
  require_no_caustic(c.grid, p.t, r.key("t"));
  if (p.shear == "interpolated") {
    const double tau = p.t / p.n_list.front();
    double zmax = 0.0, zmin = 1e300;
    for (int a = 0; a < 2 * c.grid.dim(); ++a) {
      zmax = std::max(zmax, c.grid.axis(a).half_width);
      zmin = std::min(zmin, c.grid.axis(a).half_width);
    }
    const double reach = tau * max_abs_alpha(c.grid) * zmax;
    std::ostringstream os;
    os << "interpolated shear reach t/n alpha_max z_max = " << reach << " exceeds " << 0.5 * zmin
       << "; raise the smallest n";
    require(reach <= 0.5 * zmin, r.key("n_list"), os.str());
  }
  return p;
}

FkPlan parse_fk(ObjectReader& r, const ExperimentConfig& c) {
  FkPlan p;
  p.t = r.get<double>("t", p.t);
  p.paths = r.get<std::size_t>("paths", p.paths);
  p.h = r.get<double>("h", p.h);
  p.probes = r.get<std::vector<std::vector<double>>>("probes", p.probes);
  p.budget = r.get<bool>("budget", p.budget);
  p.oracle = r.get<bool>("oracle", p.oracle);
  require_time(p.t, r.key("t"));
  require(p.paths >= 2, r.key("paths"), "needs at least 2 paths");
  require(std::isfinite(p.h) && p.h > 0.0 && p.h <= p.t, r.key("h"), "must be in (0, t]");
  const double steps = std::round(p.t / p.h);
  require(std::abs(steps * p.h - p.t) <= 1e-9 * p.t, r.key("h"), "t must be an integer multiple of h");
  require(!p.budget || steps >= 2, r.key("budget"), "the time budget needs t / h >= 2");
  require(!p.probes.empty(), r.key("probes"), "must be non-empty");
  for (std::size_t i = 0; i < p.probes.size(); ++i) {
    const std::string key = r.key("probes") + "[" + std::to_string(i) + "]";
    const HPoint q = point_from(p.probes[i], c.grid.dim(), key);
    for (int a = 0; a < c.grid.rank(); ++a) {
      const double v = a < 2 * c.grid.dim() ? q.z[static_cast<std::size_t>(a)] : q.s;
      require(std::abs(v) < c.grid.axis(a).half_width, key, "probe lies outside the grid");
    }
  }
  if (p.oracle) require_oracle_grid(c.grid, "plan.oracle");
  return p;
}

WalkPlan parse_walk(ObjectReader& r) {
  WalkPlan p;
  p.t = r.get<double>("t", p.t);
  p.n_list = positive_int_list(r.get<std::vector<int>>("n_list", p.n_list), r.key("n_list"));
  p.paths = r.get<std::size_t>("paths", p.paths);
  p.start = r.get<std::vector<double>>("start", p.start);
  if (r.has("reference_grid")) p.reference_grid = parse_grid(r.sub("reference_grid"), r.key("reference_grid"), p.reference_grid);
  p.deltas = r.get<std::vector<double>>("deltas", p.deltas);
  p.eps = r.get<double>("eps", p.eps);
  p.tightness_paths = r.get<std::size_t>("tightness_paths", p.tightness_paths);
  p.per_step = r.get<int>("per_step", p.per_step);
  p.sample_paths = r.get<bool>("sample_paths", p.sample_paths);
  require_time(p.t, r.key("t"));
  require(p.paths >= 2, r.key("paths"), "needs at least 2 paths");
  require(p.tightness_paths >= 2, r.key("tightness_paths"), "needs at least 2 paths");
  const int finest = p.n_list.back();
  for (int n : p.n_list) require(finest % n == 0, r.key("n_list"), "every entry must divide the largest");
  require(!p.deltas.empty(), r.key("deltas"), "must be non-empty");
  for (double dl : p.deltas) require(dl > 0.0 && dl <= p.t, r.key("deltas"), "entries must be in (0, t]");
  require(p.eps > 0.0, r.key("eps"), "must be > 0");
  require(p.per_step >= 1, r.key("per_step"), "must be >= 1");
  point_from(p.start, 1, r.key("start"));
  require(p.reference_grid.dim() == 1, r.key("reference_grid"), "the exact reference is d = 1 only");
  if (r.has("bumps")) {
    const json& b = r.sub("bumps");
    require(b.is_array() && !b.empty(), r.key("bumps"), "must be a non-empty list");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string key = r.key("bumps") + "[" + std::to_string(i) + "]";
      ObjectReader br(b[i], key);
      const auto center = br.get<std::vector<double>>("center", {0, 0, 0});
      const double w = br.get<double>("width", 1.0);
      br.finish();
      require(w > 0.0, br.key("width"), "must be > 0");
      p.bumps.push_back({point_from(center, 1, br.key("center")), w});
    }
  } else {
    const std::vector<std::array<double, 2>> centers{{0, 0}, {0.5, 0}, {0, -0.5}, {0.7, 0.7}, {-1, 0.3}};
    for (double w : {1.0, 2.0}) {
      for (const auto& z : centers) p.bumps.push_back({HPoint({z[0], z[1]}, 0.0), w});
    }
  }
  return p;
}

KernelPlan parse_kernel(ObjectReader& r) {
  KernelPlan p;
  const auto flavor = r.get<std::string>("flavor", "heat");
  require(flavor == "heat" || flavor == "schrodinger", r.key("flavor"), "must be heat or schrodinger");
  p.flavor = flavor == "heat" ? Flavor::Heat : Flavor::Schrodinger;
  p.t = r.get<double>("t", p.t);
  p.alphas = r.get<std::vector<double>>("alphas", p.alphas);
  p.pairs = r.get<std::vector<std::vector<double>>>("pairs", p.pairs);
  require_time(p.t, r.key("t"));
  require(!p.alphas.empty() && !p.pairs.empty(), r.key("pairs"), "alphas and pairs must be non-empty");
  for (const auto& q : p.pairs) require(q.size() == 4, r.key("pairs"), "each pair is [x, y, xp, yp]");
  if (p.flavor == Flavor::Schrodinger) {
    for (double a : p.alphas) {
      const double x = a * p.t;
      require(!(std::abs(x) >= 0.5 * std::numbers::pi && std::abs(std::sin(x)) <= 1e-6), r.key("alphas"),
              "alpha t is on a caustic");
    }
  }
  return p;
}

VerifyPlan parse_verify(ObjectReader& r) {
  VerifyPlan p;
  p.only = r.get<std::vector<std::string>>("only", p.only);
  const auto& names = invariant_names();
  for (const auto& n : p.only) {
    require(std::find(names.begin(), names.end(), n) != names.end(), r.key("only"), "unknown check '" + n + "'");
  }
  return p;
}

void set_path(json& root, const std::vector<std::string>& parts, json value) {
  json* cur = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cur->is_object()) *cur = json::object();
    cur = &(*cur)[parts[i]];
  }
  if (!cur->is_object()) *cur = json::object();
  (*cur)[parts.back()] = std::move(value);
}

}  // namespace

PotentialSpec make_potential(const PotentialConfig& p) {
  if (p.type == "zero") return PotentialSpec::zero();
  if (p.type == "constant") return PotentialSpec::constant(p.amplitude);
  const double a = p.amplitude, w = p.width;
  return {[a, w](const HPoint& q) {
            double r2 = 0.0;
            for (double v : q.z) r2 += v * v;
            return a * std::exp(-r2 / (2 * w * w));
          },
          std::abs(a)};
}

const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k{"heat", "schrodinger", "fk", "walk", "verify", "dump-kernel"};
  return k;
}

void apply_override(json& root, const std::string& dotted, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError(dotted, "malformed flag --" + dotted);
    parts.push_back(p);
  }
  if (parts.empty()) throw ConfigError(dotted, "malformed flag --" + dotted);
  json parsed = json::parse(value, nullptr, false);
  set_path(root, parts, parsed.is_discarded() ? json(value) : parsed);
}

ExperimentConfig parse_config(const json& root) {
  ObjectReader r(root, "");
  ExperimentConfig c;
  c.kind = r.get<std::string>("kind", "");
  require(std::find(kinds().begin(), kinds().end(), c.kind) != kinds().end(), "kind",
          "must be one of heat, schrodinger, fk, walk, verify, dump-kernel");
  c.output = r.get<std::string>("output", c.output.string());
  require(!c.output.empty(), "output", "must be a directory path");
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.threads = r.get<int>("threads", c.threads);
  require(c.threads >= 0, "threads", "must be >= 0");
  if (r.has("grid")) c.grid = parse_grid(r.sub("grid"), "grid", c.grid);
  if (r.has("initial")) {
    c.initial = parse_initial(r.sub("initial"), "initial", c.grid.dim());
  } else {
    std::vector<double> w(static_cast<std::size_t>(c.grid.rank()), 1.0);
    w.back() = 2.0;
    c.initial = {HPoint::identity(c.grid.dim()), w, {}};
  }
  const bool needs_packet = c.kind == "heat" || c.kind == "schrodinger" || c.kind == "fk";
  if (needs_packet) {
    try {
      (void)make_packet(c.initial, c.grid);
    } catch (const std::exception& e) {
      throw ConfigError("initial", std::string("initial: ") + e.what());
    }
  }

  const json empty = json::object();
  ObjectReader pr(r.has("plan") ? r.sub("plan") : empty, "plan");
  if (c.kind == "heat") {
    c.plan = parse_heat(pr, c);
  } else if (c.kind == "schrodinger") {
    c.plan = parse_schrodinger(pr, c);
  } else if (c.kind == "fk") {
    c.plan = parse_fk(pr, c);
  } else if (c.kind == "walk") {
    c.plan = parse_walk(pr);
  } else if (c.kind == "dump-kernel") {
    c.plan = parse_kernel(pr);
  } else {
    c.plan = parse_verify(pr);
  }
  pr.finish();
  r.finish();

  c.normalized = root;
  c.normalized.erase("output");
  c.normalized.erase("threads");
  return c;
}

}  // namespace hch::cli
