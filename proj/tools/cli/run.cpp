#include "run.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hch/parallel.hpp"

namespace hch::cli {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  return os;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ConvergenceRow {
  int n;
  std::string method;
  double error, drift, boundary, wall;
};

void write_convergence(const std::vector<ConvergenceRow>& rows, const std::string& path) {
  auto os = open_csv(path);
  os << "n,method,l2_error_vs_oracle,norm_drift,boundary_mass,wall_time\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.method << ',' << r.error << ',' << r.drift << ',' << r.boundary << ',' << r.wall << '\n';
  }
}

json rows_json(const std::vector<ConvergenceRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"n", r.n}, {"method", r.method}, {"l2_error_vs_oracle", r.error}, {"norm_drift", r.drift},
                 {"boundary_mass", r.boundary}});
  }
  return a;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << '\n';
}

double log_boundary(const std::vector<StepRecord>& steps) {
  double b = 0.0;
  for (const auto& s : steps) b = std::max(b, s.boundary_mass);
  return b;
}

HeatStepMethod heat_method(const HeatPlan& p, std::uint64_t seed, int n) {
  if (p.method == "quadrature") return Quadrature{p.q};
  if (p.method == "monte_carlo") return MonteCarlo{p.samples, RngStream{seed, static_cast<std::uint64_t>(n)}};
  return DenseSpectral{};
}

json run_heat(const ExperimentConfig& c, const HeatPlan& p, ArtifactStage& stage, std::ostream& log) {
  const Field f0 = make_packet(c.initial, c.grid);
  const PotentialSpec pot = make_potential(p.potential);
  const double n0 = l2_norm(f0);
  // Without a potential the exact kernel is the reference; otherwise a dense iterate 8x finer.
  const bool exact = pot.is_zero();
  const Field ref = exact ? oracle_evolve(f0, p.t, Flavor::Heat)
                          : chernoff_evolve_heat(f0, p.t, 8 * p.n_list.back(), pot, DenseSpectral{});
  std::vector<ConvergenceRow> rows;
  InterpStats interp;
  for (int n : p.n_list) {
    const auto t0 = std::chrono::steady_clock::now();
    EvolutionLog elog;
    const Field u = chernoff_evolve_heat(f0, p.t, n, pot, heat_method(p, c.seed, n), &elog);
    const double wall = seconds_since(t0);
    interp.evaluations += elog.interp.evaluations;
    interp.clipped += elog.interp.clipped;
    rows.push_back({n, p.method, relative_l2_error(u, ref), (l2_norm(u) - l2_norm(ref)) / n0, log_boundary(elog.steps), wall});
    log << "heat n=" << n << " error=" << rows.back().error << '\n';
    if (p.write_fields) write_hfld(u, stage.file("field_n" + std::to_string(n) + ".hfld"));
  }
  write_convergence(rows, stage.file("convergence.csv", {"wall_time"}));
  if (p.write_fields) {
    write_hfld(f0, stage.file("initial.hfld"));
    write_hfld(ref, stage.file("reference.hfld"));
  }
  return {{"reference", exact ? "mehler_kernel" : "dense_iterate_8x"},
          {"reference_norm", l2_norm(ref)},
          {"initial_norm", n0},
          {"clip_rate", interp.clip_rate()},
          {"rows", rows_json(rows)}};
}

VPotentialSpec schrodinger_potential(const PotentialConfig& p) {
  if (p.type == "zero") return VPotentialSpec::zero();
  return {make_potential(p), true};
}

json run_schrodinger(const ExperimentConfig& c, const SchrodingerPlan& p, ArtifactStage& stage, std::ostream& log) {
  const Field f0 = make_packet(c.initial, c.grid);
  const VPotentialSpec pot = schrodinger_potential(p.potential);
  const ShearMethod shear = p.shear == "dense" ? ShearMethod::Dense : ShearMethod::Interpolated;
  const double n0 = l2_norm(f0);
  const bool exact = pot.is_zero();
  const Field ref = exact ? oracle_evolve(f0, p.t, Flavor::Schrodinger)
                          : chernoff_evolve_schrodinger(f0, p.t, 8 * p.n_list.back(), pot, ShearMethod::Dense,
                                                        StepOrder::SM);
  std::vector<ConvergenceRow> rows;
  int clip_warnings = 0;
  for (const auto& order_name : p.orders) {
    const StepOrder order = order_name == "SM" ? StepOrder::SM : StepOrder::MS;
    for (int n : p.n_list) {
      const auto t0 = std::chrono::steady_clock::now();
      SchrodingerLog slog;
      const Field u = chernoff_evolve_schrodinger(f0, p.t, n, pot, shear, order, &slog);
      const double wall = seconds_since(t0);
      clip_warnings += slog.clip_warnings;
      rows.push_back({n, p.shear + "/" + order_name, relative_l2_error(u, ref), (l2_norm(u) - l2_norm(ref)) / n0,
                      log_boundary(slog.steps), wall});
      log << "schrodinger " << order_name << " n=" << n << " error=" << rows.back().error << '\n';
      if (p.write_fields) write_hfld(u, stage.file("field_" + order_name + "_n" + std::to_string(n) + ".hfld"));
    }
  }
  write_convergence(rows, stage.file("convergence.csv", {"wall_time"}));
  if (p.write_fields) {
    write_hfld(f0, stage.file("initial.hfld"));
    write_hfld(ref, stage.file("reference.hfld"));
  }
  return {{"reference", exact ? "mehler_kernel" : "dense_iterate_8x"},
          {"reference_norm", l2_norm(ref)},
          {"initial_norm", n0},
          {"clip_warnings", clip_warnings},
          {"rows", rows_json(rows)}};
}

std::string coordinate_header(int d) {
  std::string h;
  for (int i = 1; i <= d; ++i) h += "x" + std::to_string(i) + ",";
  for (int i = 1; i <= d; ++i) h += "y" + std::to_string(i) + ",";
  return h + "s";
}

json run_fk(const ExperimentConfig& c, const FkPlan& p, ArtifactStage& stage, std::ostream& log) {
  const Field f0 = make_packet(c.initial, c.grid);
  const int d = c.grid.dim();
  std::vector<HPoint> points;
  for (const auto& q : p.probes) points.emplace_back(std::vector<double>(q.begin(), q.end() - 1), q.back());
  const int steps = static_cast<int>(std::lround(p.t / p.h));
  const RngStream rng{c.seed, 0};
  FKBudget b;
  if (p.budget) {
    b = fk_estimate_with_budget(f0, points, p.t, p.paths, steps, rng);
  } else {
    b.estimates = fk_estimate_many(f0, points, p.t, p.paths, steps, rng);
    b.time_budget.assign(points.size(), 0.0);
    b.interp_budget.assign(points.size(), 0.0);
  }
  auto os = open_csv(stage.file("fk.csv"));
  os << coordinate_header(d) << ",re_est,im_est,se,time_budget,interp_budget,re_oracle,im_oracle,abs_diff,tolerance,within\n";
  int within = 0;
  json rows = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Estimate& e = b.estimates[i];
    const double tol = 3.0 * e.se + b.time_budget[i] + b.interp_budget[i];
    cplx ref{0.0, 0.0};
    double diff = 0.0;
    bool ok = true;
    if (p.oracle) {
      ref = oracle_evaluate_point(f0, points[i], p.t, Flavor::Heat);
      diff = std::abs(e.mean - ref);
      ok = diff <= tol;
    }
    within += ok ? 1 : 0;
    for (double v : p.probes[i]) os << v << ',';
    os << e.mean.real() << ',' << e.mean.imag() << ',' << e.se << ',' << b.time_budget[i] << ',' << b.interp_budget[i]
       << ',';
    if (p.oracle) {
      os << ref.real() << ',' << ref.imag() << ',' << diff << ',' << tol << ',' << (ok ? 1 : 0) << '\n';
    } else {
      os << ",,," << tol << ",\n";
    }
    rows.push_back({{"probe", p.probes[i]}, {"se", e.se}, {"abs_diff", diff}, {"tolerance", tol}});
    log << "fk probe " << i << " se=" << e.se << '\n';
  }
  return {{"steps", steps}, {"paths", p.paths}, {"within_tolerance", within}, {"probes", rows}};
}

json run_walk(const ExperimentConfig& c, const WalkPlan& p, ArtifactStage& stage, std::ostream& log) {
  const HPoint start({p.start[0], p.start[1]}, p.start[2]);
  const auto ref = heat_reference_values(p.bumps, start, p.t, p.reference_grid);
  const auto weak = weak_convergence_table(p.n_list, p.t, p.bumps, ref, start, p.paths, RngStream{c.seed, 1});
  write_weak_csv(weak, stage.file("weak.csv"));
  const auto tight = tightness_diagnostic(p.n_list, p.deltas, p.eps, p.t, p.tightness_paths, RngStream{c.seed, 2}, 1,
                                          p.per_step);
  write_tightness_csv(tight, stage.file("tightness.csv"));
  if (p.sample_paths) {
    for (int n : p.n_list) {
      const PathSample jump = sample_jump_path(start, n, p.t, RngStream{c.seed, 3}.split(static_cast<std::uint64_t>(n)));
      write_path_csv(jump, stage.file("path_jump_n" + std::to_string(n) + ".csv"));
      write_path_csv(interpolate_geodesic(jump, p.per_step), stage.file("path_geodesic_n" + std::to_string(n) + ".csv"));
    }
  }
  log << "walk rows=" << weak.size() << '\n';
  json refs = json::array();
  for (double v : ref) refs.push_back(v);
  return {{"bumps", p.bumps.size()}, {"reference_values", refs}, {"weak_rows", weak.size()}, {"tightness_rows", tight.size()}};
}

json run_kernel(const KernelPlan& p, ArtifactStage& stage) {
  std::vector<std::vector<double>> z, zp;
  for (const auto& q : p.pairs) {
    z.push_back({q[0], q[1]});
    zp.push_back({q[2], q[3]});
  }
  const auto rows = kernel_table(p.flavor, p.alphas, p.t, z, zp);
  write_kernel_csv(rows, stage.file("kernel.csv"));
  return {{"flavor", flavor_name(p.flavor)}, {"rows", rows.size()}};
}

int run_verify(const VerifyPlan& p, ArtifactStage& stage, std::ostream& log, json& summary) {
  const auto results = run_invariants(p.only);
  json checks = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    checks.push_back({{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"tolerance", r.tolerance}});
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << r.value << " tol=" << r.tolerance << '\n';
  }
  write_json({{"checks", checks}, {"passed", all}}, stage.file("verify.json"));
  summary = {{"checks", results.size()}, {"passed", all}};
  return all ? kOk : kCheckFailed;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_canonical(const fs::path& file, const std::vector<std::string>& columns) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string line, canon;
  std::vector<bool> drop;
  bool header = true;
  while (std::getline(is, line)) {
    auto cells = split_csv_line(line);
    if (header) {
      drop.assign(cells.size(), false);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        drop[i] = std::find(columns.begin(), columns.end(), cells[i]) != columns.end();
      }
      header = false;
    } else {
      for (std::size_t i = 0; i < cells.size() && i < drop.size(); ++i) {
        if (drop[i]) cells[i].clear();
      }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) canon += (i ? "," : "") + cells[i];
    canon += '\n';
  }
  return canon;
}

std::uint64_t csv_hash_excluding(const fs::path& file, const std::vector<std::string>& columns) {
  return fnv1a64(csv_canonical(file, columns));
}

ArtifactStage::ArtifactStage(fs::path output) : output_(std::move(output)), stage_(output_ / ".staging") {
  created_ = !fs::exists(output_);
  fs::remove_all(stage_);
  fs::create_directories(stage_);
}

ArtifactStage::~ArtifactStage() {
  std::error_code ec;
  fs::remove_all(stage_, ec);
  if (!committed_ && created_) fs::remove(output_, ec);
}

std::string ArtifactStage::file(const std::string& name, std::vector<std::string> unhashed) {
  entries_.push_back({name, std::move(unhashed)});
  return (stage_ / name).string();
}

void ArtifactStage::commit(const json& header) {
  json files = json::array();
  for (const auto& e : entries_) {
    const fs::path staged = stage_ / e.name;
    json entry{{"path", e.name}};
    if (e.unhashed.empty()) {
      entry["bytes"] = fs::file_size(staged);
      entry["fnv1a64"] = hex64(fnv1a64(read_file(staged)));
    } else {
      // The raw size varies with the excluded columns, so record the canonical text instead.
      const std::string canon = csv_canonical(staged, e.unhashed);
      entry["hashed_bytes"] = canon.size();
      entry["fnv1a64"] = hex64(fnv1a64(canon));
      entry["hash_excludes_columns"] = e.unhashed;
    }
    files.push_back(entry);
  }
  for (const auto& e : entries_) fs::rename(stage_ / e.name, output_ / e.name);
  json manifest = header;
  manifest["files"] = files;
  write_json(manifest, (output_ / "manifest.json").string());
  committed_ = true;
}

int run(const ExperimentConfig& c, std::ostream& log) {
  set_thread_cap(c.threads);
  ArtifactStage stage(c.output);
  json summary;
  int code = kOk;
  if (const auto* p = std::get_if<HeatPlan>(&c.plan)) {
    summary = run_heat(c, *p, stage, log);
  } else if (const auto* p = std::get_if<SchrodingerPlan>(&c.plan)) {
    summary = run_schrodinger(c, *p, stage, log);
  } else if (const auto* p = std::get_if<FkPlan>(&c.plan)) {
    summary = run_fk(c, *p, stage, log);
  } else if (const auto* p = std::get_if<WalkPlan>(&c.plan)) {
    summary = run_walk(c, *p, stage, log);
  } else if (const auto* p = std::get_if<KernelPlan>(&c.plan)) {
    summary = run_kernel(*p, stage);
  } else {
    code = run_verify(std::get<VerifyPlan>(c.plan), stage, log, summary);
  }
  write_json(summary, stage.file("summary.json"));
  stage.commit({{"tool", "hchernoff"}, {"version", "0.1.0"}, {"kind", c.kind}, {"config", c.normalized}});
  return code;
}

namespace {

json error_json(int code, const std::string& category, const std::string& key, const std::string& message) {
  json j{{"status", "error"}, {"exit_code", code}, {"error", category}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  return j;
}

// Collects "--a.b value" and "--a.b=value" pairs left over by the fixed flags.
void apply_extras(json& root, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw ConfigError(a, "unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      apply_override(root, body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw ConfigError(body, "flag --" + body + " needs a value");
      apply_override(root, body, extras[++i]);
    }
  }
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Chernoff evolution on the Heisenberg group"};
  app.require_subcommand(1);
  struct Common {
    std::string config, output;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
  } common;
  for (const auto& k : kinds()) {
    auto* sub = app.add_subcommand(k, "run a " + k + " experiment");
    sub->allow_extras();
    sub->add_option("--config", common.config, "JSON experiment config");
    sub->add_option("--output", common.output, "output directory");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--threads", common.threads, "worker thread cap (0 = hardware default)");
  }
  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << error_json(kConfigError, "usage", "", e.what()).dump() << '\n';
    return kConfigError;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string kind = sub->get_name();

  ExperimentConfig cfg;
  try {
    json root = json::object();
    if (!common.config.empty()) {
      std::ifstream is(common.config);
      if (!is) throw ConfigError("config", "cannot read config file " + common.config);
      root = json::parse(is, nullptr, false);
      if (root.is_discarded()) throw ConfigError("config", "config file is not valid JSON");
      if (!root.is_object()) throw ConfigError("config", "config root must be an object");
    }
    if (root.contains("kind") && root["kind"] != kind) {
      throw ConfigError("kind", "config kind '" + root["kind"].dump() + "' does not match subcommand " + kind);
    }
    root["kind"] = kind;
    apply_extras(root, sub->remaining());
    if (!common.output.empty()) root["output"] = common.output;
    if (common.seed) root["seed"] = *common.seed;
    if (common.threads) root["threads"] = *common.threads;
    cfg = parse_config(root);
  } catch (const ConfigError& e) {
    out << error_json(kConfigError, "config", e.key, e.what()).dump() << '\n';
    return kConfigError;
  }

  try {
    std::ostringstream log;
    const int code = run(cfg, log);
    std::cerr << log.str();
    out << json{{"status", code == kOk ? "ok" : "checks_failed"},
                {"exit_code", code},
                {"kind", kind},
                {"manifest", (cfg.output / "manifest.json").string()}}
               .dump()
        << '\n';
    return code;
  } catch (const NumericalAbort& e) {
    out << error_json(kNumericalAbort, "numerical_abort", "", e.what()).dump() << '\n';
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    out << error_json(kConfigError, "precondition", "", e.what()).dump() << '\n';
    return kConfigError;
  }
}

}  // namespace hch::cli
