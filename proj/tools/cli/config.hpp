#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hch/field.hpp"
#include "hch/heat.hpp"
#include "hch/magnetic.hpp"
#include "hch/schrodinger.hpp"
#include "hch/stochastic.hpp"

namespace hch::cli {

using nlohmann::json;

/// Validation failure tied to the offending config key (dotted path).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key(std::move(key)) {}
  std::string key;
};

struct PotentialConfig {
  std::string type = "zero";  // zero | constant | gaussian
  double amplitude = 0.0;
  double width = 1.0;
};

PotentialSpec make_potential(const PotentialConfig& p);

struct HeatPlan {
  double t = 0.25;
  std::vector<int> n_list{2, 4, 8, 16};
  std::string method = "dense";  // dense | quadrature | monte_carlo
  int q = 8;
  std::size_t samples = 4096;
  PotentialConfig potential;
  bool write_fields = true;
};

struct SchrodingerPlan {
  double t = 0.9;
  std::vector<int> n_list{2, 4, 8, 16};
  std::string shear = "dense";  // dense | interpolated
  std::vector<std::string> orders{"SM"};
  PotentialConfig potential;
  bool write_fields = true;
};

struct FkPlan {
  double t = 0.25;
  std::size_t paths = 100000;
  double h = 1e-3;
  std::vector<std::vector<double>> probes{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  bool budget = true;
  bool oracle = true;
};

struct WalkPlan {
  double t = 1.0;
  std::vector<int> n_list{4, 16, 64};
  std::size_t paths = 20000;
  std::vector<double> start{0, 0, 0};
  std::vector<GaussianBump> bumps;
  GridSpec reference_grid = GridSpec::uniform(1, 64, 16.0, 64, 16.0);
  std::vector<double> deltas{0.5, 0.25, 0.125};
  double eps = 0.5;
  std::size_t tightness_paths = 2000;
  int per_step = 8;
  bool sample_paths = true;
};

struct KernelPlan {
  Flavor flavor = Flavor::Heat;
  double t = 0.5;
  std::vector<double> alphas{0.0, 0.5, 1.0};
  std::vector<std::vector<double>> pairs{{0, 0, 0.5, 0.5}};
};

struct VerifyPlan {
  std::vector<std::string> only;  // empty means every check
};

using Plan = std::variant<HeatPlan, SchrodingerPlan, FkPlan, WalkPlan, KernelPlan, VerifyPlan>;

struct ExperimentConfig {
  std::string kind;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  GridSpec grid = GridSpec::uniform(1, 64, 8.0, 32, 16.0);
  GaussianPacketSpec initial{HPoint::identity(1), {1.0, 1.0, 2.0}, {}};
  Plan plan;
  /// Normalized config echoed into the manifest (output and threads removed).
  json normalized;
};

const std::vector<std::string>& kinds();

/// Sets a dotted key ("plan.t") to a value parsed as JSON when possible, otherwise a string.
void apply_override(json& root, const std::string& dotted, const std::string& value);

/// Schema and cross-field validation; throws ConfigError before any computation.
ExperimentConfig parse_config(const json& root);

}  // namespace hch::cli
