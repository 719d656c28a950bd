#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace hch::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalAbort = 3 };

/// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// CSV text with the named columns blanked in every data row.
std::string csv_canonical(const std::filesystem::path& file, const std::vector<std::string>& columns);
/// fnv1a64 of csv_canonical.
std::uint64_t csv_hash_excluding(const std::filesystem::path& file, const std::vector<std::string>& columns);

/// Files are written into a staging directory and moved into place only by commit(),
/// so a failed run leaves the output directory untouched.
class ArtifactStage {
 public:
  explicit ArtifactStage(std::filesystem::path output);
  ~ArtifactStage();
  ArtifactStage(const ArtifactStage&) = delete;
  ArtifactStage& operator=(const ArtifactStage&) = delete;

  /// Path to write `name` to; `unhashed` lists CSV columns left out of its hash.
  std::string file(const std::string& name, std::vector<std::string> unhashed = {});

  /// Moves every file into the output directory and writes manifest.json beside them.
  void commit(const json& header);

 private:
  struct Entry {
    std::string name;
    std::vector<std::string> unhashed;
  };
  std::filesystem::path output_;
  std::filesystem::path stage_;
  std::vector<Entry> entries_;
  bool committed_ = false;
  bool created_ = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// Invariant and property checks on small grids.
std::vector<CheckResult> run_invariants(const std::vector<std::string>& only);
const std::vector<std::string>& invariant_names();

/// Executes a validated config; returns the process exit code.
int run(const ExperimentConfig& config, std::ostream& log);

/// Full command line handling: prints one JSON status line to `out`.
int run_main(const std::vector<std::string>& args, std::ostream& out);

}  // namespace hch::cli
