#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inls/classifier.hpp"
#include "inls/error.hpp"
#include "inls/evolution.hpp"
#include "inls/ground_state.hpp"
#include "inls/params.hpp"
#include "inls/radial_grid.hpp"
#include "json.hpp"

namespace inls::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum class Action { ground_state, classify, evolve, verify, sweep };
enum class Family { ground_state, scaled_ground_state, gaussian, chirped_gaussian };

std::string to_string(Action a);
std::string to_string(Family f);

struct GridConfig {
  std::size_t N = 2048;
  double R_max = 20.0;
  Mapping mapping;
};

struct InitialData {
  Family family = Family::ground_state;
  double lambda = 1.0;
  ScaleMode mode = ScaleMode::amplitude;
  double amplitude = 1.0;
  double width = 1.0;
  double chirp = 0.0;
};

struct ClassifyConfig {
  DataSymmetry symmetry = DataSymmetry::radial;
  double band = 1e-6;
};

// One axis per key, e.g. "params.c" -> {-0.2, 0, 0.5}. Jobs are the cartesian
// product, each running `action`.
struct SweepConfig {
  Action action = Action::classify;
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

struct OutputConfig {
  fs::path dir = "out";
  std::string summary = "summary.json";
  std::string csv = "trajectory.csv";
  std::string report = "verify_report.json";
};

struct CacheConfig {
  fs::path dir = ".inls_cache";
  bool require_cached_groundstate = false;
};

struct VerifyConfig {
  std::vector<std::string> checks;  // empty list is allowed
  int samples = 50;
  bool order_table = true;
};

struct ExperimentConfig {
  Action action = Action::ground_state;
  Params params;
  GridConfig grid;
  InitialData data;
  EvolutionConfig evolution;
  ClassifyConfig classify;
  SweepConfig sweep;
  OutputConfig output;
  CacheConfig cache;
  VerifyConfig verify;
  std::uint64_t seed = 1;
  bool quiet = false;

  // Flattened "section.key" -> value as read, used to derive sweep jobs.
  std::map<std::string, std::string> entries;
};

std::vector<std::string> all_checks();

// INI text -> config. Unknown sections or keys, malformed numbers and invalid
// params all throw inls::Error (ConfigParseError or the params code).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const fs::path& path);
ExperimentConfig config_from_entries(const std::map<std::string, std::string>& entries);

// Canonical echo of every parsed field; the content hash is taken over it.
json config_echo(const ExperimentConfig& cfg);

// "blob <n>\0<bytes>" hashed with SHA-1, lowercase hex.
std::string git_blob_hash(const std::string& bytes);
std::string sha1_hex(const std::string& bytes);

// Ground-state cache: one text file per (d, b, sigma, c, N, R_max, mapping),
// named by the SHA-1 of the key. Writes go to a temp file and are renamed in.
class GroundStateCache {
 public:
  explicit GroundStateCache(fs::path dir) : dir_(std::move(dir)) {}

  static std::string key(const Params& p, const GridConfig& grid);
  fs::path path_for(const Params& p, const GridConfig& grid) const;

  std::optional<GroundStateBundle> load(const Params& p, const GridConfig& grid) const;
  void store(const GroundStateBundle& gs, const GridConfig& grid) const;

  // Load, or solve and store. `hit` reports which happened.
  GroundStateBundle obtain(const Params& p, const GridConfig& grid, bool require_cached, bool* hit = nullptr) const;

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
};

// Cache directory precedence: explicit flag, then INLS_CACHE_DIR, then config.
fs::path resolve_cache_dir(const ExperimentConfig& cfg, const std::optional<fs::path>& flag);

Field initial_field(const ExperimentConfig& cfg, const GroundStateBundle& gs);

struct RunResult {
  int exit_code = 0;
  json summary;
  std::vector<fs::path> artifacts;
};

// Exit codes: 0 success, 1 check failure, 2 usage or config error, 3 I/O.
int exit_code_for(ErrorCode code);

RunResult run_experiment(const ExperimentConfig& cfg);
// Runs every configured identity check and writes the report.
RunResult verify_suite(const ExperimentConfig& cfg);

// Same as run_experiment but maps inls::Error to an exit code and a message.
int run_guarded(const ExperimentConfig& cfg, std::string* message = nullptr);

// Shared JSON helpers.
json to_json(const GroundStateBundle& gs);
json to_json(const Classification& c);
json to_json(const InvariantSnapshot& s);
void write_text(const fs::path& path, const std::string& text);
std::string dump(const json& j);

}  // namespace inls::harness
