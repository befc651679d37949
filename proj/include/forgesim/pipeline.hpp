#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "forgesim/determinants.hpp"
#include "forgesim/hamiltonian.hpp"

namespace forgesim {

inline constexpr double kHartreeToKcalPerMol = 627.5094740631;

/// One pipeline run. Paths are resolved against the config file directory.
struct RunConfig {
  std::string label;
  std::filesystem::path fcidump;
  std::optional<std::filesystem::path> full_fcidump;

  // [ansatz]
  int n_bitstrings = 2;
  std::vector<Bitstring> bitstrings;  // empty: select from the FCI vector
  std::string layout;                 // empty: brick wall
  std::vector<double> initial_theta;
  std::uint64_t ansatz_seed = 7;
  int restarts = 8;
  int max_iterations = 20000;

  // [tomography]
  bool exact = false;
  int shots = 1024;
  std::vector<std::uint64_t> seeds{0};
  double bit_flip = 0.0;

  // [qse]
  bool qse = true;
  std::optional<double> qse_cutoff;
  bool project_first = true;
  bool purify = true;

  // [pt2]
  bool pt2 = false;
  ActiveWindow window;
  double degeneracy_threshold = 1e-8;

  // [oracle]
  bool fci = true;

  std::filesystem::path output_dir;
  int jobs = 1;
};

/// Reads an INI file. Throws ConfigError for unknown keys or bad values.
RunConfig load_config(const std::filesystem::path& path);
/// Parses "1,2,5" and "0-19" (inclusive) lists.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
/// Checks every value and that referenced FCIDUMP files exist and parse.
/// Throws ConfigError; nothing is computed.
void validate_config(const RunConfig& config);
nlohmann::json config_to_json(const RunConfig& config);

/// A stage threw after validation. `partial` holds everything computed
/// before the failure.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause, nlohmann::json partial)
      : std::runtime_error("stage '" + stage + "' failed: " + cause),
        stage_(std::move(stage)),
        partial_(std::move(partial)) {}
  const std::string& stage() const { return stage_; }
  const nlohmann::json& partial() const { return partial_; }

 private:
  std::string stage_;
  nlohmann::json partial_;
};

struct QseSampleRow {
  std::uint64_t seed = 0;
  double raw_energy = 0.0;
  double purified_energy = 0.0;
  double qse_raw = 0.0;
  double qse_purified = 0.0;
  int rank_raw = 0;
  int rank_purified = 0;
};

struct RunOutcome {
  /// Numeric results only; identical across reruns of the same config.
  nlohmann::json report;
  /// Wall-clock seconds per stage.
  nlohmann::json timings;
  std::vector<double> vqe_trace;
  std::vector<QseSampleRow> qse_samples;
};

/// VQE -> tomography -> purification -> QSE -> PT2 as configured.
/// Throws StageError on a failing stage.
RunOutcome run_pipeline(const RunConfig& config);

/// Delta E = E(TS) - sum E(reactants) for every energy present in all reports.
nlohmann::json barrier_report(const std::vector<nlohmann::json>& reactants,
                              const nlohmann::json& transition_state);

/// report.json, timings.json, vqe_trace.csv and (sampled runs) qse_samples.csv.
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

}  // namespace forgesim
