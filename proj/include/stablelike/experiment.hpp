#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stablelike/config.hpp"

namespace stablelike {

inline constexpr int kSchemaVersion = 1;

// git-describe-style identifier fixed at configure time.
std::string build_id();

// Small string table written as CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row);
  std::string to_csv() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
};

struct Plan;  // parsed and range-checked experiment, ready to dispatch

// Parses and validates a whole config document. Throws ConfigError.
class Experiment {
 public:
  Experiment(const Json& document, const Overrides& overrides = {});
  ~Experiment();
  Experiment(Experiment&&) noexcept;
  Experiment& operator=(Experiment&&) noexcept;

  const std::string& kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  int threads() const { return threads_; }
  const std::string& output_dir() const { return output_dir_; }
  // Effective config without run-environment fields (threads, output_dir).
  const Json& canonical() const { return canonical_; }
  std::string config_hash() const;

  struct Result {
    OrderedJson report;  // deterministic given the canonical config
    Table summary;       // one row per sub-experiment
    Table series;        // long format: series, x, y
  };

  // Runs the experiment. Path exports (simulate) go to export_dir when non-empty.
  Result run(const std::string& export_dir = "") const;

 private:
  std::string kind_;
  std::uint64_t seed_ = 0;
  int threads_ = 1;
  std::string output_dir_;
  Json canonical_;
  std::unique_ptr<Plan> plan_;
};

// Writes report.json, summary.csv, series.csv, plot.py and metadata.json.
void write_outputs(const Experiment& exp, const Experiment::Result& result, const std::string& dir,
                   const std::string& started_utc, const std::string& finished_utc,
                   double wall_seconds, const std::string& config_path);

struct RunOutcome {
  int exit_code = 0;       // 0 ok, 1 other, 2 config, 3 numerical, 4 precondition
  std::string error_json;  // empty on success
  std::string output_dir;
  std::string report_json;
};

// Parses, runs and writes outputs. Never throws.
RunOutcome run_config_text(const std::string& text, const Overrides& overrides,
                           const std::string& config_path = "");
RunOutcome run_config_file(const std::string& path, const Overrides& overrides);

// Maps the current exception to (exit code, structured error JSON).
RunOutcome outcome_from_current_exception();

}  // namespace stablelike
