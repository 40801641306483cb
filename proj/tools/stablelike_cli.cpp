#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablelike/stablelike.h"

int main(int argc, char** argv) {
  CLI::App app{"Stable-like Markov chain experiments"};
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<std::string> out;
  app.add_option("--config", config, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Master seed; overrides the config");
  app.add_option("--threads", threads, "Worker cap; overrides the config")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory; overrides the config");
  app.set_version_flag("--version", std::string(sl_build_id()));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const nlohmann::ordered_json err = {{"error", "UsageError"}, {"message", e.what()}, {"exit_code", 2}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return SL_ERR_CONFIG;
  }

  const sl_status st = sl_run_config_file(config.c_str(), seed.has_value(), seed.value_or(0), threads,
                                          out ? out->c_str() : nullptr, nullptr);
  if (st != SL_OK) {
    std::fprintf(stderr, "%s\n", sl_last_error());
    return static_cast<int>(st);
  }
  return 0;
}
