#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stablelike/config.hpp"
#include "stablelike/errors.hpp"
#include "stablelike/experiment.hpp"

using namespace stablelike;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string pointer_of(const std::string& text) {
  try {
    Experiment e(Json::parse(text));
  } catch (const ConfigError& err) {
    return err.pointer();
  }
  return "<none>";
}

const char* kValidate = R"({
  "schema_version": 1, "experiment": "validate-conditions", "seed": 3,
  "spec": {"kind": "periodic_pareto", "tau": 2.0,
           "alpha": {"type": "periodic_plateau", "tau": 2.0, "base": 0.8, "peak": 1.4,
                     "plateau_fraction": 0.5, "ramp_fraction": 0.1}}
})";

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("spec JSON round trip for every kind") {
  const std::vector<ChainSpec> specs = {
      make_stable_kernel(Profile::smoothed_step(0.6, 1.6, 5.0), Profile::constant(2.0)),
      make_step_chain(1.6, 0.6, 1.0, 2.0),
      make_smoothed_step(1.6, 0.6, 1.0, 1.0, 5.0),
      make_periodic_pareto(Profile::periodic_plateau(2.0, 0.8, 1.4, 0.5, 0.1), 2.0),
      make_periodic_pareto(Profile::periodic_table(1.0, {1.0, 1.5, 1.2}, Plateau{1.0, 0.0, 0.0}), 1.0),
      make_discrete_chain({0.7, 1.5}, 100),
  };
  for (const auto& s : specs) {
    const auto j = spec_to_json(s);
    const auto back = spec_from_json(Json::parse(j.dump()), "/spec");
    CHECK(spec_to_json(back).dump() == j.dump());
    for (double x : {-2.3, 0.0, 0.7, 4.0}) CHECK(jump_alpha(back, x) == jump_alpha(s, x));
  }
}

TEST_CASE("config errors carry JSON pointers") {
  CHECK(pointer_of(R"({"experiment": "classify"})") == "/schema_version");
  CHECK(pointer_of(R"({"schema_version": 2, "experiment": "classify"})") == "/schema_version");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "nope"})") == "/experiment");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "classify", "spec": {"kind": "step", "alpha": 1, "beta": 1}, "extra": 1})") == "/extra");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "classify", "spec": {"kind": "step", "alpha": 1, "beta": 1}, "classifier": {"burn_in": 2}})") == "/classifier/burn_in");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "classify", "spec": {"kind": "step", "alpha": "x", "beta": 1}})") == "/spec/alpha");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "limit", "spec": {"kind": "step", "alpha": 1, "beta": 1}})") == "/spec/kind");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "cf-test", "params": {"alpha": 1.5, "attraction": {"n_list": [0]}}})") == "/params/attraction/n_list");
  CHECK(pointer_of(R"({"schema_version": 1, "experiment": "dist-check", "params": {"alpha": 1.5}, "classifier": {}})") == "/classifier");
}

TEST_CASE("config hash and overrides") {
  const Experiment a(Json::parse(kValidate));
  const Experiment b(Json::parse(kValidate), Overrides{std::nullopt, 4, std::string("elsewhere")});
  const Experiment c(Json::parse(kValidate), Overrides{99, std::nullopt, std::nullopt});
  CHECK(a.config_hash() == b.config_hash());  // environment fields do not enter the hash
  CHECK(a.config_hash() != c.config_hash());
  CHECK(c.seed() == 99);
  CHECK(b.threads() == 4);
  CHECK(b.output_dir() == "elsewhere");
}

TEST_CASE("validate-conditions on the periodic Pareto family") {
  const Experiment e(Json::parse(kValidate));
  const auto r = e.run();
  CHECK(r.report["experiment"] == "validate-conditions");
  CHECK(r.report["build_id"] == build_id());
  CHECK(r.report["results"]["max_deviation_beyond_1"].get<double>() < 1e-15);
  CHECK(r.report["results"]["ok"] == true);
  CHECK(r.summary.rows.size() == 6);
}

TEST_CASE("run_config_text writes the output set and is byte-reproducible") {
  const auto dir = std::filesystem::temp_directory_path() / "stablelike_unit_run";
  std::filesystem::remove_all(dir);
  Overrides ov;
  ov.output_dir = (dir / "a").string();
  const auto out1 = run_config_text(kValidate, ov);
  REQUIRE(out1.exit_code == 0);
  ov.output_dir = (dir / "b").string();
  ov.threads = 2;
  const auto out2 = run_config_text(kValidate, ov);
  REQUIRE(out2.exit_code == 0);
  for (const char* f : {"report.json", "summary.csv", "series.csv", "plot.py", "metadata.json"})
    CHECK(std::filesystem::exists(dir / "a" / f));
  CHECK(read(dir / "a" / "report.json") == read(dir / "b" / "report.json"));
  CHECK(read(dir / "a" / "report.json") == out1.report_json);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  Overrides ov;
  ov.output_dir = (std::filesystem::temp_directory_path() / "stablelike_unit_exit").string();
  CHECK(run_config_text("{", ov).exit_code == 2);
  const auto bad = run_config_text(R"({"schema_version": 1, "experiment": "classify", "spec": {"kind": "step"}})", ov);
  CHECK(bad.exit_code == 2);
  CHECK(Json::parse(bad.error_json)["pointer"] == "/spec/alpha");
  // Tolerance that the embedded-walk ledger cannot meet at this table size.
  const auto num = run_config_text(
      R"({"schema_version": 1, "experiment": "embedded", "spec": {"kind": "discrete", "alphas": [0.7, 0.7]}, "params": {"J": 50}})", ov);
  CHECK(num.exit_code == 3);
  CHECK(Json::parse(num.error_json)["error"] == "NumericalError");
  // A Gaussian kernel has no power tail to check.
  const auto pre = run_config_text(
      R"({"schema_version": 1, "experiment": "validate-conditions", "spec": {"kind": "stable_kernel", "alpha": 2.0}})", ov);
  CHECK(pre.exit_code == 4);
  std::filesystem::remove_all(ov.output_dir.value());
}

TEST_CASE("classify with a ten-step horizon is inconclusive") {
  const auto e = Experiment(Json::parse(R"({"schema_version": 1, "experiment": "classify", "seed": 4,
      "spec": {"kind": "stable_kernel", "alpha": 1.5}, "classifier": {"horizon": 10}})"));
  CHECK(e.run().report["results"]["result"]["verdict"] == "Inconclusive");
}
