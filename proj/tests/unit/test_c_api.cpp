#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "stablelike/stablelike.h"

TEST_CASE("C API: stable law") {
  double v = 0.0;
  CHECK(sl_stable_pdf(1.0, 1.0, 0.0, &v) == SL_OK);
  CHECK(v == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
  CHECK(std::string(sl_last_error()).empty());
  CHECK(sl_stable_cdf(2.0, 1.0, 0.0, &v) == SL_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(sl_stable_tail_constant(2.0, 1.0, &v) == SL_ERR_PRECONDITION);
  CHECK(std::string(sl_last_error()).find("PreconditionError") != std::string::npos);
  CHECK(sl_stable_pdf(1.0, 1.0, 0.0, nullptr) == SL_ERR_NULL_ARGUMENT);
}

TEST_CASE("C API: streams, specs, chains") {
  sl_rng* rng = nullptr;
  REQUIRE(sl_rng_new(12, &rng) == SL_OK);
  sl_rng* child = nullptr;
  REQUIRE(sl_rng_split(rng, 1, &child) == SL_OK);
  std::vector<double> xs(100);
  CHECK(sl_stable_sample(1.5, 1.0, child, xs.data(), xs.size()) == SL_OK);
  for (double x : xs) CHECK(std::isfinite(x));

  sl_spec* spec = nullptr;
  CHECK(sl_spec_from_json("{\"kind\": \"step\", \"alpha\": 1.6, \"beta\": 0.6, \"bogus\": 1}", &spec) == SL_ERR_CONFIG);
  CHECK(std::string(sl_last_error()).find("/bogus") != std::string::npos);
  REQUIRE(sl_spec_from_json("{\"kind\": \"step\", \"alpha\": 1.6, \"beta\": 1.0}", &spec) == SL_OK);
  char* text = nullptr;
  REQUIRE(sl_spec_to_json(spec, &text) == SL_OK);
  CHECK(std::string(text).find("\"kind\":\"step\"") != std::string::npos);
  sl_string_free(text);

  double d = 0.0;
  CHECK(sl_transition_density(spec, 1.0, 1.0, &d) == SL_OK);
  CHECK(d == doctest::Approx(1.0 / M_PI).epsilon(1e-9));
  std::vector<double> path(51);
  CHECK(sl_run_chain(spec, 0.0, 50, rng, path.data()) == SL_OK);
  CHECK(path[0] == 0.0);

  char* rep = nullptr;
  CHECK(sl_classify(spec, "{\"horizon\": 10}", 1, 1, &rep) == SL_OK);
  CHECK(std::string(rep).find("Inconclusive") != std::string::npos);
  sl_string_free(rep);

  sl_spec_free(spec);
  sl_rng_free(child);
  sl_rng_free(rng);
}

TEST_CASE("C API: experiments") {
  const auto dir = (std::filesystem::temp_directory_path() / "stablelike_c_api").string();
  const char* cfg = R"({"schema_version": 1, "experiment": "validate-conditions",
    "spec": {"kind": "periodic_pareto", "tau": 1.0, "alpha": 1.0}})";
  char* report = nullptr;
  REQUIRE(sl_run_experiment(cfg, 1, 5, 1, dir.c_str(), &report) == SL_OK);
  CHECK(std::string(report).find("\"seed\": 5") != std::string::npos);
  sl_string_free(report);
  CHECK(std::filesystem::exists(dir + "/report.json"));
  CHECK(sl_run_experiment("{\"schema_version\": 1}", 0, 0, 0, dir.c_str(), nullptr) == SL_ERR_CONFIG);
  CHECK(std::string(sl_last_error()).find("/experiment") != std::string::npos);
  CHECK(sl_run_config_file("/nonexistent/config.json", 0, 0, 0, nullptr, nullptr) == SL_ERR_CONFIG);
  CHECK(std::strlen(sl_build_id()) > 0);
  std::filesystem::remove_all(dir);
}
