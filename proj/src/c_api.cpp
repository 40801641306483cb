#include "stablelike/stablelike.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "stablelike/config.hpp"
#include "stablelike/errors.hpp"
#include "stablelike/experiment.hpp"
#include "stablelike/recurrence_lab.hpp"
#include "stablelike/simulate.hpp"
#include "stablelike/stable_dist.hpp"

struct sl_spec {
  stablelike::ChainSpec spec;
};

struct sl_rng {
  stablelike::RandomStream stream;
};

namespace {

thread_local std::string last_error;

sl_status fail(const std::string& error_json, int code) {
  last_error = error_json;
  return static_cast<sl_status>(code);
}

sl_status null_arg(const char* name) {
  stablelike::OrderedJson e;
  e["error"] = "NullArgument";
  e["message"] = std::string(name) + " must not be NULL";
  e["exit_code"] = SL_ERR_NULL_ARGUMENT;
  return fail(e.dump(), SL_ERR_NULL_ARGUMENT);
}

template <class Fn>
sl_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SL_OK;
  } catch (...) {
    const auto out = stablelike::outcome_from_current_exception();
    return fail(out.error_json, out.exit_code);
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

stablelike::Json parse_json(const char* text) {
  try {
    return stablelike::Json::parse(text);
  } catch (const stablelike::Json::parse_error& e) {
    throw stablelike::ConfigError("", std::string("not valid JSON: ") + e.what());
  }
}

stablelike::Overrides overrides(int has_seed, uint64_t seed, int threads, const char* out_dir) {
  stablelike::Overrides ov;
  if (has_seed) ov.seed = seed;
  if (threads > 0) ov.threads = threads;
  if (out_dir) ov.output_dir = out_dir;
  return ov;
}

sl_status finish_run(const stablelike::RunOutcome& out, char** report_json) {
  if (out.exit_code != 0) return fail(out.error_json, out.exit_code);
  return guarded([&] {
    if (report_json) *report_json = dup_string(out.report_json);
  });
}

}  // namespace

extern "C" {

const char* sl_build_id(void) {
  static const std::string id = stablelike::build_id();
  return id.c_str();
}

const char* sl_last_error(void) { return last_error.c_str(); }

void sl_string_free(char* s) { std::free(s); }

sl_status sl_rng_new(uint64_t seed, sl_rng** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new sl_rng{stablelike::RandomStream(seed)}; });
}

sl_status sl_rng_split(const sl_rng* parent, uint64_t index, sl_rng** out) {
  if (!parent) return null_arg("parent");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new sl_rng{parent->stream.split(index)}; });
}

void sl_rng_free(sl_rng* rng) { delete rng; }

sl_status sl_stable_pdf(double alpha, double gamma, double y, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = stablelike::pdf(stablelike::StableParams::make(alpha, gamma), y); });
}

sl_status sl_stable_cdf(double alpha, double gamma, double y, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = stablelike::cdf(stablelike::StableParams::make(alpha, gamma), y); });
}

sl_status sl_stable_tail_constant(double alpha, double gamma, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = stablelike::tail_constant(stablelike::StableParams::make(alpha, gamma)); });
}

sl_status sl_stable_sample(double alpha, double gamma, sl_rng* rng, double* out, size_t n) {
  if (!rng) return null_arg("rng");
  if (!out && n > 0) return null_arg("out");
  return guarded([&] {
    const stablelike::StableSampler s(stablelike::StableParams::make(alpha, gamma));
    for (size_t i = 0; i < n; ++i) out[i] = s(rng->stream);
  });
}

sl_status sl_spec_from_json(const char* json, sl_spec** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new sl_spec{stablelike::spec_from_json(parse_json(json), "")}; });
}

sl_status sl_spec_to_json(const sl_spec* spec, char** out) {
  if (!spec) return null_arg("spec");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(stablelike::spec_to_json(spec->spec).dump()); });
}

void sl_spec_free(sl_spec* spec) { delete spec; }

sl_status sl_transition_sample(const sl_spec* spec, double x, sl_rng* rng, double* out) {
  if (!spec) return null_arg("spec");
  if (!rng) return null_arg("rng");
  if (!out) return null_arg("out");
  return guarded([&] { *out = stablelike::transition_sample(spec->spec, x, rng->stream); });
}

sl_status sl_transition_density(const sl_spec* spec, double x, double y, double* out) {
  if (!spec) return null_arg("spec");
  if (!out) return null_arg("out");
  return guarded([&] { *out = stablelike::transition_density(spec->spec, x, y); });
}

sl_status sl_run_chain(const sl_spec* spec, double x0, size_t n, sl_rng* rng, double* states) {
  if (!spec) return null_arg("spec");
  if (!rng) return null_arg("rng");
  if (!states) return null_arg("states");
  return guarded([&] {
    const auto path = stablelike::run_chain(spec->spec, x0, n, rng->stream);
    std::memcpy(states, path.states.data(), path.states.size() * sizeof(double));
  });
}

sl_status sl_classify(const sl_spec* spec, const char* classifier_json, uint64_t seed, int threads,
                      char** report_json) {
  if (!spec) return null_arg("spec");
  if (!report_json) return null_arg("report_json");
  return guarded([&] {
    stablelike::ClassifierConfig cfg;
    if (classifier_json) cfg = stablelike::classifier_from_json(parse_json(classifier_json), "");
    cfg.seed = seed;
    cfg.threads = threads > 0 ? threads : 1;
    const auto rep = stablelike::classify(spec->spec, cfg);
    auto j = stablelike::classifier_report_to_json(rep);
    j["classifier"] = stablelike::classifier_to_json(cfg);
    *report_json = dup_string(j.dump());
  });
}

sl_status sl_run_experiment(const char* config_json, int has_seed, uint64_t seed, int threads,
                            const char* out_dir, char** report_json) {
  if (!config_json) return null_arg("config_json");
  return finish_run(stablelike::run_config_text(config_json, overrides(has_seed, seed, threads, out_dir)),
                    report_json);
}

sl_status sl_run_config_file(const char* path, int has_seed, uint64_t seed, int threads, const char* out_dir,
                             char** report_json) {
  if (!path) return null_arg("path");
  return finish_run(stablelike::run_config_file(path, overrides(has_seed, seed, threads, out_dir)), report_json);
}

}  // extern "C"
