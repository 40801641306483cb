#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablelike/chain_models.hpp"
#include "stablelike/quadrature.hpp"
#include "stablelike/recurrence_lab.hpp"

namespace stablelike {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Strict reader over one JSON object. Every accessor records the key; finish()
// rejects keys that were never read. Errors are ConfigError carrying a JSON
// pointer to the offending field.
class ConfigReader {
 public:
  ConfigReader(const Json& obj, std::string pointer);

  bool has(const std::string& key) const;
  std::string pointer(const std::string& key) const;
  const Json& raw(const std::string& key);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::uint64_t unsigned_int(const std::string& key);
  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  ConfigReader object(const std::string& key);

  // Range helpers; throw ConfigError at the field's pointer.
  void require(bool ok, const std::string& key, const std::string& message) const;

  void finish() const;
  const std::string& base() const { return pointer_; }

 private:
  const Json& at(const std::string& key);

  const Json& obj_;
  std::string pointer_;
  std::set<std::string> used_;
};

// ChainSpec <-> JSON. Profiles are a bare number (constant) or an object with
// a "type" field; see docs/formats.md.
OrderedJson profile_to_json(const Profile& p);
Profile profile_from_json(const Json& j, const std::string& pointer);
OrderedJson spec_to_json(const ChainSpec& spec);
ChainSpec spec_from_json(const Json& j, const std::string& pointer);

OrderedJson classifier_to_json(const ClassifierConfig& c);
// Fields absent from j keep the values in `base`. seed and threads are not read.
ClassifierConfig classifier_from_json(const Json& j, const std::string& pointer,
                                      ClassifierConfig base = {});

OrderedJson classifier_report_to_json(const ClassifierReport& rep);

OrderedJson quad_to_json(const QuadConfig& q);
QuadConfig quad_from_json(const Json& j, const std::string& pointer);

// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Shortest round-trip text for a double; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

}  // namespace stablelike
