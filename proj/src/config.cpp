#include "stablelike/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "stablelike/errors.hpp"

namespace stablelike {

namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

const char* type_name(const Json& j) { return j.type_name(); }

}  // namespace

ConfigReader::ConfigReader(const Json& obj, std::string pointer)
    : obj_(obj), pointer_(std::move(pointer)) {
  if (!obj_.is_object())
    throw ConfigError(pointer_.empty() ? "/" : pointer_,
                      std::string("expected an object, got ") + type_name(obj_));
}

bool ConfigReader::has(const std::string& key) const { return obj_.contains(key); }

std::string ConfigReader::pointer(const std::string& key) const {
  return pointer_ + "/" + escape_pointer_token(key);
}

const Json& ConfigReader::at(const std::string& key) {
  used_.insert(key);
  if (!obj_.contains(key)) throw ConfigError(pointer(key), "required field is missing");
  return obj_.at(key);
}

const Json& ConfigReader::raw(const std::string& key) { return at(key); }

double ConfigReader::number(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError(pointer(key), std::string("expected a number, got ") + type_name(v));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(pointer(key), "number must be finite");
  return d;
}

double ConfigReader::number(const std::string& key, double fallback) {
  used_.insert(key);
  return has(key) ? number(key) : fallback;
}

std::uint64_t ConfigReader::unsigned_int(const std::string& key) {
  const Json& v = at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(pointer(key), "expected a non-negative integer");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    // Accept 1e5-style literals when they are exact integers.
    const double d = v.get<double>();
    if (d >= 0.0 && d < 9.007199254740992e15 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(pointer(key), std::string("expected a non-negative integer, got ") + v.dump());
}

std::uint64_t ConfigReader::unsigned_int(const std::string& key, std::uint64_t fallback) {
  used_.insert(key);
  return has(key) ? unsigned_int(key) : fallback;
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const Json& v = obj_.at(key);
  if (!v.is_boolean()) throw ConfigError(pointer(key), std::string("expected a boolean, got ") + type_name(v));
  return v.get<bool>();
}

std::string ConfigReader::string(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError(pointer(key), std::string("expected a string, got ") + type_name(v));
  return v.get<std::string>();
}

std::string ConfigReader::string(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  return has(key) ? string(key) : fallback;
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_array()) throw ConfigError(pointer(key), std::string("expected an array, got ") + type_name(v));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
      throw ConfigError(pointer(key) + "/" + std::to_string(i), "expected a finite number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> ConfigReader::numbers(const std::string& key, const std::vector<double>& fallback) {
  used_.insert(key);
  return has(key) ? numbers(key) : fallback;
}

ConfigReader ConfigReader::object(const std::string& key) { return ConfigReader(at(key), pointer(key)); }

void ConfigReader::require(bool ok, const std::string& key, const std::string& message) const {
  if (!ok) throw ConfigError(pointer(key), message);
}

void ConfigReader::finish() const {
  for (const auto& item : obj_.items())
    if (!used_.count(item.key())) throw ConfigError(pointer(item.key()), "unknown field");
}

// ------------------------------------------------------------------ profiles

OrderedJson profile_to_json(const Profile& p) {
  const auto& v = p.params();
  OrderedJson j;
  switch (p.kind()) {
    case ProfileKind::Constant:
      return OrderedJson(v[0]);
    case ProfileKind::Step:
      j["type"] = "step";
      j["left"] = v[0];
      j["right"] = v[1];
      return j;
    case ProfileKind::SmoothedStep:
      j["type"] = "smoothed_step";
      j["left"] = v[0];
      j["right"] = v[1];
      j["k"] = v[2];
      return j;
    case ProfileKind::PeriodicPlateau:
      j["type"] = "periodic_plateau";
      j["tau"] = v[0];
      j["base"] = v[1];
      j["peak"] = v[2];
      j["plateau_fraction"] = v[3];
      j["ramp_fraction"] = v[4];
      return j;
    case ProfileKind::PeriodicTable: {
      j["type"] = "periodic_table";
      j["tau"] = v[0];
      j["values"] = p.table();
      if (auto pl = p.plateau()) {
        OrderedJson q;
        q["value"] = pl->value;
        q["start"] = pl->start;
        q["length"] = pl->length;
        j["plateau"] = q;
      }
      return j;
    }
  }
  return j;
}

Profile profile_from_json(const Json& j, const std::string& pointer) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(pointer, "number must be finite");
    return Profile::constant(v);
  }
  ConfigReader r(j, pointer);
  const std::string type = r.string("type");
  try {
    Profile p = Profile::constant(0.0);
    if (type == "constant") {
      p = Profile::constant(r.number("value"));
    } else if (type == "step") {
      p = Profile::step(r.number("left"), r.number("right"));
    } else if (type == "smoothed_step") {
      const double left = r.number("left"), right = r.number("right");
      p = Profile::smoothed_step(left, right, r.number("k"));
    } else if (type == "periodic_plateau") {
      const double tau = r.number("tau"), base = r.number("base"), peak = r.number("peak");
      const double pf = r.number("plateau_fraction"), rf = r.number("ramp_fraction", 0.1);
      p = Profile::periodic_plateau(tau, base, peak, pf, rf);
    } else if (type == "periodic_table") {
      const double tau = r.number("tau");
      auto values = r.numbers("values");
      std::optional<Plateau> plateau;
      if (r.has("plateau")) {
        ConfigReader q = r.object("plateau");
        plateau = Plateau{q.number("value"), q.number("start"), q.number("length")};
        q.finish();
      }
      p = Profile::periodic_table(tau, std::move(values), plateau);
    } else {
      throw ConfigError(r.pointer("type"), "unknown profile type '" + type + "'");
    }
    r.finish();
    return p;
  } catch (const PreconditionError& e) {
    throw ConfigError(pointer, e.what());
  }
}

// --------------------------------------------------------------------- specs

OrderedJson spec_to_json(const ChainSpec& spec) {
  OrderedJson j;
  j["kind"] = kind_name(spec);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StableKernel>) {
          j["alpha"] = profile_to_json(s.alpha);
          j["gamma"] = profile_to_json(s.gamma);
        } else if constexpr (std::is_same_v<T, StepChain>) {
          j["alpha"] = s.alpha;
          j["beta"] = s.beta;
          j["gamma"] = s.gamma;
          j["delta"] = s.delta;
        } else if constexpr (std::is_same_v<T, SmoothedStep>) {
          j["alpha"] = s.alpha;
          j["beta"] = s.beta;
          j["gamma"] = s.gamma;
          j["delta"] = s.delta;
          j["k"] = s.k;
        } else if constexpr (std::is_same_v<T, PeriodicPareto>) {
          j["alpha"] = profile_to_json(s.alpha);
          j["tau"] = s.tau;
        } else {
          j["alphas"] = s.alphas;
          j["J"] = s.J;
        }
      },
      spec);
  return j;
}

ChainSpec spec_from_json(const Json& j, const std::string& pointer) {
  ConfigReader r(j, pointer);
  const std::string kind = r.string("kind");
  std::optional<ChainSpec> out;
  try {
    if (kind == "stable_kernel") {
      Profile a = profile_from_json(r.raw("alpha"), r.pointer("alpha"));
      Profile g = r.has("gamma") ? profile_from_json(r.raw("gamma"), r.pointer("gamma"))
                                 : Profile::constant(1.0);
      r.require(a.lower() > 0.0 && a.upper() <= 2.0, "alpha", "alpha profile must take values in (0,2]");
      if (r.has("gamma")) r.require(g.lower() > 0.0, "gamma", "gamma profile must be positive");
      out = make_stable_kernel(a, g);
    } else if (kind == "step") {
      const double a = r.number("alpha"), b = r.number("beta");
      const double g = r.number("gamma", 1.0), d = r.number("delta", 1.0);
      out = make_step_chain(a, b, g, d);
    } else if (kind == "smoothed_step") {
      const double a = r.number("alpha"), b = r.number("beta");
      const double g = r.number("gamma", 1.0), d = r.number("delta", 1.0);
      out = make_smoothed_step(a, b, g, d, r.number("k"));
    } else if (kind == "periodic_pareto") {
      Profile a = profile_from_json(r.raw("alpha"), r.pointer("alpha"));
      r.require(a.lower() > 0.0 && a.upper() < 2.0, "alpha", "alpha profile must take values in (0,2)");
      out = make_periodic_pareto(a, r.number("tau"));
    } else if (kind == "discrete") {
      auto alphas = r.numbers("alphas");
      const auto J = r.unsigned_int("J", 1000);
      r.require(J >= 1 && J <= 100000000, "J", "J must lie in [1, 1e8]");
      out = make_discrete_chain(std::move(alphas), static_cast<long>(J));
    } else {
      throw ConfigError(r.pointer("kind"), "unknown spec kind '" + kind + "'");
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(pointer, e.what());
  }
  r.finish();
  return *out;
}

// ---------------------------------------------------------------- classifier

OrderedJson classifier_to_json(const ClassifierConfig& c) {
  OrderedJson j;
  j["horizon"] = c.horizon;
  j["n_paths"] = c.n_paths;
  j["radius"] = c.radius;
  j["burn_in"] = c.burn_in;
  j["theta_rec"] = c.theta_rec;
  j["theta_tr"] = c.theta_tr;
  j["z_min"] = c.z_min;
  j["min_crossings"] = c.min_crossings;
  j["escape_cap"] = c.escape_cap;
  j["escape_points"] = c.escape_points;
  j["landing_floor"] = c.landing_floor;
  j["x0"] = c.x0;
  return j;
}

ClassifierConfig classifier_from_json(const Json& j, const std::string& pointer, ClassifierConfig c) {
  ConfigReader r(j, pointer);
  c.horizon = r.unsigned_int("horizon", c.horizon);
  c.n_paths = r.unsigned_int("n_paths", c.n_paths);
  c.radius = r.number("radius", c.radius);
  c.burn_in = r.number("burn_in", c.burn_in);
  c.theta_rec = r.number("theta_rec", c.theta_rec);
  c.theta_tr = r.number("theta_tr", c.theta_tr);
  c.z_min = r.number("z_min", c.z_min);
  c.min_crossings = r.unsigned_int("min_crossings", c.min_crossings);
  c.escape_cap = r.number("escape_cap", c.escape_cap);
  c.escape_points = r.unsigned_int("escape_points", c.escape_points);
  c.landing_floor = r.number("landing_floor", c.landing_floor);
  c.x0 = r.number("x0", c.x0);
  r.finish();
  r.require(c.horizon >= 1 && c.horizon <= 100000000, "horizon", "horizon must lie in [1, 1e8]");
  r.require(c.n_paths >= 2 && c.n_paths <= 1000000, "n_paths", "n_paths must lie in [2, 1e6]");
  r.require(c.radius > 0.0, "radius", "radius must be > 0");
  r.require(c.burn_in > 0.0 && c.burn_in < 1.0, "burn_in", "burn_in must lie in (0,1)");
  r.require(c.theta_tr < c.theta_rec, "theta_tr", "theta_tr must be < theta_rec");
  r.require(c.z_min >= 0.0, "z_min", "z_min must be >= 0");
  r.require(c.escape_cap > 0.0, "escape_cap", "escape_cap must be > 0");
  r.require(c.escape_points >= 2 && c.escape_points <= 10000, "escape_points",
            "escape_points must lie in [2, 1e4]");
  r.require(c.landing_floor > 0.0, "landing_floor", "landing_floor must be > 0");
  return c;
}

OrderedJson classifier_report_to_json(const ClassifierReport& rep) {
  OrderedJson j;
  j["verdict"] = verdict_name(rep.verdict);
  j["margin"] = rep.margin;
  j["reason"] = rep.reason;
  j["contraction"] = rep.contraction;
  j["contraction_se"] = rep.contraction_se;
  j["crossings"] = rep.crossings;
  j["occupation"] = rep.occupation;
  j["late_return"] = rep.late_return;
  j["escape_steps"] = rep.escape_steps;
  j["escape_curve"] = rep.escape_curve;
  return j;
}

// ---------------------------------------------------------------- quadrature

OrderedJson quad_to_json(const QuadConfig& q) {
  OrderedJson j;
  j["abs_tol"] = q.abs_tol;
  j["rel_tol"] = q.rel_tol;
  j["max_subdivisions"] = q.max_subdivisions;
  j["max_panels"] = q.max_panels;
  return j;
}

QuadConfig quad_from_json(const Json& j, const std::string& pointer) {
  ConfigReader r(j, pointer);
  QuadConfig q;
  q.abs_tol = r.number("abs_tol", q.abs_tol);
  q.rel_tol = r.number("rel_tol", q.rel_tol);
  const auto subdiv = r.unsigned_int("max_subdivisions", static_cast<std::uint64_t>(q.max_subdivisions));
  const auto panels = r.unsigned_int("max_panels", static_cast<std::uint64_t>(q.max_panels));
  r.finish();
  r.require(q.abs_tol > 0.0 && q.abs_tol < 1.0, "abs_tol", "abs_tol must lie in (0,1)");
  r.require(q.rel_tol >= 0.0 && q.rel_tol < 1.0, "rel_tol", "rel_tol must lie in [0,1)");
  r.require(subdiv >= 1 && subdiv <= 100000, "max_subdivisions", "max_subdivisions must lie in [1, 1e5]");
  r.require(panels >= 1 && panels <= 100000000, "max_panels", "max_panels must lie in [1, 1e8]");
  q.max_subdivisions = static_cast<int>(subdiv);
  q.max_panels = static_cast<int>(panels);
  return q;
}

// ------------------------------------------------------------------- helpers

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace stablelike
