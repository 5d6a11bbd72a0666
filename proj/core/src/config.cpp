#include "polyfront/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polyfront/errors.hpp"

namespace polyfront {

namespace {

using json = nlohmann::json;

void allow_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  return number(j.at(key), where + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t n = 0; n < j.size(); ++n) {
    out.push_back(number(j[n], where + "[" + std::to_string(n) + "]"));
  }
  return out;
}

Profile parse_profile(const json& j, const std::string& where,
                      std::uint64_t seed) {
  if (j.is_number()) return Profile::constant(j.get<double>());
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(where + ": expected a number or a typed profile");
  }
  std::string type = j.at("type").get<std::string>();
  try {
    if (type == "constant") {
      allow_keys(j, where, {"type", "value"});
      return Profile::constant(number_at(j, "value", where));
    }
    if (type == "piecewise") {
      allow_keys(j, where, {"type", "breaks", "values"});
      if (!j.contains("breaks") || !j.contains("values")) {
        throw ConfigError(where + ": piecewise needs breaks and values");
      }
      return Profile::piecewise(numbers(j.at("breaks"), where + ".breaks"),
                                numbers(j.at("values"), where + ".values"));
    }
    if (type == "ramp") {
      allow_keys(j, where, {"type", "x0", "x1", "v0", "v1"});
      return Profile::ramp(number_at(j, "x0", where), number_at(j, "x1", where),
                           number_at(j, "v0", where),
                           number_at(j, "v1", where));
    }
    if (type == "bump") {
      allow_keys(j, where, {"type", "center", "width", "base", "peak"});
      return Profile::bump(number_at(j, "center", where),
                           number_at(j, "width", where),
                           number_at(j, "base", where),
                           number_at(j, "peak", where));
    }
    if (type == "random") {
      allow_keys(j, where,
                 {"type", "jumps", "xmin", "xmax", "palette", "seed"});
      if (!j.contains("palette")) {
        throw ConfigError(where + ": random profile needs a palette");
      }
      double jumps = number_at(j, "jumps", where);
      if (jumps < 0 || jumps != static_cast<int>(jumps)) {
        throw ConfigError(where + ".jumps: expected a non-negative integer");
      }
      std::uint64_t s = seed;
      if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
          throw ConfigError(where + ".seed: expected a non-negative integer");
        }
        s = j.at("seed").get<std::uint64_t>();
      }
      return Profile::random_piecewise(
          s, static_cast<int>(jumps), number_at(j, "xmin", where),
          number_at(j, "xmax", where),
          numbers(j.at("palette"), where + ".palette"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": unknown profile type '" + type + "'");
}

json profile_json(const Profile& p) {
  switch (p.kind()) {
    case Profile::Kind::kConstant:
      return {{"type", "constant"}, {"value", p(0.0)}};
    case Profile::Kind::kPiecewise:
      return {{"type", "piecewise"}, {"breaks", p.breaks()},
              {"values", p.values()}};
    case Profile::Kind::kRamp: {
      const auto& q = p.params();
      return {{"type", "ramp"}, {"x0", q[0]}, {"x1", q[1]}, {"v0", q[2]},
              {"v1", q[3]}};
    }
    case Profile::Kind::kBump: {
      const auto& q = p.params();
      return {{"type", "bump"}, {"center", q[0]}, {"width", q[1]},
              {"base", q[2]}, {"peak", q[3]}};
    }
  }
  return nullptr;
}

void check_range(const Profile& p, const std::string& where) {
  if (p.min_value() < 0.0 || p.max_value() > 1.0) {
    throw ConfigError(where + ": values must lie in [0, 1]");
  }
}

}  // namespace

Rect RunConfig::rect() const {
  if (audit_rect) return *audit_rect;
  return {std::min(0.1, T), T, -window, window};
}

std::vector<TestFunction> RunConfig::tests() const {
  if (!test_functions.empty()) return test_functions;
  double hw = 0.5 * window;
  return {{T, -hw, hw}, {T, 0.0, hw}, {T, hw, hw}};
}

std::vector<double> RunConfig::snapshot_times() const {
  if (output_times.empty()) return {T};
  return output_times;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  allow_keys(j, "config",
             {"flux", "initial", "eps", "T", "window", "output_times",
              "entropies", "seed", "max_events", "audit_rect",
              "test_functions"});
  RunConfig cfg;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("flux")) {
    const json& f = j.at("flux");
    allow_keys(f, "flux", {"family", "a0", "a_kappa"});
    if (f.contains("family")) {
      if (!f.at("family").is_string()) {
        throw ConfigError("flux.family: expected a string");
      }
      cfg.flux.family = f.at("family").get<std::string>();
    }
    if (f.contains("a0")) cfg.flux.a0 = number(f.at("a0"), "flux.a0");
    if (f.contains("a_kappa")) {
      cfg.flux.a_kappa = number(f.at("a_kappa"), "flux.a_kappa");
    }
  }
  if (!j.contains("initial")) throw ConfigError("config: missing 'initial'");
  {
    const json& in = j.at("initial");
    allow_keys(in, "initial", {"s", "c", "k"});
    for (const char* key : {"s", "c", "k"}) {
      if (!in.contains(key)) {
        throw ConfigError(std::string("initial: missing '") + key + "'");
      }
    }
    cfg.initial.s = parse_profile(in.at("s"), "initial.s", cfg.seed);
    cfg.initial.c = parse_profile(in.at("c"), "initial.c", cfg.seed + 1);
    cfg.initial.k = parse_profile(in.at("k"), "initial.k", cfg.seed + 2);
    check_range(cfg.initial.s, "initial.s");
    check_range(cfg.initial.c, "initial.c");
    check_range(cfg.initial.k, "initial.k");
  }
  if (j.contains("eps")) {
    cfg.eps = numbers(j.at("eps"), "eps");
    if (cfg.eps.empty()) throw ConfigError("eps: empty list");
    for (std::size_t n = 0; n < cfg.eps.size(); ++n) {
      if (!(cfg.eps[n] > 0.0)) throw ConfigError("eps: values must be > 0");
      if (n > 0 && !(cfg.eps[n] < cfg.eps[n - 1])) {
        throw ConfigError("eps: values must be strictly decreasing");
      }
    }
  }
  if (j.contains("T")) cfg.T = number(j.at("T"), "T");
  if (!(cfg.T > 0.0)) throw ConfigError("T: must be > 0");
  if (j.contains("window")) cfg.window = number(j.at("window"), "window");
  if (!(cfg.window > 0.0)) throw ConfigError("window: must be > 0");
  if (j.contains("output_times")) {
    cfg.output_times = numbers(j.at("output_times"), "output_times");
    for (double t : cfg.output_times) {
      if (t < 0.0 || t > cfg.T) {
        throw ConfigError("output_times: values must lie in [0, T]");
      }
    }
    std::sort(cfg.output_times.begin(), cfg.output_times.end());
  }
  if (j.contains("entropies")) {
    const json& e = j.at("entropies");
    if (!e.is_array()) throw ConfigError("entropies: expected an array");
    cfg.entropies.clear();
    for (const json& id : e) {
      if (!id.is_string()) throw ConfigError("entropies: expected strings");
      cfg.entropies.push_back(id.get<std::string>());
      entropy_by_id(cfg.entropies.back());  // validates the id
    }
  }
  if (j.contains("max_events")) {
    double m = number(j.at("max_events"), "max_events");
    if (m != static_cast<long>(m)) {
      throw ConfigError("max_events: expected an integer");
    }
    cfg.max_events = static_cast<long>(m);
  }
  if (j.contains("audit_rect")) {
    auto r = numbers(j.at("audit_rect"), "audit_rect");
    if (r.size() != 4 || r[0] < 0.0 || r[1] < r[0] || r[1] > cfg.T ||
        r[3] < r[2]) {
      throw ConfigError("audit_rect: expected [t1, t2, x1, x2] inside [0, T]");
    }
    cfg.audit_rect = Rect{r[0], r[1], r[2], r[3]};
  }
  if (j.contains("test_functions")) {
    const json& tf = j.at("test_functions");
    if (!tf.is_array()) throw ConfigError("test_functions: expected an array");
    for (std::size_t n = 0; n < tf.size(); ++n) {
      auto v = numbers(tf[n], "test_functions[" + std::to_string(n) + "]");
      if (v.size() != 3 || !(v[0] > 0.0) || v[0] > cfg.T || !(v[2] > 0.0)) {
        throw ConfigError("test_functions: expected [t1, xc, hw] with "
                          "0 < t1 <= T and hw > 0");
      }
      cfg.test_functions.push_back({v[0], v[1], v[2]});
    }
  }
  make_model(cfg.flux);  // validates the family and its parameters
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& cfg) {
  json j;
  j["flux"] = {{"family", cfg.flux.family},
               {"a0", cfg.flux.a0},
               {"a_kappa", cfg.flux.a_kappa}};
  j["initial"] = {{"s", profile_json(cfg.initial.s)},
                  {"c", profile_json(cfg.initial.c)},
                  {"k", profile_json(cfg.initial.k)}};
  j["eps"] = cfg.eps;
  j["T"] = cfg.T;
  j["window"] = cfg.window;
  if (!cfg.output_times.empty()) j["output_times"] = cfg.output_times;
  j["entropies"] = cfg.entropies;
  j["seed"] = cfg.seed;
  if (cfg.max_events > 0) j["max_events"] = cfg.max_events;
  if (cfg.audit_rect) {
    const Rect& r = *cfg.audit_rect;
    j["audit_rect"] = {r.t1, r.t2, r.x1, r.x2};
  }
  if (!cfg.test_functions.empty()) {
    json tf = json::array();
    for (const TestFunction& t : cfg.test_functions) {
      tf.push_back({t.t1, t.xc, t.hw});
    }
    j["test_functions"] = tf;
  }
  return j.dump(2) + "\n";
}

FluxModel make_model(const FluxConfig& cfg) {
  if (cfg.family != "corey") {
    throw ConfigError("flux.family: unknown family '" + cfg.family + "'");
  }
  // copies share the sampled sup norms, so runs with the same parameters
  // pay for the sampling once per process
  static std::mutex mu;
  static std::map<std::pair<double, double>, FluxModel> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(cfg.a0, cfg.a_kappa);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  try {
    FluxModel m = FluxModel::corey(cfg.a0, cfg.a_kappa);
    cache.emplace(key, m);
    return m;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("flux: ") + e.what());
  }
}

}  // namespace polyfront
