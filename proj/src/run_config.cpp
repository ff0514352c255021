#include "quermass/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace quermass {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
  // std::from_chars for doubles is locale-independent and strict.
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("field '" + key + "': not a number: '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("field '" + key + "': not an integer: '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("field '" + key + "': not an unsigned integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("field '" + key + "': expected true or false, got '" + v + "'");
}

std::string grid_string(const std::vector<double>& g) {
  std::string s;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k) s += ",";
    s += format_double(g[k]);
  }
  return s;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"theta1", [](RunConfig& c, auto& k, auto& v) { c.params.theta1 = to_double(k, v); }},
      {"theta2", [](RunConfig& c, auto& k, auto& v) { c.params.theta2 = to_double(k, v); }},
      {"beta", [](RunConfig& c, auto& k, auto& v) { c.params.beta = to_double(k, v); }},
      {"z", [](RunConfig& c, auto& k, auto& v) { c.params.z = to_double(k, v); }},
      {"R0", [](RunConfig& c, auto& k, auto& v) { c.params.R0 = to_double(k, v); }},
      {"R1", [](RunConfig& c, auto& k, auto& v) { c.params.R1 = to_double(k, v); }},
      {"radius_law",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "point") c.params.radius_law = RadiusLaw::PointMass;
         else if (v == "uniform") c.params.radius_law = RadiusLaw::Uniform;
         else throw ConfigError("field '" + k + "': expected point or uniform, got '" + v + "'");
       }},
      {"delta", [](RunConfig& c, auto& k, auto& v) { c.delta = to_double(k, v); }},
      {"L", [](RunConfig& c, auto& k, auto& v) { c.L = to_long(k, v); }},
      {"allow_inadmissible", [](RunConfig& c, auto& k, auto& v) { c.allow_inadmissible = to_bool(k, v); }},
      {"theta1_delta",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "default") c.theta1_delta.reset();
         else c.theta1_delta = to_double(k, v);
       }},
      {"window",
       [](RunConfig& c, auto& k, auto& v) { c.window_width = c.window_height = to_long(k, v); }},
      {"window_width", [](RunConfig& c, auto& k, auto& v) { c.window_width = to_long(k, v); }},
      {"window_height", [](RunConfig& c, auto& k, auto& v) { c.window_height = to_long(k, v); }},
      {"bc", [](RunConfig& c, auto&, auto& v) { c.bc = v; }},
      {"sweeps", [](RunConfig& c, auto& k, auto& v) { c.sweeps = to_long(k, v); }},
      {"burn_in", [](RunConfig& c, auto& k, auto& v) { c.burn_in = to_long(k, v); }},
      {"thin", [](RunConfig& c, auto& k, auto& v) { c.thin = to_long(k, v); }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_u64(k, v); }},
      {"threads", [](RunConfig& c, auto& k, auto& v) { c.threads = static_cast<int>(to_long(k, v)); }},
      {"p_birth", [](RunConfig& c, auto& k, auto& v) { c.p_birth = to_double(k, v); }},
      {"p_death", [](RunConfig& c, auto& k, auto& v) { c.p_death = to_double(k, v); }},
      {"p_move", [](RunConfig& c, auto& k, auto& v) { c.p_move = to_double(k, v); }},
      {"move_scale", [](RunConfig& c, auto& k, auto& v) { c.move_scale = to_double(k, v); }},
      {"validate_every", [](RunConfig& c, auto& k, auto& v) { c.validate_every = to_long(k, v); }},
      {"snapshot_every", [](RunConfig& c, auto& k, auto& v) { c.snapshot_every = to_long(k, v); }},
      {"s_grid",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.s_grid = parse_grid(v);
         } catch (const ConfigError& e) {
           throw ConfigError("field '" + k + "': " + e.what());
         }
       }},
      {"z_grid",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.z_grid = parse_grid(v);
         } catch (const ConfigError& e) {
           throw ConfigError("field '" + k + "': " + e.what());
         }
       }},
      {"contour_norm", [](RunConfig& c, auto&, auto& v) { c.contour_norm = v; }},
      {"check_labels", [](RunConfig& c, auto& k, auto& v) { c.check_labels = to_bool(k, v); }},
      {"snapshots", [](RunConfig& c, auto&, auto& v) { c.snapshots = v; }},
      {"igamma_samples", [](RunConfig& c, auto& k, auto& v) { c.igamma_samples = to_long(k, v); }},
      {"tau", [](RunConfig& c, auto& k, auto& v) { c.tau = to_double(k, v); }},
      {"l0", [](RunConfig& c, auto& k, auto& v) { c.l0 = to_long(k, v); }},
      {"Lmax", [](RunConfig& c, auto& k, auto& v) { c.Lmax = to_long(k, v); }},
      {"dimer_w", [](RunConfig& c, auto& k, auto& v) { c.dimer_w = to_double(k, v); }},
      {"K",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "default") c.K.reset();
         else c.K = to_double(k, v);
       }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
  };
  return table;
}

void apply(RunConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    it->second(c, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

RunConfig parse_json_config(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
  const nlohmann::json& cfg = j.contains("config") ? j["config"] : j;
  if (!cfg.is_object()) throw ConfigError(source + ": expected a JSON object of settings");
  RunConfig c;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string v;
    if (it->is_string()) v = it->get<std::string>();
    else if (it->is_boolean()) v = it->get<bool>() ? "true" : "false";
    else if (it->is_number_unsigned()) v = std::to_string(it->get<std::uint64_t>());
    else if (it->is_number_integer()) v = std::to_string(it->get<long long>());
    else if (it->is_number()) v = format_double(it->get<double>());
    else throw ConfigError(source + ": field '" + it.key() + "' has an unsupported JSON type");
    apply(c, it.key(), v, source);
  }
  return c;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  std::vector<double> g;
  if (t.empty()) return g;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
    if (parts.size() != 3) throw ConfigError("range grid must be lo:hi:step");
    const double lo = to_double("grid", parts[0]), hi = to_double("grid", parts[1]),
                 step = to_double("grid", parts[2]);
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("range grid needs hi >= lo and step > 0");
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 100000) throw ConfigError("range grid has too many nodes");
    for (long k = 0; k < n; ++k) {
      // Round to 12 significant digits so 0.7 + 3 * 0.1 reads back as 1.
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", lo + static_cast<double>(k) * step);
      g.push_back(std::strtod(buf, nullptr));
    }
    return g;
  }
  std::stringstream ss(t);
  for (std::string part; std::getline(ss, part, ',');) g.push_back(to_double("grid", trim(part)));
  return g;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return parse_json_config(text, source);

  // Header mode: a file written by this program; only its "# key = value"
  // lines inside the marked block count.
  bool header_mode = false;
  {
    std::stringstream ss(text);
    std::string first;
    std::getline(ss, first);
    header_mode = trim(first) == "# quermass config";
  }

  RunConfig c;
  std::stringstream ss(text);
  long lineno = 0;
  for (std::string raw; std::getline(ss, raw);) {
    ++lineno;
    std::string line = raw;
    if (header_mode) {
      if (lineno == 1) continue;
      if (line.rfind("# ", 0) != 0) break;  // end of the header block
      line = line.substr(2);
      if (trim(line) == "end config") break;
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    apply(c, key, value, where);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Tiling RunConfig::tiling() const { return Tiling::for_params(params, delta, L); }

TileWindow RunConfig::window() const { return {0, 0, window_width - 1, window_height - 1}; }

BoundaryCondition RunConfig::boundary() const {
  if (bc == "wired0") return BoundaryCondition::wired(0);
  if (bc == "wired1") return BoundaryCondition::wired(1);
  return BoundaryCondition::free_bc();
}

ChainSettings RunConfig::chain() const {
  ChainSettings cs;
  cs.sweeps = sweeps;
  cs.options.p_birth = p_birth;
  cs.options.p_death = p_death;
  cs.options.p_move = p_move;
  cs.options.move_scale = move_scale;
  cs.options.burn_in = burn_in;
  cs.options.thin = thin;
  cs.options.validate_every = validate_every;
  cs.options.snapshot_every = snapshot_every;
  return cs;
}

CorrectnessNorm RunConfig::norm() const {
  return contour_norm == "sup" ? CorrectnessNorm::Sup : CorrectnessNorm::Euclidean;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw ConfigError("field '" + field + "': " + msg);
  };
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    std::string msg = e.what();
    std::string field = msg.substr(0, msg.find(' '));
    if (setters().count(field) == 0) field = "params";
    fail(field, msg);
  }
  if (c.delta < 0.0 || !std::isfinite(c.delta)) fail("delta", "must be >= 0 (0 selects the default)");
  if (c.L < 0) fail("L", "must be >= 0 (0 selects the default)");
  const Tiling t = c.tiling();
  if (!c.allow_inadmissible && !t.admissible(c.params))
    fail(c.delta > 0.0 ? "delta" : "L",
         "tiling violates delta <= R0/(2 sqrt 2) or delta L >= 2 R1 (set allow_inadmissible = true to run anyway)");
  if (c.window_width < 1) fail("window_width", "must be at least one tile");
  if (c.window_height < 1) fail("window_height", "must be at least one tile");
  if (c.bc != "free" && c.bc != "wired0" && c.bc != "wired1") fail("bc", "expected free, wired0 or wired1");
  if (c.sweeps < 1) fail("sweeps", "must be >= 1");
  if (c.burn_in < 0) fail("burn_in", "must be >= 0");
  if (c.thin < 1) fail("thin", "must be >= 1");
  if (c.threads < 1) fail("threads", "must be >= 1");
  for (auto [name, v] : {std::pair{"p_birth", c.p_birth}, {"p_death", c.p_death}, {"p_move", c.p_move}})
    if (!(v >= 0.0) || !std::isfinite(v)) fail(name, "must be a nonnegative probability");
  if (!(c.p_birth > 0.0) || !(c.p_death > 0.0)) fail("p_birth", "birth and death proposals are both required");
  if (!(c.p_birth + c.p_death + c.p_move > 0.0)) fail("p_move", "proposal weights sum to zero");
  if (c.move_scale < 0.0) fail("move_scale", "must be >= 0");
  if (c.validate_every < 0) fail("validate_every", "must be >= 0");
  if (c.snapshot_every < 0) fail("snapshot_every", "must be >= 0");
  for (auto [name, g] : {std::pair{"s_grid", &c.s_grid}, {"z_grid", &c.z_grid}})
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (!((*g)[k] > 0.0) || !std::isfinite((*g)[k])) fail(name, "values must be positive");
      if (k > 0 && !((*g)[k] > (*g)[k - 1])) fail(name, "values must be increasing");
    }
  if (c.contour_norm != "euclidean" && c.contour_norm != "sup") fail("contour_norm", "expected euclidean or sup");
  if (c.igamma_samples < 0) fail("igamma_samples", "must be >= 0");
  if (!std::isfinite(c.tau)) fail("tau", "must be finite");
  if (c.l0 < 1) fail("l0", "must be >= 1");
  if (c.Lmax < 1) fail("Lmax", "must be >= 1");
  if (!(c.dimer_w >= 0.0) || !std::isfinite(c.dimer_w)) fail("dimer_w", "must be >= 0");
  if (c.K && !(*c.K > 0.0)) fail("K", "must be > 0");
  if (c.theta1_delta && !(*c.theta1_delta > 0.0)) fail("theta1_delta", "must be > 0");
  if (c.sweeps / c.thin < 10) fail("sweeps", "fewer than 10 recorded sweeps after thinning");
}

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c) {
  const Tiling t = c.tiling();
  std::vector<std::pair<std::string, std::string>> e = {
      {"theta1", format_double(c.params.theta1)},
      {"theta2", format_double(c.params.theta2)},
      {"beta", format_double(c.params.beta)},
      {"z", format_double(c.params.z)},
      {"R0", format_double(c.params.R0)},
      {"R1", format_double(c.params.R1)},
      {"radius_law", c.params.radius_law == RadiusLaw::PointMass ? "point" : "uniform"},
      {"delta", format_double(t.delta)},
      {"L", std::to_string(t.L)},
      {"allow_inadmissible", c.allow_inadmissible ? "true" : "false"},
      {"theta1_delta", c.theta1_delta ? format_double(*c.theta1_delta) : "default"},
      {"window_width", std::to_string(c.window_width)},
      {"window_height", std::to_string(c.window_height)},
      {"bc", c.bc},
      {"sweeps", std::to_string(c.sweeps)},
      {"burn_in", std::to_string(c.burn_in)},
      {"thin", std::to_string(c.thin)},
      {"seed", std::to_string(c.seed)},
      {"p_birth", format_double(c.p_birth)},
      {"p_death", format_double(c.p_death)},
      {"p_move", format_double(c.p_move)},
      {"move_scale", format_double(c.move_scale)},
      {"validate_every", std::to_string(c.validate_every)},
      {"snapshot_every", std::to_string(c.snapshot_every)},
      {"s_grid", grid_string(c.s_grid)},
      {"z_grid", grid_string(c.z_grid)},
      {"contour_norm", c.contour_norm},
      {"check_labels", c.check_labels ? "true" : "false"},
      {"snapshots", c.snapshots},
      {"igamma_samples", std::to_string(c.igamma_samples)},
      {"tau", format_double(c.tau)},
      {"l0", std::to_string(c.l0)},
      {"Lmax", std::to_string(c.Lmax)},
      {"dimer_w", format_double(c.dimer_w)},
      {"K", c.K ? format_double(*c.K) : "default"},
  };
  return e;
}

std::string config_header(const RunConfig& c) {
  std::string s = "# quermass config\n";
  for (const auto& [k, v] : resolved_entries(c)) s += "# " + k + " = " + v + "\n";
  s += "# end config\n";
  return s;
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : resolved_entries(c)) j[k] = v;
  return j;
}

}  // namespace quermass
