#include "cvm/config.hpp"

#include "cvm/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace cvm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream in(value);
  while (std::getline(in, current, ',')) {
    std::string t = trim(current);
    if (!t.empty()) items.push_back(std::move(t));
  }
  return items;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key, "expected an integer for '" + key + "', got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number for '" + key + "', got '" + value + "'");
}

Rational parse_exact(const std::string& key, const std::string& value) {
  try {
    return parse_rational(value);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a rational such as 1/20 or 0.05 for '" + key + "', got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true or false for '" + key + "', got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.F", [](RunConfig& c, const auto& k, const auto& v) { c.opinions = parse_integer<int>(k, v); }},
      {"model.theta", [](RunConfig& c, const auto& k, const auto& v) { c.theta = parse_integer<int>(k, v); }},
      {"density.kind",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v != "uniform" && v != "symmetric" && v != "explicit")
           throw ConfigError(k, "density.kind must be uniform, symmetric or explicit, got '" + v + "'");
         c.density_kind = v;
       }},
      {"density.rho1", [](RunConfig& c, const auto& k, const auto& v) { c.rho1 = parse_exact(k, v); }},
      {"density.rho2", [](RunConfig& c, const auto& k, const auto& v) { c.rho2 = parse_exact(k, v); }},
      {"density.values",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.density_values.clear();
         for (const auto& item : split_list(v)) c.density_values.push_back(parse_exact(k, item));
       }},
      {"graph.topology",
       [](RunConfig& c, const auto& k, const auto& v) {
         try {
           c.topology = parse_topology(v);
         } catch (const std::exception&) {
           throw ConfigError(k, "graph.topology must be cycle, path or complete, got '" + v + "'");
         }
         if (c.topology == Topology::Custom)
           throw ConfigError(k, "custom graphs cannot be configured from text");
       }},
      {"graph.size", [](RunConfig& c, const auto& k, const auto& v) { c.graph_size = parse_integer<int>(k, v); }},
      {"run.t_max", [](RunConfig& c, const auto& k, const auto& v) { c.t_max = parse_real(k, v); }},
      {"run.event_budget",
       [](RunConfig& c, const auto& k, const auto& v) { c.event_budget = parse_integer<std::uint64_t>(k, v); }},
      {"run.stop",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v == "horizon") c.stop = StopMode::Horizon;
         else if (v == "absorption") c.stop = StopMode::Absorption;
         else if (v == "consensus") c.stop = StopMode::Consensus;
         else throw ConfigError(k, "run.stop must be horizon, absorption or consensus, got '" + v + "'");
       }},
      {"run.replicates",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (!v.empty() && v.front() == '-') throw ConfigError(k, "run.replicates must be positive");
         c.replicates = parse_integer<std::uint64_t>(k, v);
       }},
      {"run.seed", [](RunConfig& c, const auto& k, const auto& v) { c.seed = parse_integer<std::uint64_t>(k, v); }},
      {"run.threads", [](RunConfig& c, const auto& k, const auto& v) { c.threads = parse_integer<unsigned>(k, v); }},
      {"observers.times",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.times.clear();
         if (v == "geometric") return;
         for (const auto& item : split_list(v)) c.times.push_back(parse_real(k, item));
       }},
      {"observers.quantities",
       [](RunConfig& c, const auto& k, const auto& v) {
         static const std::vector<std::string> allowed{"interface_density", "active_interface_density",
                                                       "mean_abs_xi", "blockade_density", "opinion_counts"};
         c.quantities = split_list(v);
         for (const auto& q : c.quantities)
           if (std::find(allowed.begin(), allowed.end(), q) == allowed.end())
             throw ConfigError(k, "unknown observer quantity '" + q + "'");
       }},
      {"output.directory", [](RunConfig& c, const auto&, const auto& v) { c.output_directory = v; }},
      {"output.formats",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.formats = split_list(v);
         for (const auto& f : c.formats)
           if (f != "csv" && f != "ppm") throw ConfigError(k, "unknown output format '" + f + "'");
       }},
      {"cluster.pairs",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.pairs.clear();
         for (const auto& item : split_list(v)) {
           const auto dash = item.find('-');
           if (dash == std::string::npos) throw ConfigError(k, "pairs look like 0-1, 0-10");
           c.pairs.emplace_back(parse_integer<int>(k, trim(item.substr(0, dash))),
                                parse_integer<int>(k, trim(item.substr(dash + 1))));
         }
       }},
      {"ld.p", [](RunConfig& c, const auto& k, const auto& v) { c.ld_p = parse_real(k, v); }},
      {"ld.epsilon", [](RunConfig& c, const auto& k, const auto& v) { c.ld_epsilon = parse_real(k, v); }},
      {"ld.lengths",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.ld_lengths.clear();
         for (const auto& item : split_list(v)) c.ld_lengths.push_back(parse_integer<int>(k, item));
       }},
      {"spacetime.rows", [](RunConfig& c, const auto& k, const auto& v) { c.spacetime_rows = parse_integer<int>(k, v); }},
      {"spacetime.interfaces",
       [](RunConfig& c, const auto& k, const auto& v) { c.spacetime_interfaces = parse_bool(k, v); }},
  };
  return table;
}

} // namespace

std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(key, "unknown configuration key '" + key + "'");
  it->second(config, key, value);
  config.assignments[key] = value;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("", "override must look like section.key=value: '" + assignment + "'");
  apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("", "line " + std::to_string(number) + ": unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(number) + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    apply_setting(base, key, trim(std::string_view(t).substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), std::move(base));
}

DensityVector RunConfig::density() const {
  try {
    if (density_kind == "uniform") return DensityVector::uniform(opinions);
    if (density_kind == "symmetric") {
      if (!rho2) throw ConfigError("density.rho2", "symmetric density needs density.rho2");
      const Rational r1 = rho1 ? *rho1 : (1 - (opinions - 2) * *rho2) / 2;
      return DensityVector::symmetric(opinions, r1, *rho2);
    }
    if (static_cast<int>(density_values.size()) != opinions)
      throw ConfigError("density.values", "density.values needs exactly F = " + std::to_string(opinions) + " entries");
    return DensityVector::from_values(density_values);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("density", std::string("invalid density: ") + e.what());
  }
}

std::shared_ptr<const Graph> RunConfig::graph() const {
  try {
    switch (topology) {
      case Topology::Cycle: return std::make_shared<const Graph>(Graph::cycle(graph_size));
      case Topology::Path: return std::make_shared<const Graph>(Graph::path(graph_size));
      case Topology::Complete: return std::make_shared<const Graph>(Graph::complete(graph_size));
      case Topology::Custom: break;
    }
  } catch (const std::exception& e) {
    throw ConfigError("graph", std::string("invalid graph: ") + e.what());
  }
  throw ConfigError("graph.topology", "custom graphs cannot be configured from text");
}

std::vector<double> RunConfig::sample_times() const {
  return times.empty() ? geometric_times(t_max) : times;
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("run.seed", "a master seed is required (run.seed or --seed)");
  return *seed;
}

void RunConfig::validate() const {
  try {
    (void)params();
  } catch (const std::exception& e) {
    throw ConfigError("model", std::string("invalid model: ") + e.what());
  }
  (void)density();
  (void)graph();
  if (replicates == 0) throw ConfigError("run.replicates", "run.replicates must be positive");
  if (!(t_max >= 0.0)) throw ConfigError("run.t_max", "run.t_max must be nonnegative");
  if (event_budget == 0) throw ConfigError("run.event_budget", "run.event_budget must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || (k > 0 && !(times[k] > times[k - 1])))
      throw ConfigError("observers.times", "observer times must be nonnegative and strictly increasing");
    if (times[k] > t_max) throw ConfigError("observers.times", "observer times must not exceed run.t_max");
  }
  if (spacetime_rows < 1) throw ConfigError("spacetime.rows", "spacetime.rows must be positive");
}

std::string canonical_text(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.assignments) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(StopMode mode) {
  switch (mode) {
    case StopMode::Horizon: return "horizon";
    case StopMode::Absorption: return "absorption";
    case StopMode::Consensus: return "consensus";
  }
  return "horizon";
}

} // namespace cvm
