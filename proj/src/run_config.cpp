#include "poismix/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace poismix {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : Error(line > 0 ? "config line " + std::to_string(line) + ": " + message : "config: " + message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

template <class T>
T parse_number(const std::string& tok) {
  T v{};
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("invalid value '" + tok + "'");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

template <class T>
Setter scalar(T RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) {
    const auto toks = split(v);
    if (toks.size() != 1) throw std::invalid_argument("expected a single value");
    c.*field = parse_number<T>(toks[0]);
  };
}

template <class T>
Setter list(std::vector<T> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) {
    std::vector<T> out;
    for (const auto& tok : split(v)) out.push_back(parse_number<T>(tok));
    if (out.empty()) throw std::invalid_argument("expected at least one value");
    c.*field = std::move(out);
  };
}

Setter word(std::string RunConfig::*field, std::set<std::string> allowed = {}) {
  return [field, allowed](RunConfig& c, const std::string& v) {
    const auto toks = split(v);
    if (toks.size() != 1) throw std::invalid_argument("expected a single word");
    if (!allowed.empty() && !allowed.count(toks[0])) throw std::invalid_argument("unsupported value '" + toks[0] + "'");
    c.*field = toks[0];
  };
}

const std::vector<std::pair<std::string, Setter>>& schema() {
  static const std::vector<std::pair<std::string, Setter>> s = {
      {"seed", scalar(&RunConfig::seed)},
      {"replicas", scalar(&RunConfig::replicas)},
      {"threads", scalar(&RunConfig::threads)},
      {"out_dir", [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw std::invalid_argument("out_dir must not be empty");
         c.out_dir = v;
       }},
      {"window", [](RunConfig& c, const std::string& v) {
         const auto toks = split(v);
         if (toks.size() != 2) throw std::invalid_argument("window expects two numbers");
         c.window_lo = parse_number<double>(toks[0]);
         c.window_hi = parse_number<double>(toks[1]);
       }},
      {"rate", scalar(&RunConfig::rate)},
      {"resolution", scalar(&RunConfig::resolution)},
      {"verify_resolution", scalar(&RunConfig::verify_resolution)},
      {"exact_samples", scalar(&RunConfig::exact_samples)},
      {"z_max", scalar(&RunConfig::z_max)},
      {"n_list", list(&RunConfig::n_list)},
      {"bootstrap", scalar(&RunConfig::bootstrap)},
      {"probes", word(&RunConfig::probes, {"default", "none"})},
      {"lambda_grid", list(&RunConfig::lambda_grid)},
      {"remainder_replicas", scalar(&RunConfig::remainder_replicas)},
      {"remainder_nodes", scalar(&RunConfig::remainder_nodes)},
      {"family", word(&RunConfig::family, {"normalized_poisson"})},
      {"lambda_list", list(&RunConfig::lambda_list)},
      {"tags", [](RunConfig& c, const std::string& v) {
         static const std::set<std::string> known = {"R3", "R4", "P3", "P4", "S_nu", "S_gamma", "M_nu", "W_nu", "W_gamma"};
         auto toks = split(v);
         for (const auto& t : toks) {
           if (!known.count(t)) throw std::invalid_argument("unknown condition tag '" + t + "'");
         }
         if (toks.empty()) throw std::invalid_argument("expected at least one tag");
         c.tags = std::move(toks);
       }},
      {"resolutions", list(&RunConfig::resolutions)},
      {"kernel_c", scalar(&RunConfig::kernel_c)},
  };
  return s;
}

void validate(const RunConfig& c) {
  if (c.replicas < 1) throw ConfigError(0, "replicas must be >= 1");
  if (!(c.window_lo < c.window_hi)) throw ConfigError(0, "window must satisfy lo < hi");
  if (!(c.rate >= 0.0)) throw ConfigError(0, "rate must be >= 0");
  if (c.resolution < 1 || c.verify_resolution < 1) throw ConfigError(0, "resolution must be >= 1");
  if (std::any_of(c.n_list.begin(), c.n_list.end(), [](std::size_t n) { return n < 1; }))
    throw ConfigError(0, "n_list entries must be >= 1");
  if (std::any_of(c.lambda_list.begin(), c.lambda_list.end(), [](double l) { return !(l > 0.0); }))
    throw ConfigError(0, "lambda_list entries must be > 0");
  if (std::any_of(c.resolutions.begin(), c.resolutions.end(), [](std::size_t r) { return r < 1; }))
    throw ConfigError(0, "resolutions must be >= 1");
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : schema()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_run_config(std::istream& in, const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto& s = schema();
    const auto it = std::find_if(s.begin(), s.end(), [&](const auto& e) { return e.first == key; });
    if (it == s.end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(line, "missing value for key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, "key '" + key + "': " + e.what());
    }
    cfg.echo.emplace_back(key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  return parse_run_config(in, command);
}

}  // namespace poismix
