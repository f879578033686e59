#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "poismix/point_process.hpp"

namespace poismix {

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Settings of one CLI run. Every key of the plain `key = value` file maps
/// to one field; lists are whitespace separated.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 20240601;
  std::size_t replicas = 100000;
  unsigned threads = 0;
  std::string out_dir;

  // Intensity on the window [window_lo, window_hi] (kernels).
  double window_lo = 0.0;
  double window_hi = 1.0;
  double rate = 1.0;
  std::size_t resolution = 1024;

  // verify
  std::size_t verify_resolution = 16;
  std::size_t exact_samples = 200;
  double z_max = 4.0;

  // quadratic
  std::vector<std::size_t> n_list{4, 16, 64};
  std::size_t bootstrap = 200;
  std::string probes = "default";
  std::vector<double> lambda_grid{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  std::size_t remainder_replicas = 0;
  std::size_t remainder_nodes = 256;

  // bounds / conditions
  std::string family = "normalized_poisson";
  std::vector<double> lambda_list{10.0, 100.0, 1000.0, 10000.0};
  std::vector<std::string> tags{"R3", "R4", "P3", "P4", "S_nu", "S_gamma", "M_nu", "W_nu", "W_gamma"};

  // kernels
  std::vector<std::size_t> resolutions{1024, 2048};
  double kernel_c = 0.7;

  /// Keys and raw values in file order.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Parses a config stream; `#` starts a comment. Unknown keys, duplicate
/// keys and malformed values raise ConfigError with the line number.
RunConfig parse_run_config(std::istream& in, const std::string& command);
RunConfig load_run_config(const std::string& path, const std::string& command);

/// The documented keys, in schema order.
const std::vector<std::string>& run_config_keys();

}  // namespace poismix
