#pragma once

#include <optional>
#include <string>
#include <vector>

#include "poismix/run_config.hpp"

namespace poismix::cli {

/// One line of results.csv. Absent optionals print as empty fields.
struct ResultRow {
  std::string section;
  std::string n;
  std::string name;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> reference;
  std::optional<double> statistic;
  std::optional<bool> passed;
};

std::string format_csv(const std::vector<ResultRow>& rows);

/// Output root: `--out`, then $POISMIX_OUT_DIR, then `out_dir` from the
/// config, then "results".
std::string resolve_output_root(const std::string& cli_out, const RunConfig& config);

/// Runs `<tool> <command> --config <path> [--out <dir>] [--seed <u64>] [--threads <k>]`.
/// Exit codes: 0 success, 1 failed invariants, 2 usage or config error,
/// 3 numeric failure, 4 other runtime error.
int main(int argc, char** argv);

}  // namespace poismix::cli
