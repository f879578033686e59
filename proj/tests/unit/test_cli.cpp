#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "poismix/cli.hpp"
#include "poismix/run_config.hpp"

using namespace poismix;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text, const std::string& command = "quadratic") {
  std::istringstream in(text);
  return parse_run_config(in, command);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("poismix_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  static std::string prog = "poismix";
  argv.push_back(prog.data());
  for (std::string& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(RunConfig, ParsesKeysAndComments) {
  const RunConfig c = parse("# comment\nseed = 42\nreplicas = 10 # trailing\nn_list = 1 4\nlambda_grid = -1 0.5\n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.replicas, 10u);
  EXPECT_EQ(c.n_list, (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(c.lambda_grid, (std::vector<double>{-1, 0.5}));
  EXPECT_EQ(c.command, "quadratic");
  ASSERT_EQ(c.echo.size(), 4u);
  EXPECT_EQ(c.echo[0].first, "seed");
}

TEST(RunConfig, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("seed = 1\nbogus = 3\n"), 2u);
  EXPECT_EQ(error_line("seed = 1\n\nseed = 2\n"), 3u);
  EXPECT_EQ(error_line("replicas = many\n"), 1u);
  EXPECT_EQ(error_line("seed = 1\nreplicas\n"), 2u);
  EXPECT_EQ(error_line("window = 0\n"), 1u);
  EXPECT_EQ(error_line("replicas =\n"), 1u);
  EXPECT_EQ(error_line("replicas = 0\n"), 0u);
}

TEST(RunConfig, KeysAreDocumented) {
  const auto& keys = run_config_keys();
  for (const char* k : {"seed", "replicas", "threads", "out_dir", "n_list", "lambda_list", "resolutions", "tags"})
    EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
}

TEST(Cli, FormatCsvUsesSeventeenDigits) {
  const std::string csv = cli::format_csv({{"s", "1", "x", 0.1, 0.2, std::nullopt, std::nullopt, true}});
  EXPECT_NE(csv.find("s,1,x,0.10000000000000001,0.20000000000000001,,,true"), std::string::npos);
}

TEST(Cli, OutputRootPrecedence) {
  RunConfig c;
  c.out_dir = "from_config";
  ::unsetenv("POISMIX_OUT_DIR");
  EXPECT_EQ(cli::resolve_output_root("", c), "from_config");
  ::setenv("POISMIX_OUT_DIR", "from_env", 1);
  EXPECT_EQ(cli::resolve_output_root("", c), "from_env");
  EXPECT_EQ(cli::resolve_output_root("flag", c), "flag");
  ::unsetenv("POISMIX_OUT_DIR");
  c.out_dir.clear();
  EXPECT_EQ(cli::resolve_output_root("", c), "results");
}

TEST(Cli, MalformedConfigLeavesNoOutput) {
  const fs::path dir = scratch("malformed");
  const fs::path cfg = dir / "bad.conf";
  std::ofstream(cfg) << "seed = 1\nunknown_key = 2\n";
  const fs::path out = dir / "out";
  EXPECT_NE(run_cli({"verify", "--config", cfg.string(), "--out", out.string()}), 0);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, MissingConfigIsUsageError) {
  EXPECT_NE(run_cli({"verify"}), 0);
  EXPECT_NE(run_cli({}), 0);
}

TEST(Cli, KernelsRunWritesArtifacts) {
  const fs::path dir = scratch("kernels");
  const fs::path cfg = dir / "k.conf";
  std::ofstream(cfg) << "resolutions = 64 128\nkernel_c = 0.7\n";
  const fs::path out = dir / "out";
  EXPECT_EQ(run_cli({"kernels", "--config", cfg.string(), "--out", out.string(), "--seed", "5"}), 0);
  std::size_t runs = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    ++runs;
    EXPECT_EQ(entry.path().filename().string().rfind("kernels_", 0), 0u);
    EXPECT_TRUE(fs::exists(entry.path() / "results.csv"));
    EXPECT_TRUE(fs::exists(entry.path() / "report.json"));
    std::ifstream echo(entry.path() / "config_echo.txt");
    const std::string text((std::istreambuf_iterator<char>(echo)), {});
    EXPECT_NE(text.find("seed = 5"), std::string::npos);
  }
  EXPECT_EQ(runs, 1u);
}

TEST(Cli, QuadraticCsvIndependentOfThreads) {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = dir / "q.conf";
  std::ofstream(cfg) << "replicas = 3000\nn_list = 1 4\nbootstrap = 20\nremainder_replicas = 50\nremainder_nodes = 32\n";
  auto run_once = [&](const std::string& threads, const std::string& sub) {
    const fs::path out = dir / sub;
    EXPECT_EQ(run_cli({"quadratic", "--config", cfg.string(), "--out", out.string(), "--threads", threads}), 0);
    const fs::path run = fs::directory_iterator(out)->path();
    std::ifstream f(run / "results.csv", std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), {});
  };
  const std::string a = run_once("1", "a"), b = run_once("3", "b");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}
