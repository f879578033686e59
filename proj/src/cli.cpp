#include "poismix/cli.hpp"

#include <fmt/core.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "poismix/bounds.hpp"
#include "poismix/conditions.hpp"
#include "poismix/parallel.hpp"
#include "poismix/quadratic.hpp"
#include "poismix/verify.hpp"

namespace poismix::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommandOutput {
  std::vector<ResultRow> rows;
  json report = json::object();
  int exit_code = 0;
};

std::string num(double x) { return fmt::format("{:.17g}", x); }
std::string label_of(double x) { return fmt::format("{}", x); }

json row_json(const ResultRow& r) {
  json j{{"section", r.section}, {"n", r.n}, {"name", r.name}, {"value", r.value}};
  if (r.std_error) j["std_error"] = *r.std_error;
  if (r.reference) j["reference"] = *r.reference;
  if (r.statistic) j["statistic"] = *r.statistic;
  if (r.passed) j["passed"] = *r.passed;
  return j;
}

void print_check(const std::string& what, bool passed, const std::string& detail) {
  fmt::print("[{}] {} {}\n", passed ? "PASS" : "FAIL", what, detail);
}

// verify

CommandOutput run_verify(const RunConfig& cfg) {
  VerifyOptions o;
  o.replicas = cfg.replicas;
  o.seed = cfg.seed;
  o.resolution = cfg.verify_resolution;
  o.exact_samples = cfg.exact_samples;
  o.z_max = cfg.z_max;
  CommandOutput out;
  json invariants = json::array();
  std::size_t failed = 0;
  for (const InvariantResult& r : run_verify_suite(o)) {
    out.rows.push_back({"verify/" + r.group, "", r.name, r.statistic, std::nullopt, r.threshold, r.statistic, r.passed});
    invariants.push_back({{"group", r.group},
                          {"name", r.name},
                          {"exact", r.exact},
                          {"statistic", r.statistic},
                          {"threshold", r.threshold},
                          {"passed", r.passed},
                          {"detail", r.detail}});
    print_check(r.group + ": " + r.name, r.passed,
                fmt::format("({} {:.3g}, threshold {:.3g})", r.exact ? "error" : "|z|", r.statistic, r.threshold));
    if (!r.passed) ++failed;
  }
  fmt::print("{} of {} invariants passed\n", invariants.size() - failed, invariants.size());
  out.report["invariants"] = std::move(invariants);
  out.exit_code = failed == 0 ? 0 : 1;
  return out;
}

// quadratic

CommandOutput run_quadratic(const RunConfig& cfg) {
  CommandOutput out;
  const std::vector<StableProbe> probes = cfg.probes == "default" ? default_stable_probes() : std::vector<StableProbe>{};
  json probe_meta = json::array();
  for (const StableProbe& p : probes)
    probe_meta.push_back({{"label", p.label}, {"c", p.c}, {"a", p.a}, {"b", p.b}});
  out.report["probes"] = probe_meta;
  out.report["lambda_grid"] = cfg.lambda_grid;

  struct Summary {
    std::size_t n;
    FourthMomentStat fm_X, fm_Y;
    std::optional<StableTestReport> stable;
  };
  std::vector<Summary> summaries;
  for (std::size_t n : cfg.n_list) {
    const std::string ns = std::to_string(n);
    fmt::print("n = {}\n", n);
    QuadraticRunResult res = simulate_Qn(n, cfg.replicas, cfg.seed, cfg.bootstrap);
    for (const MomentRow& m : res.moment_table) {
      const bool ok = std::abs(m.z()) < cfg.z_max;
      out.rows.push_back({"moments", ns, m.name, m.estimate.mean, m.estimate.std_error, m.exact, m.z(), ok});
      print_check(fmt::format("n={} {}", n, m.name), ok,
                  fmt::format("estimate {:.6g} exact {:.6g} z {:.2f}", m.estimate.mean, m.exact, m.z()));
    }
    out.rows.push_back({"fourth_moment", ns, "X", res.fm_X.value, res.fm_X.std_error, {}, {}, {}});
    out.rows.push_back({"fourth_moment", ns, "Y", res.fm_Y.value, res.fm_Y.std_error, {}, {}, {}});
    out.rows.push_back({"decomposition", ns, "max_relative_residual", res.max_decomposition_residual, {}, {}, {}, {}});
    out.rows.push_back({"limit", ns, "d1_to_limit", res.d1_to_limit, {}, {}, {}, {}});
    fmt::print("  fourth cumulant X {:.4g} (se {:.2g}), Y {:.4g} (se {:.2g}); d1 to limit {:.4g}\n", res.fm_X.value,
               res.fm_X.std_error, res.fm_Y.value, res.fm_Y.std_error, res.d1_to_limit);

    Summary s{n, res.fm_X, res.fm_Y, std::nullopt};
    if (!probes.empty()) {
      StableTestReport st = quadratic_stable_test(res, probes, cfg.lambda_grid);
      for (const StableTestRow& r : st.rows)
        out.rows.push_back({"stable", ns, r.probe + "@" + label_of(r.lambda), r.distance, r.pooled_std_error, {},
                            r.ratio(), {}});
      out.rows.push_back({"stable", ns, "max_distance", st.max_distance, {}, {}, {}, {}});
      out.rows.push_back({"stable", ns, "max_ratio", st.max_ratio, {}, {}, {}, {}});
      fmt::print("  stable test: max distance {:.4g}, max distance/SE {:.3g}\n", st.max_distance, st.max_ratio);
      s.stable = std::move(st);
    }
    if (cfg.remainder_replicas > 0) {
      const QuadraticRemainders rem = quadratic_remainders(n, cfg.remainder_replicas, cfg.seed, cfg.remainder_nodes);
      out.rows.push_back({"remainders", ns, "R3", rem.r3.mean, rem.r3.std_error, {}, {}, {}});
      out.rows.push_back({"remainders", ns, "R4", rem.r4.mean, rem.r4.std_error, {}, {}, {}});
      fmt::print("  R3 {:.4g} (se {:.2g}), R4 {:.4g} (se {:.2g})\n", rem.r3.mean, rem.r3.std_error, rem.r4.mean,
                 rem.r4.std_error);
    }
    summaries.push_back(std::move(s));
  }

  for (std::size_t i = 0; i + 1 < summaries.size(); ++i) {
    const Summary& a = summaries[i];
    const Summary& b = summaries[i + 1];
    const std::string span = fmt::format("{}->{}", a.n, b.n);
    for (auto [name, fa, fb] : {std::tuple{"X", a.fm_X, b.fm_X}, std::tuple{"Y", a.fm_Y, b.fm_Y}}) {
      const double slack = 2.0 * std::hypot(fa.std_error, fb.std_error);
      const bool ok = std::abs(fb.value) < std::abs(fa.value) + slack;
      out.rows.push_back({"trend", span, std::string("fourth_moment_") + name, std::abs(fb.value) - std::abs(fa.value),
                          slack, {}, {}, ok});
      print_check(fmt::format("fourth cumulant {} decreasing {}", name, span), ok, "");
    }
  }
  if (summaries.size() >= 2 && summaries.front().stable && summaries.back().stable) {
    const StableTestReport& first = *summaries.front().stable;
    const StableTestReport& last = *summaries.back().stable;
    const std::string span = fmt::format("{}->{}", summaries.front().n, summaries.back().n);
    const bool decreasing = last.max_distance < first.max_distance;
    out.rows.push_back({"trend", span, "stable_distance_decreasing", last.max_distance - first.max_distance, {}, {}, {},
                        decreasing});
    const bool small = last.max_ratio < 5.0;
    out.rows.push_back({"trend", std::to_string(last.n), "stable_ratio_below_5", last.max_ratio, {}, 5.0, {}, small});
    print_check("stable distance decreasing " + span, decreasing, "");
    print_check(fmt::format("stable distance below 5 SE at n={}", last.n), small,
                fmt::format("(ratio {:.3g})", last.max_ratio));
  }
  return out;
}

// bounds

void require_family(const RunConfig& cfg) {
  if (cfg.family != "normalized_poisson") throw Error("unknown family '" + cfg.family + "'");
}

struct NormalizedPoisson {
  IntensityMeasure intensity;
  PathwiseFunctional F;
  RandomField u;
  PathwiseFunctional S;
};

// F = (η(W) − λ)/√λ on a window of total mass λ, u = λ^{−1/2}, S = 1.
NormalizedPoisson normalized_poisson(const RunConfig& cfg, double lambda, std::size_t resolution) {
  const double width = cfg.window_hi - cfg.window_lo;
  NormalizedPoisson np{IntensityMeasure::uniform(Box::interval(cfg.window_lo, cfg.window_hi), lambda / width,
                                                 {resolution}),
                       {}, {}, PathwiseFunctional::constant(1.0)};
  const double root = std::sqrt(lambda);
  np.F = PathwiseFunctional::scalar(
      [lambda, root](const PointConfiguration& c) { return (static_cast<double>(c.size()) - lambda) / root; },
      "normalized_count");
  np.u = RandomField::deterministic([root](const Location&) { return 1.0 / root; }, "inverse_root");
  return np;
}

CommandOutput run_bounds(const RunConfig& cfg) {
  require_family(cfg);
  CommandOutput out;
  std::vector<double> log_lambda, log_bound;
  json reports = json::array();
  for (double lambda : cfg.lambda_list) {
    const std::string ls = label_of(lambda);
    const NormalizedPoisson np = normalized_poisson(cfg, lambda, 1);
    const BoundReport d1 = d1_bound(np.F, np.u, np.S, np.intensity, cfg.replicas, cfg.seed);
    const BoundReport d3 = d3_bound(np.F, np.u, np.S, np.intensity, cfg.replicas, cfg.seed);

    std::vector<double> normals(d1.f_samples.size());
    parallel_for(normals.size(), [&](std::size_t r) {
      Rng rng = make_stream(cfg.seed, r, StreamTag::auxiliary);
      normals[r] = std::normal_distribution<double>()(rng);
    });
    const double emp = empirical_d1(d1.f_samples, normals);

    json terms = json::array();
    for (const BoundTerm& t : d1.terms) {
      out.rows.push_back({"d1", ls, t.name, t.value, t.std_error, {}, {}, {}});
      terms.push_back({{"name", t.name}, {"value", t.value}, {"std_error", t.std_error}});
    }
    json terms3 = json::array();
    for (const BoundTerm& t : d3.terms) {
      out.rows.push_back({"d3", ls, t.name, t.value, t.std_error, {}, {}, {}});
      terms3.push_back({{"name", t.name}, {"value", t.value}, {"std_error", t.std_error}});
    }
    const bool valid = emp <= d1.d1_bound;
    out.rows.push_back({"validity", ls, "empirical_d1", emp, {}, d1.d1_bound, {}, valid});
    print_check(fmt::format("lambda={} empirical d1 {:.4g} <= bound {:.4g}", ls, emp, d1.d1_bound), valid,
                fmt::format("(delta1 {:.4g}, delta2 {:.4g}, d3 bound {:.4g})", d1.delta1, d1.delta2,
                            d3.d3_bound.value_or(NAN)));
    reports.push_back({{"lambda", lambda},
                       {"seed", cfg.seed},
                       {"replicas", cfg.replicas},
                       {"delta1", d1.delta1},
                       {"delta2", d1.delta2},
                       {"d1_bound", d1.d1_bound},
                       {"d1_std_error", d1.d1_std_error},
                       {"d1_terms", terms},
                       {"d3_bound", d3.d3_bound.value_or(NAN)},
                       {"d3_terms", terms3},
                       {"empirical_d1", emp}});
    log_lambda.push_back(std::log(lambda));
    log_bound.push_back(std::log(d1.d1_bound));
  }
  if (log_lambda.size() >= 2) {
    const double k = static_cast<double>(log_lambda.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_lambda.size(); ++i) {
      sx += log_lambda[i];
      sy += log_bound[i];
      sxx += log_lambda[i] * log_lambda[i];
      sxy += log_lambda[i] * log_bound[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const bool ok = std::abs(slope + 1.0 / 6.0) <= 0.02;
    out.rows.push_back({"rate", "", "loglog_slope", slope, {}, -1.0 / 6.0, {}, ok});
    print_check("log-log slope of d1 bound", ok, fmt::format("{:.4f} (target -1/6)", slope));
    out.report["loglog_slope"] = slope;
  }
  out.report["family"] = cfg.family;
  out.report["bounds"] = std::move(reports);
  return out;
}

// kernels

struct KernelFamily {
  std::string name;
  Kernel g, g_hat, h;
  std::map<KernelConditionTag, double> hand;
};

std::vector<KernelFamily> kernel_families(const RunConfig& cfg) {
  const double lo = cfg.window_lo, hi = cfg.window_hi, mid = 0.5 * (lo + hi);
  const double c = cfg.kernel_c;
  const double nu_a = cfg.rate * (mid - lo);
  const Region a = interval_region(lo, mid);
  const Region b = interval_region(mid, hi);
  const Kernel ind_b = Kernel::indicator({b}, "1_B");
  const Kernel aa = Kernel::indicator({a, a}, "1_AxA");

  std::vector<KernelFamily> fams;
  fams.push_back({"indicator", aa.scaled(c), aa.scaled(c), ind_b,
                  {{KernelConditionTag::KS, c * c * nu_a * nu_a},
                   {KernelConditionTag::KR4, c * std::sqrt(nu_a)},
                   {KernelConditionTag::KRstar, c * c * std::pow(nu_a, 1.5)},
                   {KernelConditionTag::KW, 0.0},
                   {KernelConditionTag::KP4, c * c * (c - 0.5) * (c - 0.5) * nu_a * nu_a}}});
  fams.push_back({"half", aa.scaled(0.5), aa.scaled(0.5), ind_b,
                  {{KernelConditionTag::KRstar, 0.25 * std::pow(nu_a, 1.5)}, {KernelConditionTag::KP4, 0.0}}});

  Kernel smooth{2,
                [c](std::span<const Location> x) { return c * std::exp(-(x[0].x() * x[0].x() + x[1].x() * x[1].x())); },
                true, "gaussian_bump"};
  Kernel skew{2,
              [c](std::span<const Location> x) {
                return c * std::exp(-(x[0].x() * x[0].x() + x[1].x() * x[1].x())) + 0.5 * c * (x[0].x() - x[1].x());
              },
              false, "gaussian_bump_skewed"};
  Kernel linear{1, [](std::span<const Location> x) { return x[0].x(); }, true, "identity"};
  fams.push_back({"smooth", smooth, skew, linear, {}});
  return fams;
}

CommandOutput run_kernels(const RunConfig& cfg) {
  CommandOutput out;
  const std::vector<KernelConditionTag> tags{KernelConditionTag::KS, KernelConditionTag::KR4,
                                             KernelConditionTag::KRstar, KernelConditionTag::KW,
                                             KernelConditionTag::KP4};
  const Box window = Box::interval(cfg.window_lo, cfg.window_hi);
  json fam_meta = json::array();
  for (const KernelFamily& fam : kernel_families(cfg)) {
    check_symmetrization(fam.g, fam.g_hat, IntensityMeasure::uniform(window, cfg.rate, {cfg.resolutions.front()}), 64,
                         cfg.seed);
    fam_meta.push_back({{"name", fam.name}, {"g", fam.g.label}, {"g_hat", fam.g_hat.label}, {"h", fam.h.label}});
    std::map<KernelConditionTag, std::vector<double>> values;
    for (std::size_t res : cfg.resolutions) {
      const IntensityMeasure nu = IntensityMeasure::uniform(window, cfg.rate, {res});
      for (KernelConditionTag tag : tags) {
        const double v = kernel_condition(tag, fam.g, fam.g_hat, fam.h, nu).value;
        values[tag].push_back(v);
        ResultRow row{"kernels", std::to_string(res), fam.name + "/" + to_string(tag), v, {}, {}, {}, {}};
        if (auto it = fam.hand.find(tag); it != fam.hand.end()) {
          const double ref = it->second;
          const double rel = ref == 0.0 ? std::abs(v) : std::abs(v - ref) / std::abs(ref);
          row.reference = ref;
          row.statistic = rel;
          row.passed = ref == 0.0 ? v == 0.0 : rel < 0.01;
        }
        out.rows.push_back(row);
      }
    }
    for (KernelConditionTag tag : tags) {
      const std::vector<double>& v = values[tag];
      for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double scale = std::max(std::abs(v[i]), std::abs(v[i + 1]));
        const double change = scale == 0.0 ? 0.0 : std::abs(v[i + 1] - v[i]) / scale;
        const bool ok = change < 0.01;
        out.rows.push_back({"stability", fmt::format("{}->{}", cfg.resolutions[i], cfg.resolutions[i + 1]),
                            fam.name + "/" + to_string(tag), change, {}, 0.01, {}, ok});
        print_check(fmt::format("{}/{} stable {}->{}", fam.name, to_string(tag), cfg.resolutions[i],
                                cfg.resolutions[i + 1]),
                    ok, fmt::format("(relative change {:.3g})", change));
      }
    }
  }
  out.report["families"] = std::move(fam_meta);
  return out;
}

// conditions

CommandOutput run_conditions(const RunConfig& cfg) {
  require_family(cfg);
  CommandOutput out;
  std::vector<ConditionTag> tags;
  for (const std::string& t : cfg.tags) tags.push_back(parse_condition_tag(t));
  for (std::size_t i = 0; i < cfg.lambda_list.size(); ++i) {
    const double lambda = cfg.lambda_list[i];
    const std::string ls = label_of(lambda);
    const NormalizedPoisson np = normalized_poisson(cfg, lambda, cfg.resolution);
    for (ConditionTag tag : tags) {
      std::vector<ConditionEstimate> ests;
      if (tag == ConditionTag::W_nu || tag == ConditionTag::W_gamma) {
        ests = estimate_probes(tag, np.F, np.u, np.intensity, cfg.replicas, cfg.seed, i);
      } else {
        ConditionAux aux;
        if (tag == ConditionTag::S_nu || tag == ConditionTag::S_gamma || tag == ConditionTag::M_nu)
          aux.target = PathwiseFunctional::constant(1.0);
        ests.push_back(estimate_condition(tag, np.F, np.u, aux, np.intensity, cfg.replicas, cfg.seed, i));
      }
      for (const ConditionEstimate& e : ests) {
        const std::string name = e.probe.empty() ? std::string(to_string(tag)) : std::string(to_string(tag)) + "/" + e.probe;
        out.rows.push_back({"conditions", ls, name, e.value.norm(), e.std_error, {}, {}, {}});
        if (e.l1_distance)
          out.rows.push_back({"conditions_l1", ls, name, e.l1_distance->mean, e.l1_distance->std_error, {}, {}, {}});
      }
      double worst = 0.0;
      for (const ConditionEstimate& e : ests) worst = std::max(worst, e.l1_distance ? e.l1_distance->mean : e.value.norm());
      fmt::print("lambda={} {}: {:.4g}\n", ls, to_string(tag), worst);
    }
  }
  out.report["family"] = cfg.family;
  json probe_names = json::array();
  for (const std::string& t : cfg.tags) {
    if ((t != "W_nu" && t != "W_gamma") || cfg.lambda_list.empty()) continue;
    const NormalizedPoisson np = normalized_poisson(cfg, cfg.lambda_list.front(), cfg.resolution);
    for (const RandomField& v : probe_fields(np.intensity)) probe_names.push_back(v.label);
    for (const PathwiseFunctional& g : probe_functionals(np.intensity)) probe_names.push_back(g.label);
    break;
  }
  out.report["w_probes"] = std::move(probe_names);
  return out;
}

CommandOutput dispatch(const RunConfig& cfg) {
  if (cfg.command == "verify") return run_verify(cfg);
  if (cfg.command == "quadratic") return run_quadratic(cfg);
  if (cfg.command == "bounds") return run_bounds(cfg);
  if (cfg.command == "kernels") return run_kernels(cfg);
  if (cfg.command == "conditions") return run_conditions(cfg);
  throw Error("unknown command '" + cfg.command + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# effective configuration of command " << cfg.command << "\n";
  bool seen_seed = false, seen_threads = false;
  for (const auto& [key, value] : cfg.echo) {
    if (key == "seed") {
      os << "seed = " << cfg.seed << "\n";
      seen_seed = true;
    } else if (key == "threads") {
      os << "threads = " << cfg.threads << "\n";
      seen_threads = true;
    } else {
      os << key << " = " << value << "\n";
    }
  }
  if (!seen_seed) os << "seed = " << cfg.seed << "\n";
  if (!seen_threads && cfg.threads != 0) os << "threads = " << cfg.threads << "\n";
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error("cannot write " + path.string());
}

fs::path write_outputs(const RunConfig& cfg, const CommandOutput& out, const std::string& root) {
  fs::create_directories(root);
  const std::string stem = cfg.command + "_" + utc_timestamp();
  fs::path target = fs::path(root) / stem;
  for (int k = 1; fs::exists(target); ++k) target = fs::path(root) / fmt::format("{}_{}", stem, k);
  const fs::path tmp = fs::path(root) / ("." + target.filename().string() + ".partial");
  fs::remove_all(tmp);
  try {
    fs::create_directory(tmp);
    json report = out.report;
    report["command"] = cfg.command;
    report["seed"] = cfg.seed;
    report["replicas"] = cfg.replicas;
    report["threads"] = thread_count();
    json config = json::object();
    for (const auto& [key, value] : cfg.echo) config[key] = value;
    config["seed"] = std::to_string(cfg.seed);
    report["config"] = std::move(config);
    json rows = json::array();
    for (const ResultRow& r : out.rows) rows.push_back(row_json(r));
    report["rows"] = std::move(rows);
    report["exit_code"] = out.exit_code;

    write_file(tmp / "results.csv", format_csv(out.rows));
    write_file(tmp / "report.json", report.dump(2) + "\n");
    write_file(tmp / "config_echo.txt", config_echo(cfg));
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  return target;
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string s = "section,n,name,value,std_error,reference,statistic,passed\n";
  const auto opt = [](const std::optional<double>& x) { return x ? num(*x) : std::string(); };
  for (const ResultRow& r : rows) {
    s += fmt::format("{},{},{},{},{},{},{},{}\n", r.section, r.n, r.name, num(r.value), opt(r.std_error),
                     opt(r.reference), opt(r.statistic), r.passed ? (*r.passed ? "true" : "false") : "");
  }
  return s;
}

std::string resolve_output_root(const std::string& cli_out, const RunConfig& config) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("POISMIX_OUT_DIR"); env != nullptr && *env != '\0') return env;
  if (!config.out_dir.empty()) return config.out_dir;
  return "results";
}

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo toolkit for Malliavin calculus on Poisson space"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  for (const char* name : {"verify", "quadratic", "bounds", "kernels", "conditions"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file")->required();
    sub->add_option("--out", out_dir, "output root (overrides POISMIX_OUT_DIR and out_dir)");
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_run_config(config_path, command);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error in {}: {}\n", config_path, e.what());
    return 2;
  } catch (const Error& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  }
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  set_thread_count(cfg.threads);

  try {
    const CommandOutput out = dispatch(cfg);
    const fs::path dir = write_outputs(cfg, out, resolve_output_root(out_dir, cfg));
    fmt::print("wrote {}\n", dir.string());
    return out.exit_code;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric failure: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  }
}

}  // namespace poismix::cli
