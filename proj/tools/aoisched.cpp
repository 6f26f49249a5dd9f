// aoisched: solve, simulate and sweep AoI-based schedulers for networked
// control loops sharing a lossy channel.
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence, 4 I/O.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "aoisched/config.hpp"
#include "aoisched/errors.hpp"
#include "aoisched/experiment.hpp"
#include "aoisched/policy_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> policies;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  std::string cost;
};

aoi::ExperimentConfig load(const Options& opt) {
  auto cfg = aoi::load_config(opt.config);
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (!opt.cache_dir.empty()) cfg.cache_dir = opt.cache_dir;
  for (auto i : cfg.non_diagonal_noise_loops())
    std::cerr << "warning: loop " << i << " has a non-diagonal noise covariance\n";
  return cfg;
}

std::string output_path(const Options& opt, const aoi::ExperimentConfig& cfg) {
  return opt.out.empty() ? cfg.output : opt.out;
}

void emit_csv(const Options& opt, const aoi::ExperimentConfig& cfg, const std::vector<aoi::ResultRow>& rows) {
  const std::string path = output_path(opt, cfg);
  if (path.empty() || path == "-") {
    aoi::write_csv(std::cout, rows, cfg.N());
    return;
  }
  std::ofstream out(path);
  if (!out) throw aoi::IoError("cannot open " + path + " for writing");
  aoi::write_csv(out, rows, cfg.N());
  if (!out) throw aoi::IoError("failed writing " + path);
  std::cerr << "wrote " << rows.size() << " rows to " << path << "\n";
}

int cmd_solve(const Options& opt) {
  auto cfg = load(opt);
  if (cfg.gammas.size() != 1) throw aoi::ConfigError("solve expects exactly one gamma");
  if (cfg.M_list.size() != 1) throw aoi::ConfigError("solve expects exactly one M");
  auto kind = cfg.solve_cost;
  if (!opt.cost.empty()) kind = opt.cost == "aoi" ? aoi::CostKind::aoi : aoi::CostKind::error;
  const std::string path = opt.out.empty() ? (cfg.output.empty() ? "policy.aoipol" : cfg.output) : opt.out;

  // Solve directly (no cache) so the reported sweep count is real.
  cfg.cache_dir.clear();
  const auto solved = aoi::solve_policy(cfg, kind, cfg.gammas.front(), cfg.M_list.front());
  aoi::write_policy(path, *solved.policy);
  std::cout << "solved " << aoi::to_string(kind) << " policy: N=" << cfg.N() << " M=" << cfg.M_list.front()
            << " R=" << cfg.R << " gamma=" << cfg.gammas.front() << " states=" << solved.policy->choice.size()
            << " sweeps=" << solved.sweeps << " residual=" << solved.final_residual
            << " wall=" << solved.seconds << "s -> " << path << "\n";
  return 0;
}

int cmd_simulate(const Options& opt, bool compare) {
  auto cfg = load(opt);
  if (compare && cfg.schedulers.empty())
    cfg.schedulers = {aoi::SchedulerKind::DES, aoi::SchedulerKind::AoIS, aoi::SchedulerKind::GES,
                      aoi::SchedulerKind::RoundRobin};
  std::vector<std::shared_ptr<const aoi::PolicyTable>> policies;
  for (const auto& p : opt.policies) {
    auto table = std::make_shared<aoi::PolicyTable>(aoi::read_policy(p));
    policies.push_back(std::move(table));
  }
  const auto rows = aoi::run_simulate(cfg, policies, &std::cerr);
  emit_csv(opt, cfg, rows);
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto cfg = load(opt);
  const auto rows = aoi::run_sweep(cfg, &std::cerr);
  emit_csv(opt, cfg, rows);
  return 0;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "experiment JSON file")->required();
  sub->add_option("--out", opt.out, "output path (policy file for solve, CSV otherwise; '-' = stdout)");
  sub->add_option("--threads", opt.threads, "OpenMP worker threads (default: runtime default)");
  sub->add_option("--seed", opt.seed, "master seed, overrides sim.seed");
  sub->add_option("--cache-dir", opt.cache_dir, "policy cache directory, overrides cache_dir");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduler synthesis and simulation for networked control loops"};
  app.require_subcommand(1);
  Options opt;

  auto* solve = app.add_subcommand("solve", "value-iterate one (gamma, M) point and write the policy file");
  add_common(solve, opt);
  solve->add_option("--cost", opt.cost, "stage cost: error (DES) or aoi (AoIS)")
      ->check(CLI::IsMember({"error", "aoi"}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of schedulers or policy files");
  add_common(simulate, opt);
  simulate->add_option("--policy", opt.policies, "policy file(s) to evaluate");

  auto* sweep = app.add_subcommand("sweep", "solve and simulate over the gamma x M grid");
  add_common(sweep, opt);

  auto* compare = app.add_subcommand("compare", "simulate all configured (default: all) schedulers");
  add_common(compare, opt);
  compare->add_option("--policy", opt.policies, "policy file(s) to evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (opt.threads > 0) omp_set_num_threads(opt.threads);

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (simulate->parsed()) return cmd_simulate(opt, false);
    if (compare->parsed()) return cmd_simulate(opt, true);
    if (sweep->parsed()) return cmd_sweep(opt);
  } catch (const aoi::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const aoi::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const aoi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const aoi::RangeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
