#include "aoisched/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "aoisched/errors.hpp"
#include "aoisched/policy_io.hpp"

namespace aoi {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void put_matrix(std::ostringstream& os, const Eigen::MatrixXd& m) {
  os << m.rows() << 'x' << m.cols() << '[';
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g,", m(r, c));
      os << buf;
    }
  os << ']';
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool is_table_scheduler(SchedulerKind k) { return k == SchedulerKind::DES || k == SchedulerKind::AoIS; }

CostKind cost_of(SchedulerKind k) { return k == SchedulerKind::DES ? CostKind::error : CostKind::aoi; }

ResultRow simulate_row(const ExperimentConfig& cfg, const SchedulerSpec& spec, const NetworkConfig& net,
                       std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.scheduler = spec.kind;
  row.gamma = spec.gamma();
  row.M = spec.levels();
  row.summary = run_monte_carlo(spec, cfg.loops, net, cfg.sim);
  if (log) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *log << "simulated " << to_string(spec.kind);
    if (row.gamma) *log << " gamma=" << *row.gamma << " M=" << *row.M;
    *log << ": avg_error=" << row.summary.avg_error.mean << " avg_aoi=" << row.summary.avg_aoi.mean << " ("
         << secs << " s)\n";
  }
  return row;
}

SchedulerSpec non_table_spec(const ExperimentConfig& cfg, SchedulerKind kind) {
  const std::uint32_t maxM = *std::max_element(cfg.M_list.begin(), cfg.M_list.end());
  if (kind == SchedulerKind::GES) return greedy_spec(cfg.loops, cfg.R, 4ull * maxM);
  return round_robin_spec(cfg.N(), cfg.R);
}

}  // namespace

std::string policy_cache_key(const ExperimentConfig& cfg, CostKind kind, double gamma, std::uint32_t M) {
  std::ostringstream os;
  os << "v1;N=" << cfg.N() << ";R=" << cfg.R << ";M=" << M << ";cost=" << to_string(kind);
  char buf[64];
  std::snprintf(buf, sizeof buf, ";gamma=%.17g;theta=%.17g", gamma, cfg.theta);
  os << buf << ";sweep=" << to_string(cfg.sweep) << ";max=" << cfg.max_sweeps;
  for (const auto& loop : cfg.loops) {
    os << ";loop:";
    // The AoI cost ignores the plant; only p shapes that MDP.
    if (kind == CostKind::error) {
      put_matrix(os, loop.A);
      put_matrix(os, loop.Sigma);
    }
    std::snprintf(buf, sizeof buf, "p=%.17g", loop.p);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

SolvedPolicy solve_policy(const ExperimentConfig& cfg, CostKind kind, double gamma, std::uint32_t M,
                          std::ostream* log) {
  const NetworkConfig net = cfg.network(M);
  const SolverConfig solver = cfg.solver(gamma);
  std::filesystem::path cached;
  if (!cfg.cache_dir.empty()) {
    cached = std::filesystem::path(cfg.cache_dir) / (policy_cache_key(cfg, kind, gamma, M) + ".aoipol");
    if (std::filesystem::exists(cached)) {
      auto table = std::make_shared<PolicyTable>(read_policy(cached));
      table->solver = solver;
      SolvedPolicy out;
      out.policy = std::move(table);
      out.from_cache = true;
      if (log) *log << "policy cache hit " << cached.string() << "\n";
      return out;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const TruncatedMdp mdp(cfg.loops, net, kind);
  SolveResult res = value_iteration(mdp, solver);
  SolvedPolicy out;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.sweeps = res.sweeps;
  out.final_residual = res.final_residual;
  out.policy = std::make_shared<const PolicyTable>(std::move(res.policy));
  if (log)
    *log << "solved " << to_string(kind) << " gamma=" << gamma << " M=" << M << ": " << out.sweeps
         << " sweeps, residual " << out.final_residual << ", " << out.seconds << " s\n";
  if (!cached.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cached.parent_path(), ec);
    // Write to a temporary then rename so a concurrent reader never sees a
    // partial file.
    const auto tmp = cached.string() + ".tmp";
    write_policy(tmp, *out.policy);
    std::filesystem::rename(tmp, cached);
  }
  return out;
}

std::vector<ResultRow> run_simulate(const ExperimentConfig& cfg,
                                    const std::vector<std::shared_ptr<const PolicyTable>>& policies,
                                    std::ostream* log) {
  cfg.validate();
  if (cfg.M_list.size() != 1) throw ConfigError("simulate expects a single M; use sweep for M grids");
  const std::uint32_t M = cfg.M_list.front();
  const NetworkConfig net = cfg.network(M);
  std::vector<ResultRow> rows;

  for (const auto& p : policies) {
    rows.push_back(simulate_row(cfg, lookup_spec(p, net), net, log));
  }

  for (SchedulerKind kind : cfg.schedulers) {
    if (is_table_scheduler(kind)) {
      const bool supplied = std::any_of(policies.begin(), policies.end(), [&](const auto& p) {
        return p->cost == cost_of(kind);
      });
      if (supplied) continue;
      for (double gamma : cfg.gammas) {
        auto solved = solve_policy(cfg, cost_of(kind), gamma, M, log);
        rows.push_back(simulate_row(cfg, lookup_spec(solved.policy, net), net, log));
      }
    } else {
      rows.push_back(simulate_row(cfg, non_table_spec(cfg, kind), net, log));
    }
  }
  if (rows.empty()) throw ConfigError("nothing to simulate: list schedulers in the config or pass --policy");
  return rows;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.schedulers.empty()) throw ConfigError("sweep needs at least one scheduler");
  std::vector<ResultRow> rows;
  for (SchedulerKind kind : cfg.schedulers) {
    if (!is_table_scheduler(kind)) {
      const NetworkConfig net = cfg.network(cfg.M_list.front());
      rows.push_back(simulate_row(cfg, non_table_spec(cfg, kind), net, log));
      continue;
    }
    for (std::uint32_t M : cfg.M_list) {
      const NetworkConfig net = cfg.network(M);
      for (double gamma : cfg.gammas) {
        auto solved = solve_policy(cfg, cost_of(kind), gamma, M, log);
        rows.push_back(simulate_row(cfg, lookup_spec(solved.policy, net), net, log));
      }
    }
  }
  return rows;
}

std::string csv_header(std::uint32_t N) {
  std::string h = "scheduler,gamma,M,avg_error_mean,avg_error_ci,avg_aoi_mean,avg_aoi_ci";
  for (std::uint32_t i = 1; i <= N; ++i) h += ",share_" + std::to_string(i);
  return h;
}

std::string csv_line(const ResultRow& row) {
  std::string s = to_string(row.scheduler);
  s += ',';
  if (row.gamma) s += fmt(*row.gamma);
  s += ',';
  if (row.M) s += std::to_string(*row.M);
  const auto& r = row.summary;
  s += ',' + fmt(r.avg_error.mean) + ',' + fmt(r.avg_error.ci) + ',' + fmt(r.avg_aoi.mean) + ',' + fmt(r.avg_aoi.ci);
  for (const auto& share : r.shares) s += ',' + fmt(share.mean);
  return s;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, std::uint32_t N) {
  out << csv_header(N) << '\n';
  for (const auto& row : rows) out << csv_line(row) << '\n';
}

}  // namespace aoi
