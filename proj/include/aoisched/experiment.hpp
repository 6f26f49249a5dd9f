#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aoisched/config.hpp"

namespace aoi {

/// Content hash of everything that determines a solved policy.
std::string policy_cache_key(const ExperimentConfig& cfg, CostKind kind, double gamma, std::uint32_t M);

struct SolvedPolicy {
  std::shared_ptr<const PolicyTable> policy;
  long sweeps = 0;
  double final_residual = 0.0;
  double seconds = 0.0;
  bool from_cache = false;
};

/// Solves (or loads from cfg.cache_dir when set) the policy for one grid point.
SolvedPolicy solve_policy(const ExperimentConfig& cfg, CostKind kind, double gamma, std::uint32_t M,
                          std::ostream* log = nullptr);

struct ResultRow {
  SchedulerKind scheduler = SchedulerKind::GES;
  std::optional<double> gamma;
  std::optional<std::uint32_t> M;
  RunSummary summary;
};

/// Rows for every (scheduler, gamma) at the single configured M. Explicit
/// policies replace solving for their scheduler kind.
std::vector<ResultRow> run_simulate(const ExperimentConfig& cfg,
                                    const std::vector<std::shared_ptr<const PolicyTable>>& policies = {},
                                    std::ostream* log = nullptr);

/// Full (scheduler, M, gamma) grid; schedulers without a policy get one row.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, std::ostream* log = nullptr);

std::string csv_header(std::uint32_t N);
std::string csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, std::uint32_t N);

}  // namespace aoi
