#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoisched/aoi_mdp.hpp"
#include "aoisched/control_model.hpp"
#include "aoisched/netsim.hpp"
#include "aoisched/schedulers.hpp"
#include "aoisched/solver.hpp"

namespace aoi {

/// One experiment file. JSON layout:
///
///   {
///     "loops": [ {"A": 1.1, "B": 1, "Sigma": 1, "L": 1.1, "p": 0.9}, ... ],
///     "network": {"R": 1, "M": 25},              // M may be a list for sweeps
///     "solver": {"gamma": 0.9, "theta": 0.1,     // gamma may be a list
///                "sweep": "jacobi", "max_sweeps": 10000, "cost": "error"},
///     "sim": {"T": 20000, "reps": 100, "seed": 1,
///             "mode": "error_recursion", "initial_aoi": "all_one"},
///     "schedulers": ["DES", "AoIS", "GES"],
///     "output": "results.csv",
///     "cache_dir": ".policy-cache"
///   }
///
/// Matrices are nested arrays (row-major); scalars stand for 1x1 matrices.
struct ExperimentConfig {
  std::vector<LoopModel> loops;
  std::uint32_t R = 1;
  std::vector<std::uint32_t> M_list{25};
  std::vector<double> gammas{0.9};
  double theta = 0.1;
  SweepMode sweep = SweepMode::jacobi;
  long max_sweeps = 10000;
  CostKind solve_cost = CostKind::error;
  SimConfig sim;
  std::vector<SchedulerKind> schedulers;
  std::string output;
  std::string cache_dir;

  std::uint32_t N() const { return static_cast<std::uint32_t>(loops.size()); }
  NetworkConfig network(std::uint32_t M) const { return {N(), R, M}; }
  SolverConfig solver(double gamma) const { return {gamma, theta, sweep, max_sweeps}; }

  // Cross-field checks; throws ConfigError.
  void validate() const;
  // Loops whose Sigma is not diagonal (accepted, reported by the CLI).
  std::vector<std::size_t> non_diagonal_noise_loops() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace aoi
