#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/aoi_mdp.hpp"
#include "aoisched/control_model.hpp"

namespace aoi {

enum class SweepMode { jacobi, gauss_seidel };

const char* to_string(SweepMode mode);

struct SolverConfig {
  double gamma = 0.9;
  double theta = 0.1;
  SweepMode sweep = SweepMode::jacobi;
  long max_sweeps = 10000;

  void validate() const;
};

using ValueFunction = std::vector<double>;

/// Stationary deterministic policy: one action index per StateIndex.
struct PolicyTable {
  NetworkConfig network;
  SolverConfig solver;
  CostKind cost = CostKind::error;
  std::vector<Action> actions;        // canonical admissible action list
  std::vector<std::uint8_t> choice;   // index into actions, per state

  Action action_at(StateIndex idx) const { return actions[choice[idx]]; }
};

/// Everything a Bellman backup needs about the truncated MDP.
struct TruncatedMdp {
  StateSpace space;
  std::vector<Action> actions;
  std::vector<double> success_prob;
  std::vector<double> cost;  // stage cost per StateIndex
  CostKind kind;

  TruncatedMdp(std::span<const LoopModel> loops, const NetworkConfig& network, CostKind kind);
};

struct Backup {
  double value = 0.0;
  std::uint32_t action = 0;  // index into TruncatedMdp::actions
};

/// min_a C(s) + gamma * sum_s' P(s'|s,a) J(s'), lowest action index on ties.
/// Generic path built on successors(); this is the reference the fast sweeps
/// are checked against.
Backup bellman_backup(std::span<const Age> state, std::span<const double> J,
                      const TruncatedMdp& mdp, double gamma);

struct SolveResult {
  ValueFunction J;
  PolicyTable policy;
  long sweeps = 0;
  double final_residual = 0.0;
  std::vector<double> residuals;  // per sweep
};

/// Value iteration from J = 0 until the max-norm change of a sweep is <= theta.
/// Jacobi sweeps run in parallel (OpenMP); Gauss-Seidel is serial and updates
/// in place in ascending StateIndex order.
/// Throws NonConvergenceError after max_sweeps and NumericError on overflow.
SolveResult value_iteration(const TruncatedMdp& mdp, const SolverConfig& solver);

SolveResult value_iteration(std::span<const LoopModel> loops, const NetworkConfig& network,
                            CostKind kind, const SolverConfig& solver);

/// Greedy policy with respect to J (one extra backup per state).
PolicyTable extract_policy(const TruncatedMdp& mdp, std::span<const double> J,
                           const SolverConfig& solver);

namespace kernels {

// Fast sweeps. Each returns the max-norm change and throws NumericError if a
// value is not finite.
double jacobi_sweep(const TruncatedMdp& mdp, double gamma, std::span<const double> in,
                    std::span<double> out);
double gauss_seidel_sweep(const TruncatedMdp& mdp, double gamma, std::span<double> J);
std::vector<std::uint8_t> greedy_actions(const TruncatedMdp& mdp, double gamma,
                                         std::span<const double> J);

}  // namespace kernels

namespace reference {

// Serial sweeps over bellman_backup(); slow but structurally independent of
// the fast kernels.
double jacobi_sweep(const TruncatedMdp& mdp, double gamma, std::span<const double> in,
                    std::span<double> out);
double gauss_seidel_sweep(const TruncatedMdp& mdp, double gamma, std::span<double> J);
std::vector<std::uint8_t> greedy_actions(const TruncatedMdp& mdp, double gamma,
                                         std::span<const double> J);
SolveResult value_iteration(const TruncatedMdp& mdp, const SolverConfig& solver);

}  // namespace reference

}  // namespace aoi
