#include "aoisched/solver.hpp"

#include <cmath>
#include <sstream>

#include "aoisched/errors.hpp"

namespace aoi {

const char* to_string(SweepMode mode) {
  return mode == SweepMode::jacobi ? "jacobi" : "gauss_seidel";
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("discount factor gamma must lie in (0, 1)");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ConfigError("convergence threshold theta must be > 0");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
}

TruncatedMdp::TruncatedMdp(std::span<const LoopModel> loops, const NetworkConfig& network, CostKind kind)
    : space(network), actions(enumerate_actions(network)), kind(kind) {
  if (loops.size() != network.N)
    throw ConfigError("got " + std::to_string(loops.size()) + " loops for N = " + std::to_string(network.N));
  if (actions.size() > 256)
    throw ConfigError("more than 256 admissible actions; policy tables store one byte per state");
  success_prob.reserve(loops.size());
  std::vector<PenaltyTable> tables;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    loops[i].validate();
    success_prob.push_back(loops[i].p);
    if (kind == CostKind::error) tables.push_back(build_penalty_table(loops[i], network.M, static_cast<int>(i)));
  }
  cost = stage_cost_table(space, kind, tables);
}

PolicyTable extract_policy(const TruncatedMdp& mdp, std::span<const double> J, const SolverConfig& solver) {
  PolicyTable policy;
  policy.network = mdp.space.config();
  policy.solver = solver;
  policy.cost = mdp.kind;
  policy.actions = mdp.actions;
  policy.choice = kernels::greedy_actions(mdp, solver.gamma, J);
  return policy;
}

SolveResult value_iteration(const TruncatedMdp& mdp, const SolverConfig& solver) {
  solver.validate();
  SolveResult result;
  ValueFunction J(mdp.space.size(), 0.0);
  ValueFunction next;
  if (solver.sweep == SweepMode::jacobi) next.assign(mdp.space.size(), 0.0);

  while (true) {
    double u = 0.0;
    if (solver.sweep == SweepMode::jacobi) {
      u = kernels::jacobi_sweep(mdp, solver.gamma, J, next);
      J.swap(next);
    } else {
      u = kernels::gauss_seidel_sweep(mdp, solver.gamma, J);
    }
    ++result.sweeps;
    result.residuals.push_back(u);
    result.final_residual = u;
    if (u <= solver.theta) break;
    if (result.sweeps >= solver.max_sweeps) {
      std::ostringstream os;
      os << "value iteration did not converge within " << result.sweeps << " sweeps (residual " << u
         << " > theta " << solver.theta << ")";
      throw NonConvergenceError(os.str(), u, result.sweeps);
    }
  }
  result.policy = extract_policy(mdp, J, solver);
  result.J = std::move(J);
  return result;
}

SolveResult value_iteration(std::span<const LoopModel> loops, const NetworkConfig& network, CostKind kind,
                            const SolverConfig& solver) {
  const TruncatedMdp mdp(loops, network, kind);
  return value_iteration(mdp, solver);
}

}  // namespace aoi
