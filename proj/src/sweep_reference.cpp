#include <algorithm>
#include <cmath>
#include <limits>

#include "aoisched/errors.hpp"
#include "aoisched/solver.hpp"

namespace aoi {

Backup bellman_backup(std::span<const Age> state, std::span<const double> J, const TruncatedMdp& mdp,
                      double gamma) {
  const double cost = mdp.cost[mdp.space.encode(state)];
  Backup best{std::numeric_limits<double>::infinity(), 0};
  for (std::uint32_t a = 0; a < mdp.actions.size(); ++a) {
    double acc = 0.0;
    for (const Transition& t : successors(state, mdp.actions[a], mdp.success_prob, mdp.space))
      acc += t.prob * J[t.next];
    const double v = cost + gamma * acc;
    if (v < best.value) best = {v, a};
  }
  if (best.value == std::numeric_limits<double>::infinity())
    best.value = std::numeric_limits<double>::quiet_NaN();
  return best;
}

namespace reference {

double jacobi_sweep(const TruncatedMdp& mdp, double gamma, std::span<const double> in,
                    std::span<double> out) {
  double residual = 0.0;
  for (StateIndex idx = 0; idx < mdp.space.size(); ++idx) {
    const AoiState s = mdp.space.decode(idx);
    out[idx] = bellman_backup(s, in, mdp, gamma).value;
    if (!std::isfinite(out[idx])) throw NumericError("value function overflowed");
    residual = std::max(residual, std::abs(out[idx] - in[idx]));
  }
  return residual;
}

double gauss_seidel_sweep(const TruncatedMdp& mdp, double gamma, std::span<double> J) {
  double residual = 0.0;
  for (StateIndex idx = 0; idx < mdp.space.size(); ++idx) {
    const AoiState s = mdp.space.decode(idx);
    const double v = bellman_backup(s, J, mdp, gamma).value;
    if (!std::isfinite(v)) throw NumericError("value function overflowed");
    residual = std::max(residual, std::abs(v - J[idx]));
    J[idx] = v;
  }
  return residual;
}

std::vector<std::uint8_t> greedy_actions(const TruncatedMdp& mdp, double gamma,
                                         std::span<const double> J) {
  std::vector<std::uint8_t> choice(mdp.space.size());
  for (StateIndex idx = 0; idx < mdp.space.size(); ++idx)
    choice[idx] = static_cast<std::uint8_t>(bellman_backup(mdp.space.decode(idx), J, mdp, gamma).action);
  return choice;
}

SolveResult value_iteration(const TruncatedMdp& mdp, const SolverConfig& solver) {
  solver.validate();
  SolveResult result;
  ValueFunction J(mdp.space.size(), 0.0);
  ValueFunction next(mdp.space.size(), 0.0);
  while (true) {
    double u = 0.0;
    if (solver.sweep == SweepMode::jacobi) {
      u = jacobi_sweep(mdp, solver.gamma, J, next);
      J.swap(next);
    } else {
      u = gauss_seidel_sweep(mdp, solver.gamma, J);
    }
    ++result.sweeps;
    result.residuals.push_back(u);
    result.final_residual = u;
    if (u <= solver.theta) break;
    if (result.sweeps >= solver.max_sweeps)
      throw NonConvergenceError("value iteration did not converge", u, result.sweeps);
  }
  result.policy.network = mdp.space.config();
  result.policy.solver = solver;
  result.policy.cost = mdp.kind;
  result.policy.actions = mdp.actions;
  result.policy.choice = greedy_actions(mdp, solver.gamma, J);
  result.J = std::move(J);
  return result;
}

}  // namespace reference
}  // namespace aoi
