#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aoi {

/// One LTI control loop closed over the shared channel.
///
/// Plant x[t+1] = A x[t] + B u[t] + w[t], w ~ N(0, Sigma), control law
/// u = -L xhat, packet success probability p on every scheduled slot.
struct LoopModel {
  Eigen::MatrixXd A;      // n x n
  Eigen::MatrixXd B;      // n x m
  Eigen::MatrixXd Sigma;  // n x n, symmetric PSD
  Eigen::MatrixXd L;      // m x n
  double p = 1.0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  static LoopModel scalar(double a, double b, double sigma, double l, double p);

  // Throws ConfigError on inconsistent dimensions, p outside (0, 1] or a
  // Sigma that is not symmetric PSD.
  void validate() const;

  // The usual models use a diagonal Sigma; anything else is accepted but
  // callers may want to warn.
  bool has_diagonal_noise() const;
};

/// g(age) = E||e||^2 at the given age, for ages 1..size().
class PenaltyTable {
 public:
  PenaltyTable() = default;

  double operator()(std::uint64_t age) const { return g_[age - 1]; }
  double at(std::uint64_t age) const;
  std::size_t size() const { return g_.size(); }
  std::span<const double> values() const { return g_; }

  // Continues the recurrence up to max_age (no-op if already covered).
  // Throws NumericError once a value stops being finite.
  void extend_to(std::uint64_t max_age);

  friend PenaltyTable build_penalty_table(const LoopModel& loop, std::uint64_t max_age,
                                          int loop_index);

 private:
  std::vector<double> g_;
  // Recurrence continuation: next_power_ = (A^T)^r A^r for r = size().
  Eigen::MatrixXd a_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd next_power_;
  int loop_index_ = -1;
};

/// g[age] = sum_{r<age} tr((A^T)^r A^r Sigma), accumulated incrementally.
/// loop_index only labels error messages.
PenaltyTable build_penalty_table(const LoopModel& loop, std::uint64_t max_age,
                                 int loop_index = 0);

/// Per-episode simulation state of one loop.
///
/// In error-recursion mode only e and delta are meaningful. In full-state
/// mode x, xhat and u are tracked as well and e == x - xhat.
struct LoopSimState {
  Eigen::VectorXd e;
  Eigen::VectorXd x;
  Eigen::VectorXd xhat;
  Eigen::VectorXd u;
  std::uint64_t delta = 1;
};

// Error recursion: reception of the previous slot's sample resets e to the
// latest noise term, otherwise e' = A e + w. Returns the next state.
LoopSimState step_error(const LoopSimState& state, const LoopModel& loop,
                        const Eigen::VectorXd& w, bool received);

// In-place variant for the simulator hot loop; scratch must have size n.
void step_error_inplace(LoopSimState& state, const LoopModel& loop,
                        const Eigen::VectorXd& w, bool received,
                        Eigen::VectorXd& scratch);

// Full plant + estimator + controller step under u = -L xhat.
LoopSimState step_full_state(const LoopSimState& state, const LoopModel& loop,
                             const Eigen::VectorXd& w, bool received);

/// Estimate built from the latest delivered sample and the inputs applied
/// since then:
///   xhat[t] = A^age x[t-age] + sum_{q=1..age} A^{q-1} B u[t-q].
/// inputs_oldest_first holds u[t-k..t-1] for some k; throws ConfigError when
/// k < age (history underflow).
Eigen::VectorXd estimate_from_history(const LoopModel& loop,
                                      const Eigen::VectorXd& latest_sample,
                                      std::span<const Eigen::VectorXd> inputs_oldest_first,
                                      std::uint64_t age);

// F with F F^T = Sigma, used to draw w = F z from standard normals z.
// Works for singular PSD Sigma.
Eigen::MatrixXd noise_factor(const LoopModel& loop);

}  // namespace aoi
