#include "aoisched/control_model.hpp"

#include <cmath>
#include <sstream>

#include "aoisched/errors.hpp"

namespace aoi {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-12;

std::string dims(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

LoopModel LoopModel::scalar(double a, double b, double sigma, double l, double p) {
  LoopModel loop;
  loop.A = Eigen::MatrixXd::Constant(1, 1, a);
  loop.B = Eigen::MatrixXd::Constant(1, 1, b);
  loop.Sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  loop.L = Eigen::MatrixXd::Constant(1, 1, l);
  loop.p = p;
  return loop;
}

void LoopModel::validate() const {
  const auto nn = n();
  const auto mm = m();
  if (nn < 1 || A.cols() != nn) throw ConfigError("A must be square and non-empty, got " + dims(A));
  if (mm < 1 || B.rows() != nn) throw ConfigError("B must be n x m with n = " + std::to_string(nn) + ", got " + dims(B));
  if (L.rows() != mm || L.cols() != nn)
    throw ConfigError("L must be m x n (" + std::to_string(mm) + "x" + std::to_string(nn) + "), got " + dims(L));
  if (Sigma.rows() != nn || Sigma.cols() != nn)
    throw ConfigError("Sigma must be n x n, got " + dims(Sigma));
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("packet success probability must lie in (0, 1]");
  if (!A.allFinite() || !B.allFinite() || !Sigma.allFinite() || !L.allFinite())
    throw ConfigError("loop matrices must be finite");

  const double scale = std::max(1.0, Sigma.cwiseAbs().maxCoeff());
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw ConfigError("Sigma must be symmetric");
  if ((Sigma.diagonal().array() < 0.0).any()) throw ConfigError("Sigma must have a non-negative diagonal");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sigma, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTol * scale) throw ConfigError("Sigma must be positive semi-definite");
}

bool LoopModel::has_diagonal_noise() const {
  return (Sigma - Eigen::MatrixXd(Sigma.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

double PenaltyTable::at(std::uint64_t age) const {
  if (age < 1 || age > g_.size())
    throw RangeError("penalty table covers ages 1.." + std::to_string(g_.size()) + ", asked for " +
                     std::to_string(age));
  return g_[age - 1];
}

void PenaltyTable::extend_to(std::uint64_t max_age) {
  if (max_age <= g_.size()) return;
  g_.reserve(max_age);
  double acc = g_.empty() ? 0.0 : g_.back();
  Eigen::MatrixXd tmp(a_.rows(), a_.cols());
  for (std::uint64_t age = g_.size() + 1; age <= max_age; ++age) {
    // next_power_ currently holds (A^T)^{age-1} A^{age-1}.
    acc += (next_power_ * sigma_).trace();
    if (!std::isfinite(acc)) {
      std::ostringstream os;
      os << "penalty overflow for loop " << loop_index_ << " at age " << age;
      throw NumericError(os.str());
    }
    g_.push_back(acc);
    tmp.noalias() = next_power_ * a_;
    next_power_.noalias() = a_.transpose() * tmp;
  }
}

PenaltyTable build_penalty_table(const LoopModel& loop, std::uint64_t max_age, int loop_index) {
  loop.validate();
  if (max_age < 1) throw ConfigError("penalty table needs max_age >= 1");
  PenaltyTable table;
  table.a_ = loop.A;
  table.sigma_ = loop.Sigma;
  table.next_power_ = Eigen::MatrixXd::Identity(loop.n(), loop.n());
  table.loop_index_ = loop_index;
  table.extend_to(max_age);
  return table;
}

LoopSimState step_error(const LoopSimState& state, const LoopModel& loop, const Eigen::VectorXd& w,
                        bool received) {
  LoopSimState next = state;
  Eigen::VectorXd scratch(loop.n());
  step_error_inplace(next, loop, w, received, scratch);
  return next;
}

void step_error_inplace(LoopSimState& state, const LoopModel& loop, const Eigen::VectorXd& w,
                        bool received, Eigen::VectorXd& scratch) {
  if (w.size() != loop.n() || state.e.size() != loop.n())
    throw ConfigError("step_error: vector dimension does not match loop state dimension");
  if (received) {
    state.e = w;
    state.delta = 1;
  } else {
    scratch.noalias() = loop.A * state.e;
    state.e = scratch + w;
    ++state.delta;
  }
}

LoopSimState step_full_state(const LoopSimState& state, const LoopModel& loop, const Eigen::VectorXd& w,
                             bool received) {
  const auto n = loop.n();
  if (w.size() != n || state.x.size() != n || state.xhat.size() != n)
    throw ConfigError("step_full_state: full-state vectors missing or mis-sized");
  LoopSimState next;
  next.u = -loop.L * state.xhat;
  const Eigen::VectorXd drive = loop.B * next.u;
  next.x = loop.A * state.x + drive + w;
  // The sample delivered at t+1 is x[t]; the estimator propagates it one step
  // with the known input. Otherwise it keeps propagating its own estimate.
  if (received) {
    next.xhat = loop.A * state.x + drive;
    next.delta = 1;
  } else {
    next.xhat = loop.A * state.xhat + drive;
    next.delta = state.delta + 1;
  }
  next.e = next.x - next.xhat;
  return next;
}

Eigen::VectorXd estimate_from_history(const LoopModel& loop, const Eigen::VectorXd& latest_sample,
                                      std::span<const Eigen::VectorXd> inputs_oldest_first,
                                      std::uint64_t age) {
  if (age < 1) throw ConfigError("estimate_from_history: age must be >= 1");
  if (inputs_oldest_first.size() < age)
    throw ConfigError("input history underflow: need " + std::to_string(age) + " inputs, have " +
                      std::to_string(inputs_oldest_first.size()));
  // Horner form over q = age..1: est = A (... (A x + B u[t-age]) ...) + B u[t-1].
  Eigen::VectorXd est = latest_sample;
  const std::size_t first = inputs_oldest_first.size() - age;
  for (std::size_t k = first; k < inputs_oldest_first.size(); ++k) {
    est = (loop.A * est + loop.B * inputs_oldest_first[k]).eval();
  }
  return est;
}

Eigen::MatrixXd noise_factor(const LoopModel& loop) {
  const auto& s = loop.Sigma;
  if (loop.has_diagonal_noise()) return Eigen::MatrixXd(s.diagonal().cwiseSqrt().asDiagonal());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace aoi
