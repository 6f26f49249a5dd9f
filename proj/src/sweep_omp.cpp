#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "aoisched/errors.hpp"
#include "aoisched/solver.hpp"
#include "sweep_kernel.hpp"

namespace aoi::kernels {

namespace {

// Contiguous block of [0, size) owned by thread `tid` of `nthreads`.
std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t size, int tid, int nthreads) {
  const std::uint64_t base = size / nthreads;
  const std::uint64_t extra = size % nthreads;
  const std::uint64_t t = static_cast<std::uint64_t>(tid);
  const std::uint64_t lo = t * base + std::min(t, extra);
  return {lo, lo + base + (t < extra ? 1 : 0)};
}

void check_finite(bool ok) {
  if (!ok) throw NumericError("value function overflowed (non-finite value during a sweep)");
}

}  // namespace

double jacobi_sweep(const TruncatedMdp& mdp, double gamma, std::span<const double> in,
                    std::span<double> out) {
  const detail::BackupPlan plan(mdp);
  const std::uint64_t size = mdp.space.size();
  const std::uint32_t n = plan.loops();
  const std::uint32_t m = plan.levels();
  const double* cost = mdp.cost.data();
  const double* J = in.data();
  double* Jout = out.data();
  double residual = 0.0;
  bool finite = true;

#pragma omp parallel reduction(max : residual) reduction(&& : finite)
  {
    const auto [lo, hi] = block(size, omp_get_thread_num(), omp_get_num_threads());
    std::vector<std::uint32_t> digit(n);
    std::vector<std::uint64_t> offset(n);
    if (lo < hi) plan.decode(lo, digit.data());
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const double v = plan.backup(digit.data(), cost[idx], gamma, J, offset.data()).value;
      Jout[idx] = v;
      finite = finite && std::isfinite(v);
      residual = std::max(residual, std::abs(v - J[idx]));
      detail::BackupPlan::advance(digit.data(), n, m);
    }
  }
  check_finite(finite);
  return residual;
}

double gauss_seidel_sweep(const TruncatedMdp& mdp, double gamma, std::span<double> J) {
  const detail::BackupPlan plan(mdp);
  const std::uint64_t size = mdp.space.size();
  const std::uint32_t n = plan.loops();
  std::vector<std::uint32_t> digit(n, 0);
  std::vector<std::uint64_t> offset(n);
  double residual = 0.0;
  bool finite = true;
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    const double v = plan.backup(digit.data(), mdp.cost[idx], gamma, J.data(), offset.data()).value;
    finite = finite && std::isfinite(v);
    residual = std::max(residual, std::abs(v - J[idx]));
    J[idx] = v;
    detail::BackupPlan::advance(digit.data(), n, plan.levels());
  }
  check_finite(finite);
  return residual;
}

std::vector<std::uint8_t> greedy_actions(const TruncatedMdp& mdp, double gamma,
                                         std::span<const double> J) {
  const detail::BackupPlan plan(mdp);
  const std::uint64_t size = mdp.space.size();
  const std::uint32_t n = plan.loops();
  const std::uint32_t m = plan.levels();
  std::vector<std::uint8_t> choice(size);
#pragma omp parallel
  {
    const auto [lo, hi] = block(size, omp_get_thread_num(), omp_get_num_threads());
    std::vector<std::uint32_t> digit(n);
    std::vector<std::uint64_t> offset(n);
    if (lo < hi) plan.decode(lo, digit.data());
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      choice[idx] = static_cast<std::uint8_t>(
          plan.backup(digit.data(), mdp.cost[idx], gamma, J.data(), offset.data()).action);
      detail::BackupPlan::advance(digit.data(), n, m);
    }
  }
  return choice;
}

}  // namespace aoi::kernels
