#include "aoisched/netsim.hpp"

#include <cmath>
#include <exception>
#include <random>

#include <omp.h>

#include "aoisched/errors.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kChannelStream = 2;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct LoopRuntime {
  Eigen::MatrixXd factor;
  LoopSimState state;
  Eigen::VectorXd z;
  Eigen::VectorXd w;
  Eigen::VectorXd scratch;
  std::mt19937_64 noise_rng;
  std::mt19937_64 channel_rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> uniform{0.0, 1.0};

  void draw_noise() {
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(noise_rng);
    w.noalias() = factor * z;
  }
};

Stat stat_of(std::span<const double> xs) {
  Stat s;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
    s.ci = 1.96 * s.std / std::sqrt(n);
  }
  return s;
}

}  // namespace

const char* to_string(SimMode mode) {
  return mode == SimMode::error_recursion ? "error_recursion" : "full_state";
}

void SimConfig::validate(std::uint32_t N) const {
  if (T < 1) throw ConfigError("simulation needs T >= 1 slots");
  if (reps < 1) throw ConfigError("simulation needs reps >= 1");
  if (!initial_ages.empty()) {
    if (initial_ages.size() != N) throw ConfigError("initial_aoi must list one age per loop");
    for (auto a : initial_ages)
      if (a < 1) throw ConfigError("initial ages must be >= 1");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(base) ^ key) ^ (stream * 0xd1342543de82ef95ULL));
}

Metrics run_episode(Scheduler& scheduler, std::span<const LoopModel> loops, const NetworkConfig& net,
                    const SimConfig& sim, std::uint64_t episode_seed, const SlotObserver* observer) {
  net.validate();
  sim.validate(net.N);
  const std::uint32_t N = net.N;
  if (loops.size() != N) throw ConfigError("loop count does not match N");
  const bool full_state = sim.mode == SimMode::full_state;

  std::vector<LoopRuntime> rt(N);
  std::vector<std::uint64_t> ages(N, 1);
  for (std::uint32_t i = 0; i < N; ++i) {
    const LoopModel& loop = loops[i];
    loop.validate();
    auto& r = rt[i];
    const auto n = loop.n();
    r.factor = noise_factor(loop);
    r.noise_rng.seed(derive_seed(episode_seed, i, kNoiseStream));
    r.channel_rng.seed(derive_seed(episode_seed, i, kChannelStream));
    r.z.resize(n);
    r.w.resize(n);
    r.scratch.resize(n);

    // x[0] ~ N(0, Sigma); the estimator holds a sample that is `age` slots
    // old, so e[0] = sum_{q=1..age} A^{q-1} w_q with fresh draws.
    const std::uint64_t age0 = sim.initial_ages.empty() ? 1 : sim.initial_ages[i];
    r.draw_noise();
    const Eigen::VectorXd x0 = r.w;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    for (std::uint64_t q = 0; q < age0; ++q) {
      r.draw_noise();
      e0 = (loop.A * e0 + r.w).eval();
    }
    r.state.e = e0;
    r.state.delta = age0;
    if (full_state) {
      r.state.x = x0;
      r.state.xhat = x0 - e0;
      r.state.u = -loop.L * r.state.xhat;
    }
    ages[i] = age0;
  }

  std::vector<double> err_sum(N, 0.0);
  std::vector<std::uint64_t> scheduled_slots(N, 0);
  std::vector<double> sq(N);
  std::vector<std::uint8_t> delivered(N);
  double aoi_sum = 0.0;

  for (std::uint64_t t = 0; t < sim.T; ++t) {
    const Action action = scheduler.decide(ages);
    if (action.size() > static_cast<int>(net.R) || (N < 64 && (action.mask >> N) != 0))
      throw ConfigError("scheduler returned an inadmissible action");

    for (std::uint32_t i = 0; i < N; ++i) {
      sq[i] = rt[i].state.e.squaredNorm();
      err_sum[i] += sq[i];
      aoi_sum += static_cast<double>(ages[i]);
      if (action.contains(i)) ++scheduled_slots[i];
    }

    for (std::uint32_t i = 0; i < N; ++i) {
      auto& r = rt[i];
      // Channel draw every slot so the stream stays aligned across schedulers.
      const double u = r.uniform(r.channel_rng);
      const bool received = action.contains(i) && u < loops[i].p;
      delivered[i] = received ? 1 : 0;
      r.draw_noise();
      if (full_state)
        r.state = step_full_state(r.state, loops[i], r.w, received);
      else
        step_error_inplace(r.state, loops[i], r.w, received, r.scratch);
    }

    if (observer) (*observer)(SlotRecord{t, ages, sq, action, delivered});
    for (std::uint32_t i = 0; i < N; ++i) ages[i] = rt[i].state.delta;
  }

  Metrics m;
  const double T = static_cast<double>(sim.T);
  double total_err = 0.0;
  m.shares.resize(N);
  m.per_loop_error.resize(N);
  for (std::uint32_t i = 0; i < N; ++i) {
    total_err += err_sum[i];
    m.per_loop_error[i] = err_sum[i] / T;
    m.shares[i] = static_cast<double>(scheduled_slots[i]) / T;
  }
  m.avg_error = total_err / (T * N);
  m.avg_aoi = aoi_sum / (T * N);
  return m;
}

Metrics run_episode(const SchedulerSpec& spec, std::span<const LoopModel> loops, const NetworkConfig& net,
                    const SimConfig& sim, std::uint64_t episode_seed) {
  if (spec.N != net.N || spec.R != net.R) throw ConfigError("scheduler does not match the network (N, R)");
  auto scheduler = spec.make();
  return run_episode(*scheduler, loops, net, sim, episode_seed);
}

RunSummary run_monte_carlo(const SchedulerSpec& spec, std::span<const LoopModel> loops, const NetworkConfig& net,
                           const SimConfig& sim) {
  sim.validate(net.N);
  std::vector<Metrics> episodes(sim.reps);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(sim.reps); ++r) {
    try {
      episodes[r] = run_episode(spec, loops, net, sim, derive_seed(sim.seed, static_cast<std::uint64_t>(r)));
    } catch (...) {
#pragma omp critical(aoi_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(episodes);
}

RunSummary summarize(std::span<const Metrics> episodes) {
  RunSummary s;
  s.reps = static_cast<std::uint32_t>(episodes.size());
  if (episodes.empty()) return s;
  const std::size_t N = episodes.front().shares.size();
  std::vector<double> column(episodes.size());
  auto collect = [&](auto&& get) {
    for (std::size_t r = 0; r < episodes.size(); ++r) column[r] = get(episodes[r]);
    return stat_of(column);
  };
  s.avg_error = collect([](const Metrics& m) { return m.avg_error; });
  s.avg_aoi = collect([](const Metrics& m) { return m.avg_aoi; });
  for (std::size_t i = 0; i < N; ++i) {
    s.shares.push_back(collect([i](const Metrics& m) { return m.shares[i]; }));
    s.per_loop_error.push_back(collect([i](const Metrics& m) { return m.per_loop_error[i]; }));
  }
  return s;
}

}  // namespace aoi
