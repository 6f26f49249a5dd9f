#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aoisched/aoi_mdp.hpp"
#include "aoisched/control_model.hpp"
#include "aoisched/schedulers.hpp"

namespace aoi {

enum class SimMode { error_recursion, full_state };

const char* to_string(SimMode mode);

struct SimConfig {
  std::uint64_t T = 20000;
  std::uint32_t reps = 100;
  std::uint64_t seed = 1;
  // Empty means every loop starts at age 1.
  std::vector<std::uint64_t> initial_ages;
  SimMode mode = SimMode::error_recursion;

  void validate(std::uint32_t N) const;
};

/// Per-episode averages over t = 0..T-1.
struct Metrics {
  double avg_error = 0.0;  // (1/TN) sum ||e_i[t]||^2
  double avg_aoi = 0.0;    // (1/TN) sum Delta_i[t]
  std::vector<double> shares;          // fraction of slots loop i was scheduled
  std::vector<double> per_loop_error;  // (1/T) sum ||e_i[t]||^2
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over repetitions
  double ci = 0.0;   // 95% half-width, 1.96 std / sqrt(reps)
};

struct RunSummary {
  std::uint32_t reps = 0;
  Stat avg_error;
  Stat avg_aoi;
  std::vector<Stat> shares;
  std::vector<Stat> per_loop_error;
};

/// What one slot looked like, for trajectory checks.
struct SlotRecord {
  std::uint64_t t = 0;
  std::span<const std::uint64_t> ages;      // before the update
  std::span<const double> squared_error;    // ||e_i[t]||^2, before the update
  Action action;
  std::span<const std::uint8_t> delivered;  // per loop, 0 when unscheduled
};

using SlotObserver = std::function<void(const SlotRecord&)>;

// Seed of stream `stream` of episode/loop `key` under `base` (SplitMix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key, std::uint64_t stream = 0);

/// One episode of T slots. Noise and channel draws come from per-loop streams
/// derived from episode_seed, so they do not depend on the scheduler.
Metrics run_episode(Scheduler& scheduler, std::span<const LoopModel> loops, const NetworkConfig& net,
                    const SimConfig& sim, std::uint64_t episode_seed, const SlotObserver* observer = nullptr);

Metrics run_episode(const SchedulerSpec& spec, std::span<const LoopModel> loops, const NetworkConfig& net,
                    const SimConfig& sim, std::uint64_t episode_seed);

/// reps independent episodes in parallel; episode r uses derive_seed(sim.seed, r).
/// Results are aggregated in repetition order and do not depend on threading.
RunSummary run_monte_carlo(const SchedulerSpec& spec, std::span<const LoopModel> loops,
                           const NetworkConfig& net, const SimConfig& sim);

RunSummary summarize(std::span<const Metrics> episodes);

}  // namespace aoi
