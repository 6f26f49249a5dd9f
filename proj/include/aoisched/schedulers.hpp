#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoisched/aoi_mdp.hpp"
#include "aoisched/control_model.hpp"
#include "aoisched/solver.hpp"

namespace aoi {

enum class SchedulerKind { DES, AoIS, GES, RoundRobin };

const char* to_string(SchedulerKind kind);
SchedulerKind scheduler_kind_from_string(const std::string& name);

/// Picks the loops that transmit in the current slot from the true
/// (unbounded) ages. Instances are owned by a single episode.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Action decide(std::span<const std::uint64_t> ages) = 0;
};

// Table lookup on the augmented state min(age, M).
Action decide_lookup(const PolicyTable& policy, const StateSpace& space,
                     std::span<const std::uint64_t> ages);

// Top-R loops by p_i * g_i(age_i), lowest index first on equal scores.
// Tables are extended in place when an age runs past their end.
Action decide_greedy(std::span<const std::uint64_t> ages, std::span<PenaltyTable> tables,
                     std::span<const double> success_prob, std::uint32_t R);

// Next R loops in cyclic order starting at cursor; advances cursor.
Action decide_round_robin(std::uint32_t& cursor, std::uint32_t N, std::uint32_t R);

class LookupScheduler final : public Scheduler {
 public:
  explicit LookupScheduler(std::shared_ptr<const PolicyTable> policy);
  Action decide(std::span<const std::uint64_t> ages) override;

 private:
  std::shared_ptr<const PolicyTable> policy_;
  StateSpace space_;
};

class GreedyScheduler final : public Scheduler {
 public:
  GreedyScheduler(std::vector<PenaltyTable> tables, std::vector<double> success_prob, std::uint32_t R);
  Action decide(std::span<const std::uint64_t> ages) override;

 private:
  std::vector<PenaltyTable> tables_;
  std::vector<double> success_prob_;
  std::uint32_t R_;
};

class RoundRobinScheduler final : public Scheduler {
 public:
  RoundRobinScheduler(std::uint32_t N, std::uint32_t R) : N_(N), R_(R) {}
  Action decide(std::span<const std::uint64_t> ages) override;

 private:
  std::uint32_t N_;
  std::uint32_t R_;
  std::uint32_t cursor_ = 0;
};

/// Shareable recipe for per-episode scheduler instances.
struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::RoundRobin;
  std::shared_ptr<const PolicyTable> policy;  // DES / AoIS
  std::vector<PenaltyTable> tables;           // GES
  std::vector<double> success_prob;           // GES
  std::uint32_t N = 0;
  std::uint32_t R = 0;

  std::unique_ptr<Scheduler> make() const;

  // Discount factor and truncation level of the underlying policy, if any.
  std::optional<double> gamma() const;
  std::optional<std::uint32_t> levels() const;
};

SchedulerSpec lookup_spec(std::shared_ptr<const PolicyTable> policy, const NetworkConfig& expected);
// GES tables start at initial_ages (4M by default in the CLI) and grow on demand.
SchedulerSpec greedy_spec(std::span<const LoopModel> loops, std::uint32_t R, std::uint64_t initial_ages);
SchedulerSpec round_robin_spec(std::uint32_t N, std::uint32_t R);

}  // namespace aoi
