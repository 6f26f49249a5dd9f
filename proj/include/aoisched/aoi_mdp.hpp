#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/control_model.hpp"

namespace aoi {

using Age = std::uint32_t;
using StateIndex = std::uint64_t;
using AoiState = std::vector<Age>;

/// N loops, R channel resources per slot, ages truncated at M.
struct NetworkConfig {
  std::uint32_t N = 1;
  std::uint32_t R = 1;
  std::uint32_t M = 1;

  void validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

/// Subset of scheduled loops, bit i set when loop i transmits.
struct Action {
  std::uint64_t mask = 0;

  int size() const { return std::popcount(mask); }
  bool contains(std::uint32_t loop) const { return (mask >> loop) & 1u; }
  bool operator==(const Action&) const = default;
};

/// All subsets of size <= R, ordered by size then by mask value. Index 0 is
/// the idle action; this order is the tie-break order used everywhere.
std::vector<Action> enumerate_actions(const NetworkConfig& config);

/// Dense mixed-radix indexing of {1..M}^N, loop 0 least significant:
///   idx = sum_i (delta_i - 1) * M^i.
class StateSpace {
 public:
  explicit StateSpace(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  std::uint64_t size() const { return size_; }
  std::span<const std::uint64_t> strides() const { return strides_; }

  StateIndex encode(std::span<const Age> state) const;
  AoiState decode(StateIndex idx) const;

  // Augmented-state lookup for unbounded ages: each component clamped to M.
  StateIndex encode_clamped(std::span<const std::uint64_t> ages) const;

 private:
  NetworkConfig config_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 1;
};

struct Transition {
  StateIndex next = 0;
  double prob = 0.0;
};

/// Successor distribution of (state, action) in the truncated MDP.
///
/// Unscheduled loops age to min(delta + 1, M); each scheduled loop resets to
/// 1 with probability p_i or ages likewise. Outcomes are listed with the
/// all-delivered outcome first (failure pattern counted upward over the
/// scheduled loops in ascending order); duplicates (only possible at M = 1)
/// are merged into the first occurrence.
std::vector<Transition> successors(std::span<const Age> state, Action action,
                                   std::span<const double> success_prob,
                                   const StateSpace& space);

std::vector<Transition> successors(std::span<const Age> state, Action action,
                                   std::span<const LoopModel> loops, const StateSpace& space);

/// Probability of one failure pattern over the scheduled loops, multiplied in
/// ascending loop order. Shared by every backup path so that all of them round
/// identically.
double outcome_probability(Action action, std::uint64_t failure_pattern,
                           std::span<const double> success_prob);

/// Sum of g_i at the (truncated) ages. Independent of the action.
double stage_cost_error(std::span<const Age> state, std::span<const PenaltyTable> tables);

/// Total age in the network.
double stage_cost_aoi(std::span<const Age> state);

enum class CostKind : std::uint8_t { error = 0, aoi = 1 };

const char* to_string(CostKind kind);

/// Per-state stage costs for the whole space, indexed by StateIndex.
std::vector<double> stage_cost_table(const StateSpace& space, CostKind kind,
                                     std::span<const PenaltyTable> tables);

}  // namespace aoi
