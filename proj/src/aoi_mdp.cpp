#include "aoisched/aoi_mdp.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "aoisched/errors.hpp"

namespace aoi {

void NetworkConfig::validate() const {
  if (N < 1) throw ConfigError("network needs at least one loop");
  if (N > 64) throw ConfigError("at most 64 loops are supported (actions are 64-bit masks)");
  if (R < 1 || R > N) throw ConfigError("resources per slot must satisfy 1 <= R <= N");
  if (M < 1) throw ConfigError("augmentation level M must be >= 1");
}

std::vector<Action> enumerate_actions(const NetworkConfig& config) {
  config.validate();
  std::vector<Action> actions{Action{0}};
  const std::uint64_t limit = config.N == 64 ? 0 : (std::uint64_t{1} << config.N);
  for (std::uint32_t k = 1; k <= config.R; ++k) {
    // Gosper's hack: successive masks with popcount k in ascending order.
    std::uint64_t mask = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    while (true) {
      actions.push_back(Action{mask});
      const std::uint64_t low = mask & (~mask + 1);
      const std::uint64_t ripple = mask + low;
      if (ripple == 0) break;  // wrapped past bit 63
      const std::uint64_t next = (((ripple ^ mask) >> 2) / low) | ripple;
      if (limit != 0 && next >= limit) break;
      mask = next;
    }
  }
  return actions;
}

StateSpace::StateSpace(const NetworkConfig& config) : config_(config) {
  config_.validate();
  strides_.resize(config_.N);
  for (std::uint32_t i = 0; i < config_.N; ++i) {
    strides_[i] = size_;
    if (size_ > std::numeric_limits<std::uint64_t>::max() / config_.M)
      throw ConfigError("state space M^N does not fit in 64 bits");
    size_ *= config_.M;
  }
}

StateIndex StateSpace::encode(std::span<const Age> state) const {
  if (state.size() != config_.N)
    throw RangeError("state has " + std::to_string(state.size()) + " components, expected " +
                     std::to_string(config_.N));
  StateIndex idx = 0;
  for (std::uint32_t i = 0; i < config_.N; ++i) {
    if (state[i] < 1 || state[i] > config_.M)
      throw RangeError("age " + std::to_string(state[i]) + " of loop " + std::to_string(i) +
                       " outside [1, " + std::to_string(config_.M) + "]");
    idx += static_cast<std::uint64_t>(state[i] - 1) * strides_[i];
  }
  return idx;
}

AoiState StateSpace::decode(StateIndex idx) const {
  if (idx >= size_) throw RangeError("state index " + std::to_string(idx) + " out of range");
  AoiState state(config_.N);
  for (std::uint32_t i = 0; i < config_.N; ++i) {
    state[i] = static_cast<Age>(idx % config_.M) + 1;
    idx /= config_.M;
  }
  return state;
}

StateIndex StateSpace::encode_clamped(std::span<const std::uint64_t> ages) const {
  if (ages.size() != config_.N)
    throw ConfigError("observed state has " + std::to_string(ages.size()) + " loops, policy expects " +
                      std::to_string(config_.N));
  StateIndex idx = 0;
  for (std::uint32_t i = 0; i < config_.N; ++i) {
    if (ages[i] < 1) throw RangeError("ages start at 1");
    idx += (std::min<std::uint64_t>(ages[i], config_.M) - 1) * strides_[i];
  }
  return idx;
}

double outcome_probability(Action action, std::uint64_t failure_pattern,
                           std::span<const double> success_prob) {
  double prob = 1.0;
  int bit = 0;
  for (std::uint64_t rest = action.mask; rest != 0; rest &= rest - 1, ++bit) {
    const int loop = std::countr_zero(rest);
    const bool failed = (failure_pattern >> bit) & 1u;
    prob *= failed ? 1.0 - success_prob[loop] : success_prob[loop];
  }
  return prob;
}

std::vector<Transition> successors(std::span<const Age> state, Action action,
                                   std::span<const double> success_prob, const StateSpace& space) {
  const auto& cfg = space.config();
  if (success_prob.size() != cfg.N)
    throw ConfigError("got " + std::to_string(success_prob.size()) + " loops for a network of " +
                      std::to_string(cfg.N));
  if (action.size() > static_cast<int>(cfg.R)) throw ConfigError("action schedules more than R loops");
  if (cfg.N < 64 && (action.mask >> cfg.N) != 0) throw ConfigError("action schedules a loop index >= N");

  // Everyone ages first; a delivered loop then drops its aged digit to 0.
  const auto strides = space.strides();
  StateIndex aged = space.encode(state);
  std::vector<std::uint64_t> reset_offset;
  for (std::uint32_t i = 0; i < cfg.N; ++i) {
    const std::uint64_t aged_digit = std::min<std::uint64_t>(state[i], cfg.M - 1);
    aged += (aged_digit - (state[i] - 1)) * strides[i];
    if (action.contains(i)) reset_offset.push_back(aged_digit * strides[i]);
  }

  const std::uint64_t patterns = std::uint64_t{1} << reset_offset.size();
  std::vector<Transition> out;
  out.reserve(patterns);
  for (std::uint64_t fail = 0; fail < patterns; ++fail) {
    StateIndex next = aged;
    for (std::size_t j = 0; j < reset_offset.size(); ++j)
      if (!((fail >> j) & 1u)) next -= reset_offset[j];
    const double prob = outcome_probability(action, fail, success_prob);
    if (prob == 0.0) continue;
    auto hit = std::find_if(out.begin(), out.end(), [&](const Transition& t) { return t.next == next; });
    if (hit != out.end())
      hit->prob += prob;
    else
      out.push_back({next, prob});
  }
  return out;
}

std::vector<Transition> successors(std::span<const Age> state, Action action,
                                   std::span<const LoopModel> loops, const StateSpace& space) {
  std::vector<double> p(loops.size());
  std::transform(loops.begin(), loops.end(), p.begin(), [](const LoopModel& l) { return l.p; });
  return successors(state, action, std::span<const double>(p), space);
}

double stage_cost_error(std::span<const Age> state, std::span<const PenaltyTable> tables) {
  if (tables.size() != state.size()) throw ConfigError("one penalty table per loop required");
  double cost = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) cost += tables[i].at(state[i]);
  return cost;
}

double stage_cost_aoi(std::span<const Age> state) {
  double cost = 0.0;
  for (Age a : state) cost += static_cast<double>(a);
  return cost;
}

const char* to_string(CostKind kind) {
  return kind == CostKind::error ? "error" : "aoi";
}

std::vector<double> stage_cost_table(const StateSpace& space, CostKind kind,
                                     std::span<const PenaltyTable> tables) {
  const auto& cfg = space.config();
  if (kind == CostKind::error) {
    if (tables.size() != cfg.N) throw ConfigError("one penalty table per loop required");
    for (const auto& t : tables)
      if (t.size() < cfg.M) throw ConfigError("penalty tables must cover ages up to M");
  }
  // Per-loop cost by digit, then an odometer walk; summing in loop order
  // matches stage_cost_error / stage_cost_aoi exactly.
  std::vector<std::vector<double>> per_loop(cfg.N, std::vector<double>(cfg.M));
  for (std::uint32_t i = 0; i < cfg.N; ++i)
    for (std::uint32_t d = 0; d < cfg.M; ++d)
      per_loop[i][d] = kind == CostKind::error ? tables[i](d + 1) : static_cast<double>(d + 1);

  std::vector<double> costs(space.size());
  std::vector<std::uint32_t> digit(cfg.N, 0);
  for (std::uint64_t idx = 0; idx < space.size(); ++idx) {
    double c = 0.0;
    for (std::uint32_t i = 0; i < cfg.N; ++i) c += per_loop[i][digit[i]];
    costs[idx] = c;
    for (std::uint32_t i = 0; i < cfg.N; ++i) {
      if (++digit[i] < cfg.M) break;
      digit[i] = 0;
    }
  }
  return costs;
}

}  // namespace aoi
