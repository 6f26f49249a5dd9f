#include "aoisched/schedulers.hpp"

#include <algorithm>
#include <numeric>

#include "aoisched/errors.hpp"

namespace aoi {

const char* to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::DES: return "DES";
    case SchedulerKind::AoIS: return "AoIS";
    case SchedulerKind::GES: return "GES";
    case SchedulerKind::RoundRobin: return "RoundRobin";
  }
  return "?";
}

SchedulerKind scheduler_kind_from_string(const std::string& name) {
  if (name == "DES") return SchedulerKind::DES;
  if (name == "AoIS") return SchedulerKind::AoIS;
  if (name == "GES") return SchedulerKind::GES;
  if (name == "RoundRobin" || name == "RR") return SchedulerKind::RoundRobin;
  throw ConfigError("unknown scheduler '" + name + "' (expected DES, AoIS, GES or RoundRobin)");
}

Action decide_lookup(const PolicyTable& policy, const StateSpace& space, std::span<const std::uint64_t> ages) {
  return policy.action_at(space.encode_clamped(ages));
}

Action decide_greedy(std::span<const std::uint64_t> ages, std::span<PenaltyTable> tables,
                     std::span<const double> success_prob, std::uint32_t R) {
  const std::size_t n = ages.size();
  if (tables.size() != n || success_prob.size() != n)
    throw ConfigError("greedy scheduler: one penalty table and probability per loop required");
  // Scores on the raw age; small fixed-size selection, so a plain insertion
  // into the current top-R is enough.
  std::vector<std::pair<double, std::uint32_t>> top;
  top.reserve(R + 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (ages[i] > tables[i].size()) tables[i].extend_to(ages[i]);
    const double score = success_prob[i] * tables[i](ages[i]);
    auto pos = std::find_if(top.begin(), top.end(), [&](const auto& e) { return score > e.first; });
    if (pos == top.end() && top.size() >= R) continue;
    top.insert(pos, {score, i});
    if (top.size() > R) top.pop_back();
  }
  Action a;
  for (const auto& [score, i] : top) a.mask |= std::uint64_t{1} << i;
  return a;
}

Action decide_round_robin(std::uint32_t& cursor, std::uint32_t N, std::uint32_t R) {
  Action a;
  for (std::uint32_t j = 0; j < std::min(R, N); ++j) a.mask |= std::uint64_t{1} << ((cursor + j) % N);
  cursor = (cursor + R) % N;
  return a;
}

LookupScheduler::LookupScheduler(std::shared_ptr<const PolicyTable> policy)
    : policy_(std::move(policy)), space_(policy_->network) {}

Action LookupScheduler::decide(std::span<const std::uint64_t> ages) {
  return decide_lookup(*policy_, space_, ages);
}

GreedyScheduler::GreedyScheduler(std::vector<PenaltyTable> tables, std::vector<double> success_prob,
                                 std::uint32_t R)
    : tables_(std::move(tables)), success_prob_(std::move(success_prob)), R_(R) {}

Action GreedyScheduler::decide(std::span<const std::uint64_t> ages) {
  return decide_greedy(ages, tables_, success_prob_, R_);
}

Action RoundRobinScheduler::decide(std::span<const std::uint64_t> ages) {
  if (ages.size() != N_) throw ConfigError("round robin: loop count mismatch");
  return decide_round_robin(cursor_, N_, R_);
}

std::unique_ptr<Scheduler> SchedulerSpec::make() const {
  switch (kind) {
    case SchedulerKind::DES:
    case SchedulerKind::AoIS: return std::make_unique<LookupScheduler>(policy);
    case SchedulerKind::GES: return std::make_unique<GreedyScheduler>(tables, success_prob, R);
    case SchedulerKind::RoundRobin: return std::make_unique<RoundRobinScheduler>(N, R);
  }
  throw ConfigError("unknown scheduler kind");
}

std::optional<double> SchedulerSpec::gamma() const {
  if (policy) return policy->solver.gamma;
  return std::nullopt;
}

std::optional<std::uint32_t> SchedulerSpec::levels() const {
  if (policy) return policy->network.M;
  return std::nullopt;
}

SchedulerSpec lookup_spec(std::shared_ptr<const PolicyTable> policy, const NetworkConfig& expected) {
  if (!policy) throw ConfigError("lookup scheduler needs a policy");
  const auto& net = policy->network;
  if (net != expected)
    throw ConfigError("policy was solved for N=" + std::to_string(net.N) + ", R=" + std::to_string(net.R) +
                      ", M=" + std::to_string(net.M) + " but the experiment has N=" + std::to_string(expected.N) +
                      ", R=" + std::to_string(expected.R) + ", M=" + std::to_string(expected.M));
  if (policy->choice.size() != StateSpace(net).size()) throw ConfigError("policy table size does not match M^N");
  SchedulerSpec spec;
  spec.kind = policy->cost == CostKind::error ? SchedulerKind::DES : SchedulerKind::AoIS;
  spec.policy = std::move(policy);
  spec.N = net.N;
  spec.R = net.R;
  return spec;
}

SchedulerSpec greedy_spec(std::span<const LoopModel> loops, std::uint32_t R, std::uint64_t initial_ages) {
  SchedulerSpec spec;
  spec.kind = SchedulerKind::GES;
  spec.N = static_cast<std::uint32_t>(loops.size());
  spec.R = R;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    PenaltyTable table = build_penalty_table(loops[i], 1, static_cast<int>(i));
    // Very unstable loops may overflow before initial_ages; keep the finite
    // prefix and only fail if an episode actually reaches that age.
    try {
      table.extend_to(initial_ages);
    } catch (const NumericError&) {
    }
    spec.tables.push_back(std::move(table));
    spec.success_prob.push_back(loops[i].p);
  }
  return spec;
}

SchedulerSpec round_robin_spec(std::uint32_t N, std::uint32_t R) {
  SchedulerSpec spec;
  spec.kind = SchedulerKind::RoundRobin;
  spec.N = N;
  spec.R = R;
  return spec;
}

}  // namespace aoi
