#pragma once

// Flattened per-action outcome plan and the per-state backup shared by the
// fast sweeps. Not part of the public interface.

#include <cstdint>
#include <limits>
#include <vector>

#include "aoisched/solver.hpp"

namespace aoi::detail {

class BackupPlan {
 public:
  explicit BackupPlan(const TruncatedMdp& mdp) : n_(mdp.space.config().N), m_(mdp.space.config().M) {
    const auto strides = mdp.space.strides();
    strides_.assign(strides.begin(), strides.end());
    for (const Action& a : mdp.actions) {
      std::vector<std::uint32_t> scheduled;
      for (std::uint64_t rest = a.mask; rest != 0; rest &= rest - 1)
        scheduled.push_back(static_cast<std::uint32_t>(std::countr_zero(rest)));
      action_first_.push_back(static_cast<std::uint32_t>(outcome_prob_.size()));
      const std::uint64_t patterns = std::uint64_t{1} << scheduled.size();
      for (std::uint64_t fail = 0; fail < patterns; ++fail) {
        const double prob = outcome_probability(a, fail, mdp.success_prob);
        if (prob == 0.0) continue;
        outcome_prob_.push_back(prob);
        outcome_first_.push_back(static_cast<std::uint32_t>(reset_loops_.size()));
        for (std::size_t j = 0; j < scheduled.size(); ++j)
          if (!((fail >> j) & 1u)) reset_loops_.push_back(scheduled[j]);
      }
    }
    action_first_.push_back(static_cast<std::uint32_t>(outcome_prob_.size()));
    outcome_first_.push_back(static_cast<std::uint32_t>(reset_loops_.size()));
  }

  std::uint32_t loops() const { return n_; }
  std::uint32_t levels() const { return m_; }

  // Decodes idx into 0-based digits.
  void decode(std::uint64_t idx, std::uint32_t* digit) const {
    for (std::uint32_t i = 0; i < n_; ++i) {
      digit[i] = static_cast<std::uint32_t>(idx % m_);
      idx /= m_;
    }
  }

  static void advance(std::uint32_t* digit, std::uint32_t n, std::uint32_t m) {
    for (std::uint32_t i = 0; i < n; ++i) {
      if (++digit[i] < m) return;
      digit[i] = 0;
    }
  }

  // Backup of one state given its digits. reset_offset is caller scratch of
  // size N. Strict '<' keeps the lowest action index on ties.
  Backup backup(const std::uint32_t* digit, double cost, double gamma, const double* J,
                std::uint64_t* reset_offset) const {
    std::uint64_t aged = 0;
    for (std::uint32_t i = 0; i < n_; ++i) {
      const std::uint64_t aged_digit = digit[i] + 1 < m_ ? digit[i] + 1 : m_ - 1;
      reset_offset[i] = aged_digit * strides_[i];
      aged += reset_offset[i];
    }
    Backup best{std::numeric_limits<double>::infinity(), 0};
    const auto actions = static_cast<std::uint32_t>(action_first_.size() - 1);
    for (std::uint32_t a = 0; a < actions; ++a) {
      double acc = 0.0;
      for (std::uint32_t o = action_first_[a]; o < action_first_[a + 1]; ++o) {
        std::uint64_t next = aged;
        for (std::uint32_t k = outcome_first_[o]; k < outcome_first_[o + 1]; ++k)
          next -= reset_offset[reset_loops_[k]];
        acc += outcome_prob_[o] * J[next];
      }
      const double v = cost + gamma * acc;
      if (v < best.value) best = {v, a};
    }
    if (best.value == std::numeric_limits<double>::infinity()) {
      // Every candidate was +inf or NaN; surface it to the finiteness check.
      best.value = std::numeric_limits<double>::quiet_NaN();
    }
    return best;
  }

 private:
  std::uint32_t n_;
  std::uint32_t m_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::uint32_t> action_first_;
  std::vector<double> outcome_prob_;
  std::vector<std::uint32_t> outcome_first_;
  std::vector<std::uint32_t> reset_loops_;
};

}  // namespace aoi::detail
