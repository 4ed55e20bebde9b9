#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lmlab/pool.hpp"

namespace lmlab {

/// Per-slot reward budget R and its split R_i over supported bins.
struct RewardSchedule {
  double slot_reward = 0.0;
  std::map<int, double> per_bin;

  double reward_in(int bin) const {
    auto it = per_bin.find(bin);
    return it == per_bin.end() ? 0.0 : it->second;
  }
  double sum() const;
};

struct ScheduleViolation {
  enum class Kind { SumMismatch, Negative, OutOfWindow, BadTotal };
  Kind kind;
  std::optional<int> bin;
  double value = 0.0;  // offending entry, or the residual for SumMismatch
  std::string message;
};

// Relative tolerance for sum(R_i) == R.
inline constexpr double kScheduleSumTolerance = 1e-9;

std::vector<ScheduleViolation> validate_schedule(const RewardSchedule& schedule);
std::vector<ScheduleViolation> validate_schedule(const RewardSchedule& schedule, const PoolConfig& config);

struct RewardStatement {
  std::map<std::string, double> per_provider;
  // Reward of supported bins that held no liquidity at the snapshot.
  double withheld = 0.0;

  double distributed() const;
  double reward_of(const std::string& provider_id) const {
    auto it = per_provider.find(provider_id);
    return it == per_provider.end() ? 0.0 : it->second;
  }
};

/// Distributes one slot of rewards pro rata to liquidity in each supported
/// bin. Every provider present in the pool appears in the statement.
RewardStatement accrue_slot(const PoolState& state, const RewardSchedule& schedule);

}  // namespace lmlab
