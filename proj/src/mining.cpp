#include "lmlab/mining.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace lmlab {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

double RewardSchedule::sum() const {
  double total = 0.0;
  for (const auto& [bin, r] : per_bin) total += r;
  return total;
}

double RewardStatement::distributed() const {
  double total = 0.0;
  for (const auto& [id, v] : per_provider) total += v;
  return total;
}

std::vector<ScheduleViolation> validate_schedule(const RewardSchedule& schedule) {
  using Kind = ScheduleViolation::Kind;
  std::vector<ScheduleViolation> out;
  if (!(schedule.slot_reward >= 0.0) || !std::isfinite(schedule.slot_reward)) {
    out.push_back({Kind::BadTotal, std::nullopt, schedule.slot_reward, "slot_reward must be a nonnegative number"});
  }
  for (const auto& [bin, r] : schedule.per_bin) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      out.push_back({Kind::Negative, bin, r, "bin " + std::to_string(bin) + " has negative reward " + num(r)});
    }
  }
  const double residual = schedule.sum() - schedule.slot_reward;
  if (std::abs(residual) > kScheduleSumTolerance * std::abs(schedule.slot_reward)) {
    out.push_back({Kind::SumMismatch, std::nullopt, residual,
                   "per-bin rewards sum to " + num(schedule.sum()) + ", expected " + num(schedule.slot_reward) +
                       " (residual " + num(residual) + ")"});
  }
  return out;
}

std::vector<ScheduleViolation> validate_schedule(const RewardSchedule& schedule, const PoolConfig& config) {
  auto out = validate_schedule(schedule);
  for (const auto& [bin, r] : schedule.per_bin) {
    if (!config.contains_bin(bin)) {
      out.push_back({ScheduleViolation::Kind::OutOfWindow, bin, r,
                     "bin " + std::to_string(bin) + " outside pool window [" + std::to_string(config.i_min) + ", " +
                         std::to_string(config.i_max) + "]"});
    }
  }
  return out;
}

RewardStatement accrue_slot(const PoolState& state, const RewardSchedule& schedule) {
  RewardStatement st;
  for (const auto& id : state.providers()) st.per_provider[id] = 0.0;
  for (const auto& [bin, r] : schedule.per_bin) {
    if (r == 0.0) continue;
    const double total = state.liquidity_in(bin);
    if (total <= 0.0) {
      st.withheld += r;
      continue;
    }
    for (const auto& [id, l] : state.liquidity_of_bin(bin)) st.per_provider[id] += r * (l / total);
  }
  return st;
}

}  // namespace lmlab
