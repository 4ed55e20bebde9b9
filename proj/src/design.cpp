#include "lmlab/design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

namespace lmlab {

namespace {

RewardSchedule normalized(const std::map<int, double>& weights, double slot_reward) {
  double total = 0.0;
  for (const auto& [bin, w] : weights) total += w;
  RewardSchedule s;
  s.slot_reward = slot_reward;
  for (const auto& [bin, w] : weights) s.per_bin[bin] = slot_reward * (w / total);
  return s;
}

void check_reward(double slot_reward) {
  if (!(slot_reward >= 0.0) || !std::isfinite(slot_reward)) throw DesignError("slot reward must be nonnegative");
}

}  // namespace

BinRange bins_covering(Price p_a, Price p_b, const PoolConfig& config) {
  if (!(p_a < p_b)) throw DesignError("price interval needs p_a < p_b");
  const double top = tick_price(config.i_max + 1, config);
  if (p_b.value() > top) throw RangeError("upper price beyond the tick window");
  const int lo = bin_of(p_a, config);
  int hi = config.i_max;
  if (p_b.value() < top) {
    const int k = bin_of(p_b, config);
    hi = tick_price(k, config) == p_b.value() ? k - 1 : k;
  }
  return {lo, hi};
}

RewardSchedule design_low_slippage(int center_bin, double alpha, BinRange support, double slot_reward) {
  check_reward(slot_reward);
  if (!(alpha > 0.0)) throw DesignError("decay rate alpha must be positive");
  if (support.hi < support.lo) throw DesignError("empty support");
  if (!support.contains(center_bin)) throw DesignError("center bin outside support");
  std::map<int, double> w;
  for (int i = support.lo; i <= support.hi; ++i) w[i] = std::exp(-alpha * std::abs(i - center_bin));
  return normalized(w, slot_reward);
}

RewardSchedule design_price_stabilization(Price p_a, Price p_b, double beta, double slot_reward,
                                          const PoolConfig& config) {
  check_reward(slot_reward);
  if (!(beta > 0.0)) throw DesignError("edge-concentration rate beta must be positive");
  const BinRange range = bins_covering(p_a, p_b, config);
  std::map<int, double> w;
  for (int i = range.lo; i <= range.hi; ++i) {
    w[i] = std::exp(-beta * std::min(i - range.lo, range.hi - i));
  }
  return normalized(w, slot_reward);
}

RewardSchedule design_v2_equivalent(Price p_c, BinRange window, std::optional<double> right_share, double slot_reward,
                                    const PoolConfig& config) {
  check_reward(slot_reward);
  if (window.hi < window.lo) throw DesignError("empty window");
  if (!config.contains_bin(window.lo) || !config.contains_bin(window.hi)) throw RangeError("window outside the pool");
  if (!on_tick(p_c, config)) throw DesignError("v2-equivalent design needs the price on a tick");
  const int j = bin_of(p_c, config);

  std::map<int, double> right;
  std::map<int, double> left;
  double w_right = 0.0;
  double w_left = 0.0;
  for (int i = window.lo; i <= window.hi; ++i) {
    const double s_lo = std::sqrt(tick_price(i, config));
    const double s_hi = std::sqrt(tick_price(i + 1, config));
    if (i >= j) {
      right[i] = 1.0 / s_lo - 1.0 / s_hi;
      w_right += right[i];
    } else {
      left[i] = s_hi - s_lo;
      w_left += left[i];
    }
  }
  const double rho = right_share.value_or(w_right / (w_right + w_left));
  if (!(rho >= 0.0 && rho <= 1.0)) throw DesignError("right_share must lie in [0, 1]");
  if ((rho > 0.0 && right.empty()) || (rho < 1.0 && left.empty())) {
    throw DesignError("window has no bins on a side that receives budget");
  }

  RewardSchedule s;
  s.slot_reward = slot_reward;
  for (const auto& [i, w] : right) s.per_bin[i] = rho * slot_reward * (w / w_right);
  for (const auto& [i, w] : left) s.per_bin[i] = (1.0 - rho) * slot_reward * (w / w_left);
  return s;
}

RewardSchedule mix(const std::vector<RewardSchedule>& schedules, const std::vector<double>& weights,
                   double slot_reward) {
  check_reward(slot_reward);
  if (schedules.empty() || schedules.size() != weights.size()) {
    throw DesignError("mix needs one weight per schedule");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DesignError("mixture weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw DesignError("mixture weights must sum to 1");

  std::map<int, double> combined;
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const double total = schedules[k].sum();
    if (!(total > 0.0)) throw DesignError("cannot mix a schedule with zero total reward");
    for (const auto& [bin, r] : schedules[k].per_bin) combined[bin] += weights[k] * (r / total);
  }
  return normalized(combined, slot_reward);
}

double slippage_of_trade(const PoolState& state, SwapSide side, double amount_in) {
  const SwapResult res = swap_exact_in(state, side, amount_in);
  if (!(res.amount_in_used > 0.0) || !(res.amount_out > 0.0)) {
    throw MetricError("trade cannot execute: no liquidity in its direction");
  }
  const double p = state.current_price().value();
  if (side == SwapSide::YIn) return (res.amount_in_used / res.amount_out) / p - 1.0;
  return p * (res.amount_in_used / res.amount_out) - 1.0;
}

double breakout_cost(const PoolState& state, BreakoutDirection direction, Price boundary) {
  const PoolConfig& cfg = state.config();
  const double p = state.current_price().value();
  const double b = boundary.value();
  int i = bin_of(state.current_price(), cfg);
  double cost = 0.0;
  if (direction == BreakoutDirection::Up) {
    if (!(b > p)) throw DirectionError("upward breakout needs a boundary above the price");
    if (b > tick_price(cfg.i_max + 1, cfg)) throw RangeError("boundary beyond the tick window");
    for (; i <= cfg.i_max && tick_price(i, cfg) < b; ++i) {
      const double lo = std::max(tick_price(i, cfg), p);
      const double hi = std::min(tick_price(i + 1, cfg), b);
      cost += state.liquidity_in(i) * (std::sqrt(hi) - std::sqrt(lo));
    }
  } else {
    if (!(b < p)) throw DirectionError("downward breakout needs a boundary below the price");
    if (b < tick_price(cfg.i_min, cfg)) throw RangeError("boundary beyond the tick window");
    for (; i >= cfg.i_min && tick_price(i + 1, cfg) > b; --i) {
      const double lo = std::max(tick_price(i, cfg), b);
      const double hi = std::min(tick_price(i + 1, cfg), p);
      if (hi > lo) cost += state.liquidity_in(i) * (1.0 / std::sqrt(lo) - 1.0 / std::sqrt(hi));
    }
  }
  return cost;
}

RewardSchedule realize(const DesignSpec& spec, const PoolConfig& config) {
  return std::visit(
      [&](const auto& params) -> RewardSchedule {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, LowSlippageParams>) {
          return design_low_slippage(params.center_bin, params.alpha, params.support, spec.slot_reward);
        } else if constexpr (std::is_same_v<T, PriceStabilizationParams>) {
          return design_price_stabilization(Price(params.p_a), Price(params.p_b), params.beta, spec.slot_reward, config);
        } else if constexpr (std::is_same_v<T, V2EquivalentParams>) {
          return design_v2_equivalent(Price(params.price), params.window, params.right_share, spec.slot_reward, config);
        } else {
          std::vector<RewardSchedule> parts;
          for (DesignSpec component : params.components) {
            component.slot_reward = spec.slot_reward;
            parts.push_back(realize(component, config));
          }
          return mix(parts, params.weights, spec.slot_reward);
        }
      },
      spec.params);
}

}  // namespace lmlab
