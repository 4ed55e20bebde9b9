#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lmlab/mining.hpp"
#include "lmlab/pool.hpp"

namespace lmlab {

/// Inclusive range of bin indices.
struct BinRange {
  int lo = 0;
  int hi = 0;

  bool contains(int i) const { return i >= lo && i <= hi; }
  int size() const { return hi - lo + 1; }
};

// R_i proportional to exp(-alpha * |i - center_bin|) over `support`.
RewardSchedule design_low_slippage(int center_bin, double alpha, BinRange support, double slot_reward);

// Rewards concentrated at both edges of the bins covering [p_a, p_b]:
// R_i proportional to exp(-beta * distance to the nearer edge bin).
RewardSchedule design_price_stabilization(Price p_a, Price p_b, double beta, double slot_reward,
                                          const PoolConfig& config);

/// Reproduces a constant-product (x*y = k) liquidity profile inside `window`
/// when providers allocate proportionally. The price must sit on a tick.
/// Right of it bins are weighted by 1/sqrt(p_i) - 1/sqrt(p_{i+1}), left of it
/// by sqrt(p_{i+1}) - sqrt(p_i). `right_share` is the fraction of R given to
/// the right side; by default the truncated weight sums decide it.
RewardSchedule design_v2_equivalent(Price p_c, BinRange window, std::optional<double> right_share, double slot_reward,
                                    const PoolConfig& config);

// Convex combination of schedules, rescaled to `slot_reward`.
RewardSchedule mix(const std::vector<RewardSchedule>& schedules, const std::vector<double>& weights,
                   double slot_reward);

/// Relative price degradation of a trade executed on a copy of `state`:
/// average execution price over the pre-trade marginal price, minus one,
/// with both quoted in the input token so that worse is positive.
double slippage_of_trade(const PoolState& state, SwapSide side, double amount_in);

enum class BreakoutDirection { Up, Down };

/// Input tokens needed to push the price from its current value to
/// `boundary`: Y for Up, X for Down.
double breakout_cost(const PoolState& state, BreakoutDirection direction, Price boundary);

// The index interval of bins covering [p_a, p_b].
BinRange bins_covering(Price p_a, Price p_b, const PoolConfig& config);

// Declarative form of the designers above, as read from config files.
struct LowSlippageParams {
  int center_bin = 0;
  double alpha = 1.0;
  BinRange support;
};

struct PriceStabilizationParams {
  double p_a = 0.0;
  double p_b = 0.0;
  double beta = 1.0;
};

struct V2EquivalentParams {
  double price = 1.0;
  BinRange window;
  std::optional<double> right_share;
};

struct DesignSpec;

struct MixtureParams {
  std::vector<DesignSpec> components;
  std::vector<double> weights;
};

struct DesignSpec {
  double slot_reward = 0.0;
  std::variant<LowSlippageParams, PriceStabilizationParams, V2EquivalentParams, MixtureParams> params;
};

// Mixture components are realized with the parent's slot reward.
RewardSchedule realize(const DesignSpec& spec, const PoolConfig& config);

}  // namespace lmlab
