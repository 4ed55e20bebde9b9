#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmlab/mining.hpp"
#include "lmlab/pool.hpp"

namespace lmlab {

struct ProviderWallet {
  double x = 0.0;
  double y = 0.0;

  bool empty() const { return x <= 0.0 && y <= 0.0; }
};

/// One provider's token deployment, keyed by bin index.
struct Allocation {
  std::map<int, TokenAmounts> per_bin;

  TokenAmounts total() const;
  TokenAmounts in(int bin) const {
    auto it = per_bin.find(bin);
    return it == per_bin.end() ? TokenAmounts{} : it->second;
  }
};

/// Total X and Y placed by everybody else, per bin.
struct OpponentAggregate {
  std::map<int, double> x;
  std::map<int, double> y;

  double x_in(int bin) const {
    auto it = x.find(bin);
    return it == x.end() ? 0.0 : it->second;
  }
  double y_in(int bin) const {
    auto it = y.find(bin);
    return it == y.end() ? 0.0 : it->second;
  }
};

OpponentAggregate aggregate_opponents(const PoolState& state, const std::string& exclude_provider);
OpponentAggregate aggregate_opponents(const std::map<std::string, Allocation>& profile, const std::string& exclude_provider);

/// How the rewarded bins sit relative to the current price. Only bins with
/// R_i > 0 are listed. When the price is exactly on a tick there is no active
/// bin and the bin starting at that tick belongs to the right side.
struct SupportSplit {
  int price_bin = 0;
  bool interior = false;         // price strictly inside price_bin
  bool active_rewarded = false;  // interior and R_{price_bin} > 0
  double coupling = 0.0;         // Y per X for an active-bin deposit
  std::vector<int> right;        // X-only bins
  std::vector<int> left;         // Y-only bins
};

SupportSplit split_support(const RewardSchedule& schedule, Price p_c, const PoolConfig& config);

struct ProportionalOptions {
  // Fraction of X committed to the active bin at an interior price.
  // Defaults to R_j / R.
  std::optional<double> active_share;
  // Leave tokens idle when their side carries no reward instead of throwing.
  bool keep_unplaceable_idle = false;
};

/// Deploys X over the right bins and Y over the left bins in proportion to
/// their rewards.
Allocation proportional_allocation(const ProviderWallet& wallet, const RewardSchedule& schedule, Price p_c,
                                   const PoolConfig& config, const ProportionalOptions& options = {});

/// Slot reward `mine` would collect against `others`: R_i times my share of
/// the bin, counted in X right of the price (and in the active bin) and in Y
/// to the left. Bins nobody occupies contribute nothing.
double expected_reward(const Allocation& mine, const OpponentAggregate& others, const RewardSchedule& schedule,
                       Price p_c, const PoolConfig& config);

struct BestResponseOptions {
  double tol = 1e-8;
  // Stake placed in an uncontested bin, as a fraction of the side budget.
  double min_stake_fraction = 1e-9;
  int scan_points = 33;
};

/// Maximizes sum_i R_i * x_i / (x_i + X_i) subject to sum_i x_i = budget.
/// Uncontested bins (X_i == 0) receive `min_stake` each; the rest of the
/// budget goes to contested bins by the KKT rule x_i = sqrt(R_i X_i / lambda) - X_i.
/// If every bin is uncontested the budget is spread in proportion to R_i.
std::vector<double> waterfill(std::span<const double> rewards, std::span<const double> opponent, double budget,
                              double min_stake);

Allocation best_response(const ProviderWallet& wallet, const OpponentAggregate& others, const RewardSchedule& schedule,
                         Price p_c, const PoolConfig& config, const BestResponseOptions& options = {});

/// Exhaustive search over a lattice with `grid_step` resolution (as a fraction
/// of each side budget, and of the feasible active-bin range). At most four
/// rewarded bins.
Allocation brute_force_best_response(const ProviderWallet& wallet, const OpponentAggregate& others,
                                     const RewardSchedule& schedule, Price p_c, const PoolConfig& config,
                                     double grid_step);

/// Largest relative improvement any provider could get by switching to a best
/// response: max_k (BR_k - V_k) / max(V_k, eps).
double nash_gap(const std::map<std::string, Allocation>& profile, const std::map<std::string, ProviderWallet>& wallets,
                const RewardSchedule& schedule, Price p_c, const PoolConfig& config, double tol = 1e-8);

// Converts the token allocation into liquidity at the current price and adds
// it to the pool. Throws SideError / CouplingError for invalid allocations.
PoolState deposit_allocation(const PoolState& state, const std::string& provider_id, const Allocation& allocation);

}  // namespace lmlab
