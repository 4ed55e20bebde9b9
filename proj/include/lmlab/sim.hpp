#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lmlab/design.hpp"
#include "lmlab/mining.hpp"
#include "lmlab/pool.hpp"
#include "lmlab/strategy.hpp"

namespace lmlab {

enum class Policy { Proportional, BestResponse, Fixed };
enum class Reallocation { Never, EverySlot, OnBinShift };

struct ProviderSpec {
  std::string id;
  ProviderWallet wallet;
  Policy policy = Policy::Proportional;
  Allocation fixed_allocation;  // used by Policy::Fixed only
};

// Extra providers with wallets drawn uniformly from the given ranges.
struct RandomProviders {
  int count = 0;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  Policy policy = Policy::Proportional;
  std::string id_prefix = "rand";
};

struct TradeSpec {
  int slot = 0;
  SwapSide side = SwapSide::YIn;
  double amount = 0.0;
};

struct SimScenario {
  PoolConfig pool;
  double initial_price = 1.0;
  std::variant<RewardSchedule, DesignSpec> rewards;
  std::vector<ProviderSpec> providers;
  std::vector<std::string> arrival_order;  // empty: listing order
  int slots = 1;
  std::vector<TradeSpec> trades;
  Reallocation reallocation = Reallocation::Never;
  std::uint64_t seed = 0;
  std::optional<RandomProviders> random_providers;
  double tol = 1e-8;
};

// Empty when the scenario is runnable.
std::vector<std::string> validate_scenario(const SimScenario& scenario);

struct TradeFill {
  SwapSide side = SwapSide::YIn;
  double amount_in = 0.0;
  double amount_used = 0.0;
  double amount_out = 0.0;
};

struct SlotRecord {
  int slot = 0;
  double price = 0.0;
  std::vector<TradeFill> trades;
  RewardStatement rewards;
  std::map<int, double> liquidity;
  std::map<std::string, double> turnover;

  double total_turnover() const;
};

struct SimReport {
  std::vector<std::string> providers;  // arrival order
  RewardSchedule schedule;
  double initial_price = 0.0;
  std::map<std::string, Allocation> initial_allocations;
  std::vector<SlotRecord> slots;
  std::map<std::string, double> cumulative_rewards;
  // Absolute token movement from reallocations, valued in Y at the price of
  // each move.
  std::map<std::string, double> turnover;
  std::vector<double> price_path;  // initial price, then price at each slot end
};

/// Providers arrive in order, each allocating against the pool its
/// predecessors left. Each slot then runs its trades, applies the
/// reallocation rule and accrues one slot of rewards. Throws ScenarioError
/// listing every validation problem.
SimReport run_scenario(const SimScenario& scenario);

// Runs independent scenarios concurrently; results keep the input order.
std::vector<SimReport> run_batch(const std::vector<SimScenario>& scenarios, unsigned threads = 0);

struct ProviderProbe {
  std::string id;
  double reward_static = 0.0;
  double reward_reoptimized = 0.0;
  double reward_loss_if_static = 0.0;
  double turnover_required = 0.0;
};

struct StabilityProbe {
  // For the focus provider (last arrival unless named).
  double turnover_required = 0.0;
  double reward_loss_if_static = 0.0;
  std::vector<ProviderProbe> per_provider;
};

/// Moves the price by `price_shift` bins after the arrival phase and compares
/// each provider's slot reward when keeping its positions against a best
/// response to the others' unchanged positions.
StabilityProbe stability_probe(const SimScenario& scenario, int price_shift,
                               const std::optional<std::string>& focus = std::nullopt);

}  // namespace lmlab
