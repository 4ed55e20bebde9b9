#include "lmlab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <set>
#include <thread>

namespace lmlab {

namespace {

struct Market {
  PoolState state;
  RewardSchedule schedule;
  std::vector<ProviderSpec> providers;  // arrival order
  std::map<std::string, ProviderWallet> idle;
  std::map<std::string, int> last_bin;
  std::map<std::string, Allocation> initial;
};

std::vector<ProviderSpec> expand_providers(const SimScenario& s) {
  std::vector<ProviderSpec> out = s.providers;
  if (s.random_providers && s.random_providers->count > 0) {
    const RandomProviders& r = *s.random_providers;
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> ux(r.x_min, r.x_max);
    std::uniform_real_distribution<double> uy(r.y_min, r.y_max);
    for (int k = 0; k < r.count; ++k) {
      ProviderSpec p;
      p.id = r.id_prefix + std::to_string(k);
      p.wallet.x = ux(rng);
      p.wallet.y = uy(rng);
      p.policy = r.policy;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<ProviderSpec> arrival_sequence(const SimScenario& s) {
  std::vector<ProviderSpec> all = expand_providers(s);
  if (s.arrival_order.empty()) return all;
  std::vector<ProviderSpec> ordered;
  for (const auto& id : s.arrival_order) {
    auto it = std::find_if(all.begin(), all.end(), [&](const ProviderSpec& p) { return p.id == id; });
    ordered.push_back(*it);
  }
  return ordered;
}

RewardSchedule resolve_schedule(const SimScenario& s) {
  if (const auto* schedule = std::get_if<RewardSchedule>(&s.rewards)) return *schedule;
  return realize(std::get<DesignSpec>(s.rewards), s.pool);
}

ProviderWallet after_spending(const ProviderWallet& wallet, const TokenAmounts& spent) {
  return {std::max(0.0, wallet.x - spent.x), std::max(0.0, wallet.y - spent.y)};
}

Allocation plan(const ProviderSpec& spec, const ProviderWallet& wallet, const PoolState& state,
                const RewardSchedule& schedule, double tol) {
  switch (spec.policy) {
    case Policy::Fixed:
      return spec.fixed_allocation;
    case Policy::Proportional: {
      ProportionalOptions opts;
      opts.keep_unplaceable_idle = true;
      return proportional_allocation(wallet, schedule, state.current_price(), state.config(), opts);
    }
    case Policy::BestResponse: {
      if (wallet.empty()) return {};
      BestResponseOptions opts;
      opts.tol = tol;
      try {
        return best_response(wallet, aggregate_opponents(state, spec.id), schedule, state.current_price(),
                             state.config(), opts);
      } catch (const UnallocatableError&) {
        return {};
      }
    }
  }
  return {};
}

// Token movement between two positions, valued in Y at `price`.
double movement_value(const std::map<int, TokenAmounts>& before, const Allocation& after, double price) {
  std::set<int> bins;
  for (const auto& [b, t] : before) bins.insert(b);
  for (const auto& [b, t] : after.per_bin) bins.insert(b);
  double total = 0.0;
  for (int b : bins) {
    auto it = before.find(b);
    const TokenAmounts old_t = it == before.end() ? TokenAmounts{} : it->second;
    const TokenAmounts new_t = after.in(b);
    total += std::abs(new_t.x - old_t.x) * price + std::abs(new_t.y - old_t.y);
  }
  return total;
}

// Liquidity maps equal up to 1e-9 relative per bin.
bool same_positions(const std::map<int, double>& a, const std::map<int, double>& b) {
  std::set<int> bins;
  for (const auto& [k, v] : a) bins.insert(k);
  for (const auto& [k, v] : b) bins.insert(k);
  for (int k : bins) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    const double va = ia == a.end() ? 0.0 : ia->second;
    const double vb = ib == b.end() ? 0.0 : ib->second;
    if (std::abs(va - vb) > 1e-9 * std::max(std::abs(va), std::abs(vb))) return false;
  }
  return true;
}

Allocation as_allocation(const std::map<int, TokenAmounts>& holdings) {
  Allocation a;
  a.per_bin = holdings;
  return a;
}

Market arrive(const SimScenario& s) {
  if (auto problems = validate_scenario(s); !problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ScenarioError(msg);
  }
  Market m{PoolState(s.pool, Price(s.initial_price)), resolve_schedule(s), arrival_sequence(s), {}, {}, {}};
  for (const auto& spec : m.providers) {
    const Allocation alloc = plan(spec, spec.wallet, m.state, m.schedule, s.tol);
    m.state = deposit_allocation(m.state, spec.id, alloc);
    m.idle[spec.id] = after_spending(spec.wallet, alloc.total());
    m.last_bin[spec.id] = m.state.active_bin();
    m.initial[spec.id] = alloc;
  }
  return m;
}

double reallocate(Market& m, const ProviderSpec& spec, double tol) {
  const std::string& id = spec.id;
  const auto before = m.state.holdings_of(id);
  const auto before_liquidity = m.state.liquidity_of(id);
  ProviderWallet wallet = m.idle[id];
  for (const auto& [b, t] : before) {
    wallet.x += t.x;
    wallet.y += t.y;
  }
  const WithdrawResult out = withdraw_all(m.state, id);
  const Allocation alloc = plan(spec, wallet, out.state, m.schedule, tol);
  PoolState next = deposit_allocation(out.state, id, alloc);
  m.last_bin[id] = m.state.active_bin();
  if (same_positions(before_liquidity, next.liquidity_of(id))) return 0.0;
  const double moved = movement_value(before, alloc, m.state.current_price().value());
  m.state = std::move(next);
  m.idle[id] = after_spending(wallet, alloc.total());
  return moved;
}

}  // namespace

double SlotRecord::total_turnover() const {
  double total = 0.0;
  for (const auto& [id, t] : turnover) total += t;
  return total;
}

std::vector<std::string> validate_scenario(const SimScenario& s) {
  std::vector<std::string> problems;
  try {
    s.pool.validate();
  } catch (const Error& e) {
    problems.push_back(std::string("pool: ") + e.what());
    return problems;
  }
  try {
    bin_of(Price(s.initial_price), s.pool);
  } catch (const Error& e) {
    problems.push_back(std::string("initial_price: ") + e.what());
    return problems;
  }
  try {
    for (const auto& v : validate_schedule(resolve_schedule(s), s.pool)) problems.push_back("schedule: " + v.message);
  } catch (const Error& e) {
    problems.push_back(std::string("design: ") + e.what());
  }
  if (s.slots < 1) problems.push_back("slots must be positive");
  if (!(s.tol > 0.0)) problems.push_back("tol must be positive");

  if (s.random_providers) {
    const RandomProviders& r = *s.random_providers;
    if (r.count < 0) problems.push_back("random_providers.count must be nonnegative");
    if (!(r.x_min >= 0.0 && r.x_min <= r.x_max) || !(r.y_min >= 0.0 && r.y_min <= r.y_max)) {
      problems.push_back("random_providers ranges must satisfy 0 <= min <= max");
      return problems;
    }
    if (r.policy == Policy::Fixed) problems.push_back("random providers cannot use the fixed policy");
  }

  const auto all = expand_providers(s);
  std::set<std::string> ids;
  const Price p(s.initial_price);
  for (const auto& spec : all) {
    if (spec.id.empty()) problems.push_back("provider id must not be empty");
    if (!ids.insert(spec.id).second) problems.push_back("duplicate provider id '" + spec.id + "'");
    if (!(spec.wallet.x >= 0.0) || !(spec.wallet.y >= 0.0)) {
      problems.push_back("provider '" + spec.id + "' has a negative wallet");
    }
    if (spec.policy == Policy::Fixed) {
      const TokenAmounts total = spec.fixed_allocation.total();
      const double slack = 1e-9 * std::max({1.0, spec.wallet.x, spec.wallet.y});
      if (total.x > spec.wallet.x + slack || total.y > spec.wallet.y + slack) {
        problems.push_back("provider '" + spec.id + "' fixed allocation exceeds its wallet");
      }
      for (const auto& [bin, amounts] : spec.fixed_allocation.per_bin) {
        try {
          liquidity_for_tokens(bin, amounts, p, s.pool);
        } catch (const Error& e) {
          problems.push_back("provider '" + spec.id + "' bin " + std::to_string(bin) + ": " + e.what());
        }
      }
    }
  }
  if (!s.arrival_order.empty()) {
    std::set<std::string> order(s.arrival_order.begin(), s.arrival_order.end());
    if (order != ids || s.arrival_order.size() != all.size()) {
      problems.push_back("arrival_order must be a permutation of the provider ids");
    }
  }
  for (const auto& t : s.trades) {
    if (t.slot < 0 || t.slot >= s.slots) problems.push_back("trade at slot " + std::to_string(t.slot) + " out of range");
    if (!(t.amount > 0.0)) problems.push_back("trade amounts must be positive");
  }
  return problems;
}

SimReport run_scenario(const SimScenario& s) {
  Market m = arrive(s);
  SimReport report;
  for (const auto& spec : m.providers) {
    report.providers.push_back(spec.id);
    report.cumulative_rewards[spec.id] = 0.0;
    report.turnover[spec.id] = 0.0;
  }
  report.schedule = m.schedule;
  report.initial_price = s.initial_price;
  report.initial_allocations = m.initial;
  report.price_path.push_back(s.initial_price);

  std::vector<TradeSpec> trades = s.trades;
  std::stable_sort(trades.begin(), trades.end(), [](const TradeSpec& a, const TradeSpec& b) { return a.slot < b.slot; });
  auto next_trade = trades.begin();

  for (int slot = 0; slot < s.slots; ++slot) {
    SlotRecord rec;
    rec.slot = slot;
    for (; next_trade != trades.end() && next_trade->slot == slot; ++next_trade) {
      const SwapResult res = swap_exact_in(m.state, next_trade->side, next_trade->amount);
      rec.trades.push_back({next_trade->side, next_trade->amount, res.amount_in_used, res.amount_out});
      m.state = res.state;
    }
    for (const auto& spec : m.providers) {
      double moved = 0.0;
      if (spec.policy != Policy::Fixed) {
        const bool due = s.reallocation == Reallocation::EverySlot ||
                         (s.reallocation == Reallocation::OnBinShift && m.state.active_bin() != m.last_bin[spec.id]);
        if (due) moved = reallocate(m, spec, s.tol);
      }
      rec.turnover[spec.id] = moved;
      report.turnover[spec.id] += moved;
    }
    rec.rewards = accrue_slot(m.state, m.schedule);
    for (const auto& spec : m.providers) {
      const double v = rec.rewards.reward_of(spec.id);
      rec.rewards.per_provider[spec.id] = v;
      report.cumulative_rewards[spec.id] += v;
    }
    rec.price = m.state.current_price().value();
    rec.liquidity = m.state.liquidity_by_bin();
    report.price_path.push_back(rec.price);
    report.slots.push_back(std::move(rec));
  }
  return report;
}

std::vector<SimReport> run_batch(const std::vector<SimScenario>& scenarios, unsigned threads) {
  std::vector<SimReport> reports(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, scenarios.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        reports[i] = run_scenario(scenarios[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

StabilityProbe stability_probe(const SimScenario& scenario, int price_shift, const std::optional<std::string>& focus) {
  Market m = arrive(scenario);
  const PoolConfig& cfg = m.state.config();
  const int j = m.state.active_bin();
  if (!cfg.contains_bin(j + price_shift)) throw RangeError("shifted price leaves the tick window");
  // Keep the price's relative position inside its bin.
  const double offset = m.state.current_price().value() / tick_price(j, cfg);
  PoolState shifted = m.state;
  shifted.set_price(Price(tick_price(j + price_shift, cfg) * offset));
  const Price p = shifted.current_price();

  StabilityProbe probe;
  for (const auto& spec : m.providers) {
    ProviderProbe row;
    row.id = spec.id;
    const auto holdings = shifted.holdings_of(spec.id);
    const OpponentAggregate others = aggregate_opponents(shifted, spec.id);
    row.reward_static = expected_reward(as_allocation(holdings), others, m.schedule, p, cfg);
    row.reward_reoptimized = row.reward_static;

    ProviderWallet wallet = m.idle[spec.id];
    for (const auto& [b, t] : holdings) {
      wallet.x += t.x;
      wallet.y += t.y;
    }
    if (price_shift != 0 && !wallet.empty()) {
      BestResponseOptions opts;
      opts.tol = scenario.tol;
      try {
        const Allocation br = best_response(wallet, others, m.schedule, p, cfg, opts);
        const PoolState redeployed = deposit_allocation(withdraw_all(shifted, spec.id).state, spec.id, br);
        if (!same_positions(shifted.liquidity_of(spec.id), redeployed.liquidity_of(spec.id))) {
          row.reward_reoptimized = expected_reward(br, others, m.schedule, p, cfg);
          row.turnover_required = movement_value(holdings, br, p.value());
        }
      } catch (const UnallocatableError&) {
      }
    }
    row.reward_loss_if_static = std::max(0.0, row.reward_reoptimized - row.reward_static);
    probe.per_provider.push_back(row);
  }
  if (probe.per_provider.empty()) return probe;
  const std::string target = focus.value_or(m.providers.back().id);
  auto it = std::find_if(probe.per_provider.begin(), probe.per_provider.end(),
                         [&](const ProviderProbe& row) { return row.id == target; });
  if (it == probe.per_provider.end()) throw PreconditionError("unknown focus provider '" + target + "'");
  probe.turnover_required = it->turnover_required;
  probe.reward_loss_if_static = it->reward_loss_if_static;
  return probe;
}

}  // namespace lmlab
