#include "lmlab/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "lmlab/optimize.hpp"

namespace lmlab {

namespace {

double share_value(double reward, double mine, double opp) {
  const double total = mine + opp;
  return total > 0.0 ? reward * (mine / total) : 0.0;
}

// One side of the book: bins that take a single token.
struct SideProblem {
  std::vector<int> bins;
  std::vector<double> rewards;
  std::vector<double> opponent;

  double value(const std::vector<double>& mine) const {
    double v = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) v += share_value(rewards[i], mine[i], opponent[i]);
    return v;
  }
  double reward_total() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }
};

SideProblem make_side(const std::vector<int>& bins, const RewardSchedule& schedule,
                      const std::map<int, double>& opponent) {
  SideProblem side;
  side.bins = bins;
  for (int b : bins) {
    side.rewards.push_back(schedule.reward_in(b));
    auto it = opponent.find(b);
    side.opponent.push_back(it == opponent.end() ? 0.0 : it->second);
  }
  return side;
}

void check_wallet(const ProviderWallet& wallet) {
  if (!(wallet.x >= 0.0) || !(wallet.y >= 0.0) || !std::isfinite(wallet.x) || !std::isfinite(wallet.y)) {
    throw PreconditionError("wallet amounts must be nonnegative and finite");
  }
}

bool can_place_anything(const SupportSplit& split, const ProviderWallet& wallet) {
  const bool active = split.active_rewarded && wallet.x > 0.0 && wallet.y > 0.0;
  return (wallet.x > 0.0 && !split.right.empty()) || (wallet.y > 0.0 && !split.left.empty()) || active;
}

}  // namespace

TokenAmounts Allocation::total() const {
  TokenAmounts t;
  for (const auto& [bin, a] : per_bin) t += a;
  return t;
}

OpponentAggregate aggregate_opponents(const PoolState& state, const std::string& exclude_provider) {
  OpponentAggregate agg;
  for (const auto& id : state.providers()) {
    if (id == exclude_provider) continue;
    for (const auto& [bin, t] : state.holdings_of(id)) {
      if (t.x > 0.0) agg.x[bin] += t.x;
      if (t.y > 0.0) agg.y[bin] += t.y;
    }
  }
  return agg;
}

OpponentAggregate aggregate_opponents(const std::map<std::string, Allocation>& profile,
                                      const std::string& exclude_provider) {
  OpponentAggregate agg;
  for (const auto& [id, alloc] : profile) {
    if (id == exclude_provider) continue;
    for (const auto& [bin, t] : alloc.per_bin) {
      if (t.x > 0.0) agg.x[bin] += t.x;
      if (t.y > 0.0) agg.y[bin] += t.y;
    }
  }
  return agg;
}

SupportSplit split_support(const RewardSchedule& schedule, Price p_c, const PoolConfig& config) {
  SupportSplit split;
  split.price_bin = bin_of(p_c, config);
  split.interior = tick_price(split.price_bin, config) != p_c.value();
  if (split.interior) split.coupling = coupling_ratio(p_c, config);
  for (const auto& [bin, r] : schedule.per_bin) {
    if (!(r > 0.0)) continue;
    if (bin > split.price_bin || (bin == split.price_bin && !split.interior)) {
      split.right.push_back(bin);
    } else if (bin < split.price_bin) {
      split.left.push_back(bin);
    } else {
      split.active_rewarded = true;
    }
  }
  return split;
}

Allocation proportional_allocation(const ProviderWallet& wallet, const RewardSchedule& schedule, Price p_c,
                                   const PoolConfig& config, const ProportionalOptions& options) {
  check_wallet(wallet);
  Allocation alloc;
  if (wallet.empty()) return alloc;
  const SupportSplit split = split_support(schedule, p_c, config);
  const SideProblem right = make_side(split.right, schedule, {});
  const SideProblem left = make_side(split.left, schedule, {});

  double rest_x = wallet.x;
  double rest_y = wallet.y;

  if (split.active_rewarded) {
    const double c = split.coupling;
    const double r_j = schedule.reward_in(split.price_bin);
    const double share = options.active_share.value_or(r_j / (r_j + right.reward_total() + left.reward_total()));
    if (!(share >= 0.0 && share <= 1.0)) throw PreconditionError("active_share must lie in [0, 1]");
    double t = std::min(share * wallet.x, wallet.y / c);
    // Tokens whose side carries no reward can still go to the active bin.
    if (right.bins.empty()) t = std::min(wallet.x, wallet.y / c);
    if (left.bins.empty()) t = std::max(t, std::min(wallet.x, wallet.y / c));
    rest_x = std::max(0.0, wallet.x - t);
    rest_y = std::max(0.0, wallet.y - c * t);
    if (t > 0.0) alloc.per_bin[split.price_bin] = {t, c * t};
  }

  auto spread = [&](const SideProblem& side, double budget, bool is_x) {
    if (budget <= 0.0) return;
    if (side.bins.empty()) {
      if (options.keep_unplaceable_idle) return;
      throw UnallocatableError(std::string("no rewarded bin on the ") + (is_x ? "X (right)" : "Y (left)") +
                               " side of the price");
    }
    const double total = side.reward_total();
    for (std::size_t i = 0; i < side.bins.size(); ++i) {
      const double amount = budget * (side.rewards[i] / total);
      if (is_x) {
        alloc.per_bin[side.bins[i]].x = amount;
      } else {
        alloc.per_bin[side.bins[i]].y = amount;
      }
    }
  };
  spread(right, rest_x, true);
  spread(left, rest_y, false);
  return alloc;
}

double expected_reward(const Allocation& mine, const OpponentAggregate& others, const RewardSchedule& schedule,
                       Price p_c, const PoolConfig& config) {
  const int j = bin_of(p_c, config);
  const bool interior = tick_price(j, config) != p_c.value();
  for (const auto& [bin, t] : mine.per_bin) {
    const bool x_side = bin > j || (bin == j && !interior);
    if ((x_side && t.y != 0.0) || (bin < j && t.x != 0.0)) {
      throw SideError("allocation puts the wrong token in bin " + std::to_string(bin));
    }
  }
  double total = 0.0;
  for (const auto& [bin, r] : schedule.per_bin) {
    if (!(r > 0.0)) continue;
    // Within one bin liquidity is proportional to the X amount (or the Y
    // amount left of the price), so token shares equal liquidity shares.
    if (bin >= j) {
      total += share_value(r, mine.in(bin).x, others.x_in(bin));
    } else {
      total += share_value(r, mine.in(bin).y, others.y_in(bin));
    }
  }
  return total;
}

std::vector<double> waterfill(std::span<const double> rewards, std::span<const double> opponent, double budget,
                              double min_stake) {
  const std::size_t n = rewards.size();
  std::vector<double> x(n, 0.0);
  if (!(budget > 0.0) || n == 0) return x;

  std::vector<std::size_t> uncontested;
  std::vector<std::size_t> contested;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rewards[i] > 0.0)) continue;
    (opponent[i] > 0.0 ? contested : uncontested).push_back(i);
  }
  if (contested.empty()) {
    double total = 0.0;
    for (auto i : uncontested) total += rewards[i];
    for (auto i : uncontested) x[i] = budget * (rewards[i] / total);
    return x;
  }

  double remaining = budget;
  if (!uncontested.empty() && min_stake > 0.0) {
    const double stake = std::min(min_stake, budget / static_cast<double>(uncontested.size()));
    for (auto i : uncontested) x[i] = stake;
    remaining -= stake * static_cast<double>(uncontested.size());
  }
  if (!(remaining > 0.0)) return x;

  // With mu = 1/sqrt(lambda) the stationarity rule reads
  // x_i = max(0, s_i * mu - X_i), s_i = sqrt(R_i X_i); bin i opens at
  // mu = X_i / s_i. Spending is piecewise linear and nondecreasing in mu, so
  // bisect over the sorted knots for the active set and solve that segment.
  struct Knot {
    std::size_t idx;
    double s;
    double opp;
    double mu;
  };
  std::vector<Knot> knots;
  knots.reserve(contested.size());
  for (auto i : contested) {
    const double s = std::sqrt(rewards[i] * opponent[i]);
    knots.push_back({i, s, opponent[i], opponent[i] / s});
  }
  std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.mu < b.mu; });

  auto spent_at = [&](double mu) {
    double total = 0.0;
    for (const auto& k : knots) total += std::max(0.0, k.s * mu - k.opp);
    return total;
  };
  std::size_t lo = 1;
  std::size_t hi = knots.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (spent_at(knots[mid - 1].mu) < remaining) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  double sum_s = 0.0;
  double sum_opp = 0.0;
  for (std::size_t k = 0; k < lo; ++k) {
    sum_s += knots[k].s;
    sum_opp += knots[k].opp;
  }
  const double mu = (remaining + sum_opp) / sum_s;
  for (std::size_t k = 0; k < lo; ++k) x[knots[k].idx] += std::max(0.0, knots[k].s * mu - knots[k].opp);
  return x;
}

Allocation best_response(const ProviderWallet& wallet, const OpponentAggregate& others, const RewardSchedule& schedule,
                         Price p_c, const PoolConfig& config, const BestResponseOptions& options) {
  check_wallet(wallet);
  if (!(options.tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (wallet.empty()) throw PreconditionError("best response needs a nonzero wallet");
  const SupportSplit split = split_support(schedule, p_c, config);
  if (!can_place_anything(split, wallet)) throw UnallocatableError("no rewarded bin can take this wallet's tokens");

  const SideProblem right = make_side(split.right, schedule, others.x);
  const SideProblem left = make_side(split.left, schedule, others.y);
  const double stake_x = options.min_stake_fraction * wallet.x;
  const double stake_y = options.min_stake_fraction * wallet.y;
  const double c = split.coupling;

  auto solve_right = [&](double budget) { return waterfill(right.rewards, right.opponent, budget, stake_x); };
  auto solve_left = [&](double budget) { return waterfill(left.rewards, left.opponent, budget, stake_y); };

  double t = 0.0;
  if (split.active_rewarded) {
    const double r_j = schedule.reward_in(split.price_bin);
    const double opp_j = others.x_in(split.price_bin);
    const double t_max = std::min(wallet.x, wallet.y / c);
    // Value as a function of the X committed to the active bin; Y follows
    // through the coupling ratio and both residuals are waterfilled.
    auto value = [&](double tt) {
      return share_value(r_j, tt, opp_j) + right.value(solve_right(std::max(0.0, wallet.x - tt))) +
             left.value(solve_left(std::max(0.0, wallet.y - c * tt)));
    };
    if (t_max > 0.0) {
      const double lo = opp_j > 0.0 ? 0.0 : std::min(stake_x, t_max);
      const int n = std::max(options.scan_points, 3);
      const double step = (t_max - lo) / (n - 1);
      int best_k = 0;
      double best_v = value(lo);
      for (int k = 1; k < n; ++k) {
        const double v = value(lo + k * step);
        if (v > best_v) {
          best_v = v;
          best_k = k;
        }
      }
      t = lo + best_k * step;
      if (step > 0.0) {
        const double a = lo + std::max(0, best_k - 1) * step;
        const double b = std::min(t_max, lo + (best_k + 1) * step);
        const ScalarMax refined = golden_section_maximize(value, a, b, options.tol * t_max);
        if (refined.value > best_v) {
          best_v = refined.value;
          t = refined.arg;
        }
      }
      if (lo > 0.0 && value(0.0) > best_v) t = 0.0;
    }
  }

  Allocation alloc;
  if (t > 0.0) alloc.per_bin[split.price_bin] = {t, c * t};
  const auto xr = solve_right(std::max(0.0, wallet.x - t));
  const auto yl = solve_left(std::max(0.0, wallet.y - c * t));
  for (std::size_t i = 0; i < right.bins.size(); ++i) {
    if (xr[i] > 0.0) alloc.per_bin[right.bins[i]].x = xr[i];
  }
  for (std::size_t i = 0; i < left.bins.size(); ++i) {
    if (yl[i] > 0.0) alloc.per_bin[left.bins[i]].y = yl[i];
  }
  return alloc;
}

Allocation brute_force_best_response(const ProviderWallet& wallet, const OpponentAggregate& others,
                                     const RewardSchedule& schedule, Price p_c, const PoolConfig& config,
                                     double grid_step) {
  check_wallet(wallet);
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw PreconditionError("grid_step must lie in (0, 1]");
  const SupportSplit split = split_support(schedule, p_c, config);
  const std::size_t bins = split.right.size() + split.left.size() + (split.active_rewarded ? 1 : 0);
  if (bins > 4) throw SizeError("brute force supports at most 4 rewarded bins, got " + std::to_string(bins));
  if (bins == 0) throw UnallocatableError("schedule has no rewarded bins");

  const long levels = std::max(1L, std::lround(1.0 / grid_step));
  const SideProblem right = make_side(split.right, schedule, others.x);
  const SideProblem left = make_side(split.left, schedule, others.y);

  struct Lattice {
    double value = 0.0;
    std::vector<long> parts;
  };
  // Best exhaustive split of `budget` into lattice units over one side,
  // enumerated in lexicographic order so ties keep the smallest vector.
  auto best_split = [&](const SideProblem& side, double budget) {
    const std::size_t m = side.bins.size();
    Lattice best{0.0, std::vector<long>(m, 0)};
    if (m == 0 || !(budget > 0.0)) return best;
    std::vector<std::vector<double>> table(m, std::vector<double>(levels + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (long a = 0; a <= levels; ++a) {
        table[i][a] = share_value(side.rewards[i], budget * static_cast<double>(a) / levels, side.opponent[i]);
      }
    }
    std::vector<long> cur(m, 0);
    bool found = false;
    std::function<void(std::size_t, long, double)> walk = [&](std::size_t i, long rest, double acc) {
      if (i + 1 == m) {
        cur[i] = rest;
        const double v = acc + table[i][rest];
        if (!found || v > best.value) {
          found = true;
          best.value = v;
          best.parts = cur;
        }
        return;
      }
      for (long a = 0; a <= rest; ++a) {
        cur[i] = a;
        walk(i + 1, rest - a, acc + table[i][a]);
      }
    };
    walk(0, levels, 0.0);
    return best;
  };

  const double c = split.coupling;
  const double t_max = split.active_rewarded ? std::min(wallet.x, wallet.y / c) : 0.0;
  const long t_levels = t_max > 0.0 ? levels : 0;
  const double r_j = split.active_rewarded ? schedule.reward_in(split.price_bin) : 0.0;
  const double opp_j = others.x_in(split.price_bin);

  double best_value = -1.0;
  double best_t = 0.0;
  Lattice best_right;
  Lattice best_left;
  for (long k = 0; k <= t_levels; ++k) {
    const double t = t_levels > 0 ? t_max * static_cast<double>(k) / t_levels : 0.0;
    const double bx = std::max(0.0, wallet.x - t);
    const double by = std::max(0.0, wallet.y - c * t);
    Lattice r = best_split(right, bx);
    Lattice l = best_split(left, by);
    const double v = share_value(r_j, t, opp_j) + r.value + l.value;
    if (v > best_value) {
      best_value = v;
      best_t = t;
      best_right = std::move(r);
      best_left = std::move(l);
    }
  }

  Allocation alloc;
  if (best_t > 0.0) alloc.per_bin[split.price_bin] = {best_t, c * best_t};
  const double bx = std::max(0.0, wallet.x - best_t);
  const double by = std::max(0.0, wallet.y - c * best_t);
  for (std::size_t i = 0; i < right.bins.size() && bx > 0.0; ++i) {
    if (best_right.parts[i] > 0) alloc.per_bin[right.bins[i]].x = bx * static_cast<double>(best_right.parts[i]) / levels;
  }
  for (std::size_t i = 0; i < left.bins.size() && by > 0.0; ++i) {
    if (best_left.parts[i] > 0) alloc.per_bin[left.bins[i]].y = by * static_cast<double>(best_left.parts[i]) / levels;
  }
  return alloc;
}

double nash_gap(const std::map<std::string, Allocation>& profile, const std::map<std::string, ProviderWallet>& wallets,
                const RewardSchedule& schedule, Price p_c, const PoolConfig& config, double tol) {
  const double floor_reward = 1e-12 * std::max(schedule.slot_reward, 1e-300);
  double gap = 0.0;
  for (const auto& [id, alloc] : profile) {
    auto wit = wallets.find(id);
    if (wit == wallets.end()) throw PreconditionError("no wallet for provider " + id);
    if (wit->second.empty()) continue;
    const OpponentAggregate others = aggregate_opponents(profile, id);
    const double current = expected_reward(alloc, others, schedule, p_c, config);
    BestResponseOptions opts;
    opts.tol = tol;
    Allocation br;
    try {
      br = best_response(wit->second, others, schedule, p_c, config, opts);
    } catch (const UnallocatableError&) {
      continue;  // nothing this wallet can place, so nothing to improve
    }
    const double improved = expected_reward(br, others, schedule, p_c, config);
    gap = std::max(gap, (improved - current) / std::max(current, floor_reward));
  }
  return gap;
}

PoolState deposit_allocation(const PoolState& state, const std::string& provider_id, const Allocation& allocation) {
  PoolState next = state;
  for (const auto& [bin, amounts] : allocation.per_bin) {
    if (amounts.x == 0.0 && amounts.y == 0.0) continue;
    const double l = liquidity_for_tokens(bin, amounts, state.current_price(), state.config());
    next.add_liquidity(provider_id, bin, l);
  }
  return next;
}

}  // namespace lmlab
