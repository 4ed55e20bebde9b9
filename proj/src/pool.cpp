#include "lmlab/pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace lmlab {

namespace {

void require_bin(int i, const PoolConfig& config) {
  if (!config.contains_bin(i)) {
    throw RangeError("bin " + std::to_string(i) + " outside window [" + std::to_string(config.i_min) + ", " +
                     std::to_string(config.i_max) + "]");
  }
}

}  // namespace

void PoolConfig::validate() const {
  if (!(p0 > 0.0) || !std::isfinite(p0)) throw ConfigError("p0 must be a positive finite price");
  if (!(d > 1.0) || !std::isfinite(d)) throw ConfigError("tick multiplier d must be > 1");
  if (i_min >= i_max) throw ConfigError("i_min must be < i_max");
  if (!(tick_price(i_min, *this) > 0.0) || !std::isfinite(tick_price(i_max + 1, *this))) {
    throw ConfigError("tick window overflows double range");
  }
}

Price::Price(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw PreconditionError("price must be positive and finite");
}

double tick_price(int i, const PoolConfig& config) {
  if (i < config.i_min || i > config.i_max + 1) {
    throw RangeError("tick " + std::to_string(i) + " outside window");
  }
  return config.p0 * std::pow(config.d, i);
}

int bin_of(Price p, const PoolConfig& config) {
  const double v = p.value();
  if (v < tick_price(config.i_min, config) || v >= tick_price(config.i_max + 1, config)) {
    throw RangeError("price " + std::to_string(v) + " outside tick window");
  }
  // log gives a first guess; boundary prices are then settled by direct
  // comparison against the neighbouring ticks.
  double guess = std::floor(std::log(v / config.p0) / std::log(config.d));
  guess = std::clamp(guess, static_cast<double>(config.i_min), static_cast<double>(config.i_max));
  int j = static_cast<int>(guess);
  while (j > config.i_min && tick_price(j, config) > v) --j;
  while (j < config.i_max && tick_price(j + 1, config) <= v) ++j;
  return j;
}

bool on_tick(Price p, const PoolConfig& config) { return tick_price(bin_of(p, config), config) == p.value(); }

TokenAmounts tokens_for_liquidity(int i, double delta_l, Price p_c, const PoolConfig& config) {
  require_bin(i, config);
  if (!(delta_l >= 0.0)) throw PreconditionError("liquidity must be nonnegative");
  const int j = bin_of(p_c, config);
  const double s_lo = std::sqrt(tick_price(i, config));
  const double s_hi = std::sqrt(tick_price(i + 1, config));
  const double s_c = std::sqrt(p_c.value());
  if (j < i) return {delta_l * (1.0 / s_lo - 1.0 / s_hi), 0.0};
  if (j > i) return {0.0, delta_l * (s_hi - s_lo)};
  return {delta_l * (1.0 / s_c - 1.0 / s_hi), delta_l * (s_c - s_lo)};
}

double coupling_ratio(Price p_c, const PoolConfig& config) {
  const int j = bin_of(p_c, config);
  const double s_c = std::sqrt(p_c.value());
  const double per_x = 1.0 / s_c - 1.0 / std::sqrt(tick_price(j + 1, config));
  const double per_y = s_c - std::sqrt(tick_price(j, config));
  return per_y / per_x;
}

double liquidity_for_tokens(int i, const TokenAmounts& amounts, Price p_c, const PoolConfig& config) {
  require_bin(i, config);
  if (!(amounts.x >= 0.0) || !(amounts.y >= 0.0)) throw PreconditionError("token amounts must be nonnegative");
  const int j = bin_of(p_c, config);
  const double s_lo = std::sqrt(tick_price(i, config));
  const double s_hi = std::sqrt(tick_price(i + 1, config));
  if (j < i) {
    if (amounts.y != 0.0) throw SideError("bin " + std::to_string(i) + " lies above the price and takes only X");
    return amounts.x / (1.0 / s_lo - 1.0 / s_hi);
  }
  if (j > i) {
    if (amounts.x != 0.0) throw SideError("bin " + std::to_string(i) + " lies below the price and takes only Y");
    return amounts.y / (s_hi - s_lo);
  }
  const double s_c = std::sqrt(p_c.value());
  const double per_x = 1.0 / s_c - 1.0 / s_hi;
  const double per_y = s_c - s_lo;
  if (per_y == 0.0) {
    if (amounts.y != 0.0) throw SideError("price sits on the lower tick of bin " + std::to_string(i) + "; only X accepted");
    return amounts.x / per_x;
  }
  const double lhs = amounts.y * per_x;
  const double rhs = amounts.x * per_y;
  if (std::abs(lhs - rhs) > 1e-9 * std::max(lhs, rhs)) {
    throw CouplingError("active-bin deposit violates y/x = " + std::to_string(per_y / per_x));
  }
  return (amounts.x + amounts.y) / (per_x + per_y);
}

PoolState::PoolState(PoolConfig config, Price current_price) : config_(config), price_(current_price) {
  config_.validate();
  set_price(current_price);
}

void PoolState::set_price(Price p) {
  bin_of(p, config_);  // range check
  price_ = p;
}

double PoolState::liquidity_in(int bin) const {
  auto it = liquidity_.find(bin);
  if (it == liquidity_.end()) return 0.0;
  double total = 0.0;
  for (const auto& [id, l] : it->second) total += l;
  return total;
}

double PoolState::liquidity_of(const std::string& provider_id, int bin) const {
  auto it = liquidity_.find(bin);
  if (it == liquidity_.end()) return 0.0;
  auto jt = it->second.find(provider_id);
  return jt == it->second.end() ? 0.0 : jt->second;
}

const std::map<std::string, double>& PoolState::liquidity_of_bin(int bin) const {
  static const std::map<std::string, double> empty;
  auto it = liquidity_.find(bin);
  return it == liquidity_.end() ? empty : it->second;
}

std::map<int, double> PoolState::liquidity_by_bin() const {
  std::map<int, double> out;
  for (const auto& [bin, by_provider] : liquidity_) {
    double total = 0.0;
    for (const auto& [id, l] : by_provider) total += l;
    out[bin] = total;
  }
  return out;
}

std::map<int, double> PoolState::liquidity_of(const std::string& provider_id) const {
  std::map<int, double> out;
  for (const auto& [bin, by_provider] : liquidity_) {
    auto it = by_provider.find(provider_id);
    if (it != by_provider.end()) out[bin] = it->second;
  }
  return out;
}

std::vector<BinPosition> PoolState::positions() const {
  std::vector<BinPosition> out;
  for (const auto& [bin, by_provider] : liquidity_) {
    for (const auto& [id, l] : by_provider) out.push_back({id, bin, l});
  }
  return out;
}

std::vector<std::string> PoolState::providers() const {
  std::set<std::string> ids;
  for (const auto& [bin, by_provider] : liquidity_) {
    for (const auto& [id, l] : by_provider) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

std::map<int, TokenAmounts> PoolState::holdings_of(const std::string& provider_id) const {
  std::map<int, TokenAmounts> out;
  for (const auto& [bin, l] : liquidity_of(provider_id)) {
    out[bin] = tokens_for_liquidity(bin, l, price_, config_);
  }
  return out;
}

TokenAmounts PoolState::total_holdings_of(const std::string& provider_id) const {
  TokenAmounts total;
  for (const auto& [bin, t] : holdings_of(provider_id)) total += t;
  return total;
}

void PoolState::add_liquidity(const std::string& provider_id, int bin, double delta_l) {
  require_bin(bin, config_);
  if (!(delta_l >= 0.0)) throw PreconditionError("liquidity must be nonnegative");
  if (delta_l == 0.0) return;
  liquidity_[bin][provider_id] += delta_l;
}

double PoolState::remove_liquidity(const std::string& provider_id, int bin) {
  auto it = liquidity_.find(bin);
  if (it == liquidity_.end()) return 0.0;
  auto jt = it->second.find(provider_id);
  if (jt == it->second.end()) return 0.0;
  const double l = jt->second;
  it->second.erase(jt);
  if (it->second.empty()) liquidity_.erase(it);
  return l;
}

DepositResult deposit(const PoolState& state, const std::string& provider_id, int bin, double delta_l) {
  if (!(delta_l > 0.0)) throw PreconditionError("deposit requires positive liquidity");
  const TokenAmounts debit = tokens_for_liquidity(bin, delta_l, state.current_price(), state.config());
  PoolState next = state;
  next.add_liquidity(provider_id, bin, delta_l);
  return {std::move(next), debit};
}

WithdrawResult withdraw_all(const PoolState& state, const std::string& provider_id) {
  PoolState next = state;
  TokenAmounts credit;
  for (const auto& [bin, l] : state.liquidity_of(provider_id)) {
    credit += tokens_for_liquidity(bin, l, state.current_price(), state.config());
    next.remove_liquidity(provider_id, bin);
  }
  return {std::move(next), credit};
}

SwapResult swap_exact_in(const PoolState& state, SwapSide side, double amount_in) {
  if (!(amount_in > 0.0) || !std::isfinite(amount_in)) throw PreconditionError("swap amount must be positive");
  const PoolConfig& cfg = state.config();
  const auto liquidity = state.liquidity_by_bin();
  if (liquidity.empty()) return {0.0, 0.0, amount_in, state};

  auto bin_liquidity = [&](int i) {
    auto it = liquidity.find(i);
    return it == liquidity.end() ? 0.0 : it->second;
  };
  const int lowest = liquidity.begin()->first;
  const int highest = liquidity.rbegin()->first;

  double p = state.current_price().value();
  int j = bin_of(state.current_price(), cfg);
  double remaining = amount_in;
  double out = 0.0;

  if (side == SwapSide::YIn) {
    // Y in, X out, price rises.
    while (remaining > 0.0 && j <= highest) {
      const double upper = tick_price(j + 1, cfg);
      const double s = std::sqrt(p);
      const double s_up = std::sqrt(upper);
      const double l = bin_liquidity(j);
      if (l > 0.0) {
        const double need = l * (s_up - s);
        if (remaining < need) {
          const double s_new = s + remaining / l;
          out += l * (1.0 / s - 1.0 / s_new);
          p = std::min(s_new * s_new, std::nextafter(upper, 0.0));
          remaining = 0.0;
          break;
        }
        out += l * (1.0 / s - 1.0 / s_up);
        remaining -= need;
      }
      p = upper;
      ++j;
    }
    // The window's top tick is excluded from the half-open price range.
    if (j > cfg.i_max) p = std::nextafter(tick_price(cfg.i_max + 1, cfg), 0.0);
  } else {
    // X in, Y out, price falls.
    while (remaining > 0.0 && j >= lowest) {
      const double lower = tick_price(j, cfg);
      const double l = bin_liquidity(j);
      if (l > 0.0 && p > lower) {
        const double s = std::sqrt(p);
        const double s_lo = std::sqrt(lower);
        const double need = l * (1.0 / s_lo - 1.0 / s);
        if (remaining < need) {
          const double s_new = 1.0 / (1.0 / s + remaining / l);
          out += l * (s - s_new);
          p = std::max(s_new * s_new, lower);
          remaining = 0.0;
          break;
        }
        out += l * (s - s_lo);
        remaining -= need;
      }
      p = lower;
      --j;
    }
  }

  const double used = amount_in - remaining;
  if (used <= 0.0) return {0.0, 0.0, amount_in, state};
  PoolState next = state;
  next.set_price(Price(p));
  return {out, used, remaining, std::move(next)};
}

}  // namespace lmlab
