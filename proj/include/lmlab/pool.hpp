#pragma once

#include <map>
#include <string>
#include <vector>

#include "lmlab/errors.hpp"

namespace lmlab {

/// Geometric tick lattice p_i = p0 * d^i restricted to bins [i_min, i_max].
struct PoolConfig {
  double p0 = 1.0;
  double d = 1.0001;
  int i_min = -100;
  int i_max = 100;

  // Throws ConfigError unless p0 > 0, d > 1 and i_min < i_max.
  void validate() const;

  bool contains_bin(int i) const { return i >= i_min && i <= i_max; }
};

/// Price of X quoted in Y. Always strictly positive.
class Price {
 public:
  explicit Price(double value);
  double value() const { return value_; }

  friend bool operator==(Price a, Price b) { return a.value_ == b.value_; }
  friend auto operator<=>(Price a, Price b) { return a.value_ <=> b.value_; }

 private:
  double value_;
};

struct TokenAmounts {
  double x = 0.0;
  double y = 0.0;

  TokenAmounts& operator+=(const TokenAmounts& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend TokenAmounts operator+(TokenAmounts a, const TokenAmounts& b) { return a += b; }
  friend TokenAmounts operator*(double s, const TokenAmounts& a) { return {s * a.x, s * a.y}; }
};

struct BinPosition {
  std::string provider_id;
  int bin = 0;
  double liquidity = 0.0;
};

enum class SwapSide { XIn, YIn };

// Tick geometry. Indices run over [i_min, i_max + 1] for ticks and
// [i_min, i_max] for bins.
double tick_price(int i, const PoolConfig& config);
int bin_of(Price p, const PoolConfig& config);
bool on_tick(Price p, const PoolConfig& config);

/// Tokens required to add `delta_l` liquidity to bin `i` while the pool
/// trades at `p_c`. Bins above the price take only X, bins below only Y, and
/// the active bin takes both.
TokenAmounts tokens_for_liquidity(int i, double delta_l, Price p_c, const PoolConfig& config);

/// Inverse of tokens_for_liquidity. Throws SideError for a wrong-side token
/// and CouplingError when an active-bin deposit breaks the y/x ratio.
double liquidity_for_tokens(int i, const TokenAmounts& amounts, Price p_c, const PoolConfig& config);

/// Y per X required by an active-bin deposit at p_c, i.e.
/// (sqrt(p_c) - sqrt(p_j)) / (1/sqrt(p_c) - 1/sqrt(p_{j+1})).
double coupling_ratio(Price p_c, const PoolConfig& config);

class PoolState {
 public:
  PoolState(PoolConfig config, Price current_price);

  const PoolConfig& config() const { return config_; }
  Price current_price() const { return price_; }
  int active_bin() const { return bin_of(price_, config_); }

  // Throws RangeError for a price outside the window.
  void set_price(Price p);

  double liquidity_in(int bin) const;
  double liquidity_of(const std::string& provider_id, int bin) const;
  std::map<int, double> liquidity_by_bin() const;
  const std::map<std::string, double>& liquidity_of_bin(int bin) const;
  std::map<int, double> liquidity_of(const std::string& provider_id) const;
  std::vector<BinPosition> positions() const;
  std::vector<std::string> providers() const;

  // Current token composition of one provider's positions.
  std::map<int, TokenAmounts> holdings_of(const std::string& provider_id) const;
  TokenAmounts total_holdings_of(const std::string& provider_id) const;

  void add_liquidity(const std::string& provider_id, int bin, double delta_l);
  // Removes and returns the liquidity the provider held in `bin`.
  double remove_liquidity(const std::string& provider_id, int bin);

 private:
  PoolConfig config_;
  Price price_;
  // bin -> provider -> liquidity; zero entries are never stored.
  std::map<int, std::map<std::string, double>> liquidity_;
};

struct DepositResult {
  PoolState state;
  TokenAmounts debit;
};

DepositResult deposit(const PoolState& state, const std::string& provider_id, int bin, double delta_l);

struct WithdrawResult {
  PoolState state;
  TokenAmounts credit;
};

// Withdraws every position held by the provider at the current price.
WithdrawResult withdraw_all(const PoolState& state, const std::string& provider_id);

struct SwapResult {
  double amount_out = 0.0;
  double amount_in_used = 0.0;
  double amount_unfilled = 0.0;
  PoolState state;
};

/// Exact-input swap walking bins in the price direction. Fills partially when
/// deployed liquidity runs out; returns the state unchanged and zero output
/// if there is no liquidity at all in that direction.
SwapResult swap_exact_in(const PoolState& state, SwapSide side, double amount_in);

}  // namespace lmlab
