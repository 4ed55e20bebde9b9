#include <doctest.h>

#include <cmath>
#include <random>

#include "lmlab/pool.hpp"
#include "oracles.hpp"

using namespace lmlab;

namespace {

const PoolConfig kQuad{1.0, 4.0, -4, 4};

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("tick prices follow p0 * d^i") {
  CHECK(tick_price(0, kQuad) == 1.0);
  CHECK(tick_price(1, kQuad) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(tick_price(-1, kQuad) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(tick_price(kQuad.i_max + 1, kQuad) == doctest::Approx(1024.0).epsilon(1e-14));
  CHECK_THROWS_AS(tick_price(kQuad.i_max + 2, kQuad), RangeError);
  CHECK_THROWS_AS(tick_price(kQuad.i_min - 1, kQuad), RangeError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((PoolConfig{1.0, 1.0, -1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((PoolConfig{0.0, 2.0, -1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((PoolConfig{1.0, 2.0, 1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS(Price(0.0), PreconditionError);
  CHECK_THROWS_AS(Price(-1.0), PreconditionError);
}

TEST_CASE("bin_of uses half-open bins") {
  CHECK(bin_of(Price(1.0), kQuad) == 0);
  CHECK(bin_of(Price(2.0), kQuad) == 0);
  CHECK(bin_of(Price(4.0), kQuad) == 1);
  CHECK(bin_of(Price(std::nextafter(4.0, 0.0)), kQuad) == 0);
  CHECK_THROWS_AS(bin_of(Price(1024.0), kQuad), RangeError);
  CHECK_THROWS_AS(bin_of(Price(0.001), kQuad), RangeError);
}

TEST_CASE("bin_of inverts tick_price across fine grids") {
  for (double d : {1.0001, 1.001, 1.01, 1.5, 4.0}) {
    const int span = d < 1.1 ? 2000 : 200;
    const PoolConfig cfg{0.37, d, -span, span};
    for (int i = cfg.i_min; i <= cfg.i_max; i += 7) {
      REQUIRE(bin_of(Price(tick_price(i, cfg)), cfg) == i);
      CHECK(tick_price(i, cfg) < tick_price(i + 1, cfg));
    }
  }
}

TEST_CASE("tokens_for_liquidity three cases") {
  const auto right = tokens_for_liquidity(1, 1.0, Price(1.0), kQuad);
  CHECK(right.x == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(right.y == 0.0);
  const auto left = tokens_for_liquidity(-1, 2.0, Price(1.0), kQuad);
  CHECK(left.x == 0.0);
  CHECK(left.y == doctest::Approx(1.0).epsilon(1e-14));
  const auto active = tokens_for_liquidity(0, 1.0, Price(2.0), kQuad);
  CHECK(active.x == doctest::Approx(1.0 / std::sqrt(2.0) - 0.5).epsilon(1e-14));
  CHECK(active.y == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("tokens_for_liquidity matches the explicit-price oracle and is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PoolConfig cfg{0.8, 1.3, -30, 30};
  for (int n = 0; n < 2000; ++n) {
    const int i = -30 + static_cast<int>(u(rng) * 61) % 61;
    const double pc = 0.8 * std::pow(1.3, -29.0 + 58.0 * u(rng));
    const double L = std::exp(-5.0 + 10.0 * u(rng));
    const auto got = tokens_for_liquidity(i, L, Price(pc), cfg);
    const auto want = oracle::bin_tokens(0.8 * std::pow(1.3, i), 0.8 * std::pow(1.3, i + 1), pc, L);
    REQUIRE(rel_close(got.x, want.x, 1e-11));
    REQUIRE(rel_close(got.y, want.y, 1e-11));
    const double a = 3.7;
    const auto scaled = tokens_for_liquidity(i, a * L, Price(pc), cfg);
    REQUIRE(rel_close(scaled.x, a * got.x, 1e-12));
    REQUIRE(rel_close(scaled.y, a * got.y, 1e-12));
  }
}

TEST_CASE("liquidity_for_tokens inverts and enforces sides") {
  CHECK(liquidity_for_tokens(1, {0.25, 0.0}, Price(1.0), kQuad) == doctest::Approx(1.0).epsilon(1e-14));
  const TokenAmounts active{1.0 / std::sqrt(2.0) - 0.5, std::sqrt(2.0) - 1.0};
  CHECK(liquidity_for_tokens(0, active, Price(2.0), kQuad) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(coupling_ratio(Price(2.0), kQuad) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS_AS(liquidity_for_tokens(1, {0.25, 0.1}, Price(1.0), kQuad), SideError);
  CHECK_THROWS_AS(liquidity_for_tokens(-1, {0.25, 0.1}, Price(1.0), kQuad), SideError);
  CHECK_THROWS_AS(liquidity_for_tokens(0, {0.2, 0.2}, Price(2.0), kQuad), CouplingError);
  CHECK_THROWS_AS(liquidity_for_tokens(9, {0.2, 0.0}, Price(2.0), kQuad), RangeError);
}

TEST_CASE("deposit and withdraw") {
  PoolState s(kQuad, Price(1.0));
  auto r1 = deposit(s, "a", 1, 1.0);
  CHECK(r1.state.liquidity_in(1) == 1.0);
  auto r2 = deposit(r1.state, "a", 1, 1.0);
  CHECK(r2.state.liquidity_in(1) == 2.0);
  CHECK(r2.debit.x == r1.debit.x);
  CHECK(r2.debit.y == r1.debit.y);
  CHECK_THROWS_AS(deposit(s, "a", 1, 0.0), PreconditionError);
  CHECK_THROWS_AS(deposit(s, "a", 5, 1.0), RangeError);

  auto r3 = deposit(r2.state, "b", -1, 2.0);
  const auto w = withdraw_all(r3.state, "a");
  CHECK(w.credit.x == doctest::Approx(0.5));
  CHECK(w.credit.y == 0.0);
  CHECK(w.state.liquidity_in(1) == 0.0);
  CHECK(w.state.liquidity_in(-1) == 2.0);
  CHECK(w.state.providers() == std::vector<std::string>{"b"});
}

TEST_CASE("swap within one bin") {
  PoolState s = deposit(PoolState(kQuad, Price(1.0)), "a", 0, 100.0).state;
  const auto r = swap_exact_in(s, SwapSide::YIn, 10.0);
  CHECK(r.state.current_price().value() == doctest::Approx(1.21).epsilon(1e-13));
  CHECK(r.amount_out == doctest::Approx(100.0 * (1.0 - 1.0 / 1.1)).epsilon(1e-13));
  CHECK(r.amount_unfilled == 0.0);

  // Virtual reserves (x + L/sqrt(p_b)) (y + L sqrt(p_a)) stay at L^2.
  auto product = [&](const PoolState& st) {
    const auto h = tokens_for_liquidity(0, 100.0, st.current_price(), kQuad);
    return (h.x + 100.0 / 2.0) * (h.y + 100.0 * 1.0);
  };
  CHECK(product(s) == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(product(r.state) == doctest::Approx(1e4).epsilon(1e-9));

  const auto back = swap_exact_in(r.state, SwapSide::XIn, r.amount_out);
  CHECK(back.state.current_price().value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(back.amount_out == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("swap exhausting a bin lands on the tick") {
  PoolState s(kQuad, Price(1.0));
  s = deposit(s, "a", 0, 100.0).state;
  s = deposit(s, "a", 1, 100.0).state;
  const auto r = swap_exact_in(s, SwapSide::YIn, 100.0);
  CHECK(r.state.current_price().value() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(r.amount_out == doctest::Approx(50.0).epsilon(1e-13));
  CHECK(r.state.active_bin() == 1);
}

TEST_CASE("swap on an empty pool refuses") {
  PoolState s(kQuad, Price(1.5));
  const auto r = swap_exact_in(s, SwapSide::YIn, 3.0);
  CHECK(r.amount_out == 0.0);
  CHECK(r.amount_unfilled == 3.0);
  CHECK(r.state.current_price() == s.current_price());
  CHECK_THROWS_AS(swap_exact_in(s, SwapSide::YIn, 0.0), PreconditionError);
}

TEST_CASE("swap partially fills when liquidity runs out") {
  PoolState s = deposit(PoolState(kQuad, Price(1.0)), "a", 0, 10.0).state;
  const auto r = swap_exact_in(s, SwapSide::YIn, 25.0);
  CHECK(r.amount_in_used == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(r.amount_unfilled == doctest::Approx(15.0).epsilon(1e-13));
  CHECK(r.amount_out == doctest::Approx(5.0).epsilon(1e-13));

  const auto down = swap_exact_in(s, SwapSide::XIn, 1.0);
  CHECK(down.amount_out == 0.0);
  CHECK(down.amount_unfilled == 1.0);
}

TEST_CASE("multi-bin swaps match the bisection oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const PoolConfig cfg{1.0, 1.25, -20, 20};
  for (int n = 0; n < 200; ++n) {
    oracle::Ladder lad{1.0, 1.25, {}};
    PoolState s(cfg, Price(std::pow(1.25, -3.0 + 6.0 * u(rng))));
    for (int i = -6; i <= 12; ++i) {
      const double L = 1.0 + 50.0 * u(rng);
      lad.liquidity[i] = L;
      s = deposit(s, "p", i, L).state;
    }
    const double p = s.current_price().value();
    const double amount = 0.5 + 20.0 * u(rng);
    const auto got = swap_exact_in(s, SwapSide::YIn, amount);
    const auto want = oracle::swap_y_in(lad, p, amount, std::pow(1.25, 13));
    REQUIRE(got.amount_unfilled == 0.0);
    CHECK(rel_close(got.state.current_price().value(), want.price, 1e-10));
    CHECK(rel_close(got.amount_out, want.out, 1e-10));
  }
}

TEST_CASE("swap path independence and monotonicity") {
  const PoolConfig cfg{1.0, 1.1, -40, 40};
  PoolState s(cfg, Price(1.0));
  for (int i = -20; i <= 20; ++i) s = deposit(s, "p", i, 10.0 + i * i).state;
  const auto one = swap_exact_in(s, SwapSide::YIn, 7.0);
  const auto a = swap_exact_in(s, SwapSide::YIn, 3.0);
  const auto b = swap_exact_in(a.state, SwapSide::YIn, 4.0);
  CHECK(rel_close(b.state.current_price().value(), one.state.current_price().value(), 1e-9));
  CHECK(rel_close(a.amount_out + b.amount_out, one.amount_out, 1e-9));

  double last = 0.0;
  for (double amt = 0.5; amt < 30.0; amt += 0.5) {
    const auto r = swap_exact_in(s, SwapSide::XIn, amt);
    CHECK(r.amount_out >= last);
    CHECK(r.state.current_price() <= s.current_price());
    last = r.amount_out;
  }
}
