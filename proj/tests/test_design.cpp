#include <doctest.h>

#include <cmath>

#include "lmlab/design.hpp"
#include "lmlab/strategy.hpp"

using namespace lmlab;

namespace {

const PoolConfig kQuad{1.0, 4.0, -4, 4};

PoolState single_bin(double L) {
  PoolState s(kQuad, Price(1.0));
  s.add_liquidity("a", 0, L);
  return s;
}

}  // namespace

TEST_CASE("low-slippage shape") {
  const auto s = design_low_slippage(0, std::log(2.0), {-1, 1}, 7.0);
  CHECK(s.reward_in(-1) == doctest::Approx(1.75));
  CHECK(s.reward_in(0) == doctest::Approx(3.5));
  CHECK(s.reward_in(1) == doctest::Approx(1.75));
  CHECK(validate_schedule(s, kQuad).empty());

  const auto flat = design_low_slippage(0, 1e-12, {-2, 2}, 5.0);
  for (int i = -2; i <= 2; ++i) CHECK(flat.reward_in(i) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(design_low_slippage(3, 2.0, {3, 3}, 4.0).reward_in(3) == 4.0);

  const auto wide = design_low_slippage(1, 0.3, {-4, 4}, 10.0);
  for (int d = 0; d < 3; ++d) CHECK(wide.reward_in(1 + d) > wide.reward_in(2 + d));

  CHECK_THROWS_AS(design_low_slippage(0, 0.0, {-1, 1}, 1.0), DesignError);
  CHECK_THROWS_AS(design_low_slippage(5, 1.0, {-1, 1}, 1.0), DesignError);
  CHECK_THROWS_AS(design_low_slippage(0, 1.0, {1, -1}, 1.0), DesignError);
}

TEST_CASE("price-stabilization shape") {
  const auto s = design_price_stabilization(Price(1.0), Price(256.0), std::log(2.0), 6.0, kQuad);
  REQUIRE(s.per_bin.size() == 4);
  CHECK(s.reward_in(0) == doctest::Approx(2.0));
  CHECK(s.reward_in(1) == doctest::Approx(1.0));
  CHECK(s.reward_in(2) == doctest::Approx(1.0));
  CHECK(s.reward_in(3) == doctest::Approx(2.0));
  CHECK(validate_schedule(s, kQuad).empty());

  const auto two = design_price_stabilization(Price(1.0), Price(16.0), 5.0, 2.0, kQuad);
  CHECK(two.reward_in(0) == doctest::Approx(1.0));
  CHECK(two.reward_in(1) == doctest::Approx(1.0));

  // An interior p_b still covers the bin containing it.
  CHECK(bins_covering(Price(1.0), Price(5.0), kQuad).hi == 1);
  CHECK_THROWS_AS(design_price_stabilization(Price(4.0), Price(2.0), 1.0, 1.0, kQuad), DesignError);
  CHECK_THROWS_AS(design_price_stabilization(Price(1.0), Price(1e6), 1.0, 1.0, kQuad), RangeError);
}

TEST_CASE("v2-equivalent weights") {
  const auto right = design_v2_equivalent(Price(1.0), {0, 1}, 1.0, 3.0, kQuad);
  CHECK(right.reward_in(0) == doctest::Approx(2.0));
  CHECK(right.reward_in(1) == doctest::Approx(1.0));
  const auto left = design_v2_equivalent(Price(1.0), {-2, -1}, 0.0, 3.0, kQuad);
  CHECK(left.reward_in(-1) == doctest::Approx(2.0));
  CHECK(left.reward_in(-2) == doctest::Approx(1.0));

  for (double d : {1.01, 1.5, 4.0}) {
    const PoolConfig cfg{1.0, d, -10, 10};
    const auto sym = design_v2_equivalent(Price(1.0), {-5, 4}, std::nullopt, 1.0, cfg);
    double r = 0.0;
    for (int i = 0; i <= 4; ++i) r += sym.reward_in(i);
    CHECK(r == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(validate_schedule(sym, cfg).empty());
  }

  CHECK_THROWS_AS(design_v2_equivalent(Price(2.0), {-1, 1}, std::nullopt, 1.0, kQuad), DesignError);
  CHECK_THROWS_AS(design_v2_equivalent(Price(1.0), {0, 1}, 0.5, 1.0, kQuad), DesignError);
}

TEST_CASE("proportional providers on the v2 design get uniform liquidity") {
  const PoolConfig cfg{1.0, 1.2, -20, 20};
  const auto sched = design_v2_equivalent(Price(1.0), {-6, 5}, std::nullopt, 1.0, cfg);
  double wx = 0.0;
  double wy = 0.0;
  for (int i = 0; i <= 5; ++i) wx += 1.0 / std::sqrt(tick_price(i, cfg)) - 1.0 / std::sqrt(tick_price(i + 1, cfg));
  for (int i = -6; i < 0; ++i) wy += std::sqrt(tick_price(i + 1, cfg)) - std::sqrt(tick_price(i, cfg));
  const auto alloc = proportional_allocation({3.0 * wx, 3.0 * wy}, sched, Price(1.0), cfg);
  const PoolState s = deposit_allocation(PoolState(cfg, Price(1.0)), "lp", alloc);
  for (int i = -6; i <= 5; ++i) CHECK(s.liquidity_in(i) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("mixtures") {
  const auto a = design_low_slippage(0, 1.0, {-1, 1}, 2.0);
  const auto b = design_price_stabilization(Price(16.0), Price(256.0), 1.0, 2.0, kQuad);
  const auto same = mix({a}, {1.0}, 2.0);
  for (const auto& [i, r] : a.per_bin) CHECK(same.reward_in(i) == doctest::Approx(r));
  const auto half = mix({a, b}, {0.5, 0.5}, 2.0);
  CHECK(half.reward_in(0) == doctest::Approx(0.5 * a.reward_in(0)));
  CHECK(half.reward_in(3) == doctest::Approx(0.5 * b.reward_in(3)));
  CHECK(half.sum() == doctest::Approx(2.0));
  CHECK(validate_schedule(half, kQuad).empty());
  CHECK_THROWS_AS(mix({a, b}, {0.5, 0.6}, 2.0), DesignError);
  CHECK_THROWS_AS(mix({a, b}, {1.0}, 2.0), DesignError);

  DesignSpec spec;
  spec.slot_reward = 10.0;
  spec.params = MixtureParams{{DesignSpec{0.0, LowSlippageParams{0, 1.0, {-1, 1}}},
                               DesignSpec{0.0, V2EquivalentParams{1.0, {-2, 1}, std::nullopt}}},
                              {0.25, 0.75}};
  const auto realized = realize(spec, kQuad);
  CHECK(realized.sum() == doctest::Approx(10.0));
  CHECK(validate_schedule(realized, kQuad).empty());
}

TEST_CASE("slippage metric") {
  CHECK(slippage_of_trade(single_bin(100.0), SwapSide::YIn, 10.0) == doctest::Approx(0.1).epsilon(1e-12));
  // With twice the liquidity the price only reaches 1.1025 and the average
  // execution price is 1.05.
  const double s200 = slippage_of_trade(single_bin(200.0), SwapSide::YIn, 10.0);
  CHECK(s200 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(s200 < 0.1);
  CHECK(slippage_of_trade(single_bin(100.0), SwapSide::YIn, 1e-6) < 1e-7);

  PoolState s = single_bin(100.0);
  s.set_price(Price(2.0));
  CHECK(slippage_of_trade(s, SwapSide::XIn, 0.5) > 0.0);
  CHECK_THROWS_AS(slippage_of_trade(PoolState(kQuad, Price(1.0)), SwapSide::YIn, 1.0), MetricError);
}

TEST_CASE("breakout cost") {
  CHECK(breakout_cost(single_bin(100.0), BreakoutDirection::Up, Price(4.0)) == doctest::Approx(100.0));
  CHECK(breakout_cost(single_bin(200.0), BreakoutDirection::Up, Price(4.0)) == doctest::Approx(200.0));
  CHECK(breakout_cost(PoolState(kQuad, Price(1.0)), BreakoutDirection::Up, Price(16.0)) == 0.0);

  // Matches the Y actually consumed by a swap that stops at the boundary.
  PoolState s(kQuad, Price(1.5));
  s.add_liquidity("a", 0, 10.0);
  s.add_liquidity("a", 1, 30.0);
  s.add_liquidity("a", -1, 20.0);
  const double up = breakout_cost(s, BreakoutDirection::Up, Price(9.0));
  CHECK(swap_exact_in(s, SwapSide::YIn, up).state.current_price().value() == doctest::Approx(9.0).epsilon(1e-12));
  const double down = breakout_cost(s, BreakoutDirection::Down, Price(0.5));
  CHECK(swap_exact_in(s, SwapSide::XIn, down).state.current_price().value() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(breakout_cost(s, BreakoutDirection::Up, Price(1.0)), DirectionError);
  CHECK_THROWS_AS(breakout_cost(s, BreakoutDirection::Down, Price(2.0)), DirectionError);
}
