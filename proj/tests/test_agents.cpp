#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "xmkt/agents.hpp"

using namespace xmkt;

namespace {

std::vector<StockSpec> table1() {
  return {{1, 10.0, 0.0, 0.0007, 50.0},
          {2, 20.0, 0.0, 0.0007, 40.0},
          {3, 30.0, 0.0, 0.0003, 60.0},
          {4, 40.0, 0.0, 0.0003, 30.0},
          {5, 50.0, 0.0, 0.0005, 50.0}};
}

InstrumentSpec stock_spec() {
  InstrumentSpec s;
  s.label = "s1";
  s.tick_size = 0.01;
  s.lot = 100;
  s.is_futures = false;
  return s;
}

InstrumentSpec futures_spec() {
  InstrumentSpec s;
  s.label = "fut";
  s.tick_size = 0.2;
  s.lot = 1;
  s.is_futures = true;
  return s;
}

}  // namespace

TEST_CASE("informed stock expectation reads the path, clamped at the end") {
  Rng rng(5);
  auto path = CommonValuePath::generate(table1(), 300, rng);
  CHECK(expected_price_informed_stock(path, 0, 100, 50) == path.value(0, 150));
  CHECK(expected_price_informed_stock(path, 0, 100, 0) == path.value(0, 100));
  CHECK(expected_price_informed_stock(path, 0, 290, 50) == path.value(0, 299));  // clamp
}

TEST_CASE("informed futures expectation composes the index and carry oracles") {
  Rng rng(5);
  auto stocks = table1();
  auto path = CommonValuePath::generate(stocks, 10, rng);
  const double m0 = base_market_value(stocks);
  std::vector<double> shares{50, 40, 60, 30, 50};
  const double r = 0.08 / 245.0;

  // at t = tau = 0 the path still sits at Table 1 initial values
  CHECK(expected_price_informed_futures(path, 0, 0, shares, m0, 0.0, 19, 1) ==
        doctest::Approx(3000.0));
  CHECK(expected_price_informed_futures(path, 0, 0, shares, m0, r, 19, 1) ==
        doctest::Approx(3018.667043448215));

  // independent composition: index of foresight values, then carry
  const Step t = 3;
  const int tau = 4;
  std::vector<double> v(5);
  for (std::size_t i = 0; i < 5; ++i) v[i] = path.value(i, t + tau);
  const double expect = futures_common_value(compute_index(v, shares, m0), r, 19, 2);
  CHECK(expected_price_informed_futures(path, t, tau, shares, m0, r, 19, 2) ==
        doctest::Approx(expect));
}

TEST_CASE("uninformed expectation is the weighted mix") {
  CHECK(expected_price_uninformed(10, 10, 10, 0.3, 0.3, 0.4) == doctest::Approx(10.0));
  CHECK(expected_price_uninformed(10.3, 99, 99, 1, 0, 0) == doctest::Approx(10.3));
  CHECK(expected_price_uninformed(10.0, 10.2, 10.4, 1, 1, 2) == doctest::Approx(10.25));
  CHECK_THROWS_AS(expected_price_uninformed(10, 10, 10, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("uninformed expectation stays inside the convex hull of its inputs") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(5, 15), pb = rng.uniform(5, 15), pm = rng.uniform(5, 15);
    double a = rng.next_unit(), b = rng.next_unit(), c = rng.next_unit();
    if (a + b + c == 0.0) a = 1.0;
    const double e = expected_price_uninformed(v, pb, pm, a, b, c);
    CHECK(e >= std::min({v, pb, pm}) - 1e-12);
    CHECK(e <= std::max({v, pb, pm}) + 1e-12);
  }
}

TEST_CASE("noise expectation spans the five-level band") {
  CHECK(expected_price_noise(9.90, 10.10, 0.0) == doctest::Approx(9.90));
  CHECK(expected_price_noise(9.90, 10.10, 1.0) == doctest::Approx(10.10));
  CHECK(expected_price_noise(9.90, 10.10, 0.5) == doctest::Approx(10.00));
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const double e = expected_price_noise(9.90, 10.10, rng.next_unit());
    CHECK(e >= 9.90);
    CHECK(e <= 10.10);
  }
}

TEST_CASE("variance estimate matches the window formulas") {
  SUBCASE("constant prices floor at 1e-8") {
    std::vector<double> prices(50, 10.0);
    auto est = estimate_variance(prices, 20);
    CHECK(est.variance == doctest::Approx(1e-8));
  }
  SUBCASE("hand-computed two-return window") {
    std::vector<double> prices{10.0, 10.1, 10.0};
    auto est = estimate_variance(prices, 2);
    CHECK(est.mean_return == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(est.variance == doctest::Approx(9.900908408750885e-05));  // ln(1.01)^2
  }
  SUBCASE("matches a brute-force recomputation on random paths") {
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> prices;
      double p = 10.0;
      const int n = static_cast<int>(rng.uniform_int(3, 200));
      for (int i = 0; i < n; ++i) {
        prices.push_back(p);
        p *= 1.0 + 0.01 * (rng.next_unit() - 0.5);
      }
      const int tau = static_cast<int>(rng.uniform_int(2, 50));
      auto est = estimate_variance(prices, tau);

      const int m = std::min<int>(tau, n - 1);
      std::vector<double> r;
      for (int j = 0; j < m; ++j) {
        const std::size_t last = prices.size() - 1;
        r.push_back(std::log(prices[last - j] / prices[last - j - 1]));
      }
      double mean = 0;
      for (double x : r) mean += x;
      mean /= m;
      double ss = 0;
      for (double x : r) ss += (x - mean) * (x - mean);
      const double expect = std::max(ss / m, 1e-8);
      CHECK(est.variance == doctest::Approx(expect).epsilon(1e-12));
      CHECK(est.returns_used == m);
    }
  }
}

TEST_CASE("CARA position formula") {
  CHECK(optimal_position(10.0, 10.0, 0.5, 1e-4) == doctest::Approx(0.0));
  CHECK(optimal_position(10.1, 10.0, 0.1, 1e-4) == doctest::Approx(99.50330853168091));
  CHECK(optimal_position(9.9, 10.0, 0.1, 1e-4) == doctest::Approx(-100.5033585350145));
}

TEST_CASE("demand is strictly decreasing in price and flips sign at p-hat") {
  double prev = optimal_position(10.0, 9.5, 0.3, 1e-5);
  for (double p = 9.6; p < 10.5; p += 0.1) {
    const double pi = optimal_position(10.0, p, 0.3, 1e-5);
    CHECK(pi < prev);
    prev = pi;
    if (p < 10.0) CHECK(pi > 0.0);
    if (p > 10.0) CHECK(pi < 0.0);
  }
}

TEST_CASE("arrival intervals are exponential, at least one step, deterministic") {
  Rng rng(41);
  double sum = 0.0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const Step s = next_arrival_interval(60.0, rng);
    CHECK(s >= 1);
    sum += static_cast<double>(s);
  }
  // ceil(Exp(60)) has mean ~ 60.5; allow 3 s.e. of the exponential spread
  const double se = 60.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(sum / n - 60.5) < 3.0 * se);

  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(next_arrival_interval(60.0, a) == next_arrival_interval(60.0, b));
}

TEST_CASE("order intent: rounding, truncation, and constraint corners") {
  TraderParams params;
  params.type = TraderType::Informed;
  params.instrument = 0;
  params.risk_aversion = 0.1;
  params.window = 2;

  InstrumentSpec spec = stock_spec();
  std::vector<double> flat_history{10.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0};

  DecisionInputs in;
  in.instrument = &spec;
  in.reference_price = 10.0;  // last transaction
  in.price_history = flat_history;
  in.cash = 10'000'000;  // plenty
  in.holdings = 0;

  // pi(p) is huge on a flat (floored-variance) history; with a tiny variance
  // window and p-hat far from p the lot rounding rules are what we exercise,
  // so pick parameters that hit each branch via the cash / holdings caps.

  SUBCASE("warm-up skips until enough prices exist") {
    std::vector<double> one{10.0};
    in.price_history = one;
    Rng rng(1);
    CHECK_FALSE(make_order_intent(params, in, 0.01, rng).has_value());
    std::vector<double> five{10.0, 10.0, 10.0, 10.0, 10.0};
    in.price_history = five;
    CHECK_FALSE(make_order_intent(params, in, 0.01, rng).has_value());
  }

  SUBCASE("sub-lot demand produces no order") {
    // alpha and variance chosen so |pi - holdings| < 100 for any candidate
    // price inside the 1% band
    params.risk_aversion = 1.0;
    std::vector<double> hist{10.0, 10.1, 10.0, 10.05, 9.98, 10.02, 10.0};  // non-floored variance
    in.price_history = hist;
    in.expected_price = 10.0;
    bool any_order = false;
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
      auto intent = make_order_intent(params, in, 0.001, rng);
      if (intent) {
        any_order = true;
        CHECK(intent->quantity % 100 == 0);  // lot multiples only
      }
    }
    // orders may or may not clear one lot, but never a fractional one
    (void)any_order;
  }

  SUBCASE("sells truncate at current holdings") {
    in.holdings = 300;
    in.expected_price = 5.0;  // demand strongly negative
    Rng rng(3);
    auto intent = make_order_intent(params, in, 0.001, rng);
    REQUIRE(intent.has_value());
    CHECK(intent->side == Side::Sell);
    CHECK(intent->quantity == 300);  // no short selling
  }

  SUBCASE("buys are capped by cash at the candidate price") {
    // flat history floors the variance, so CARA demand is enormous and the
    // cash constraint is what actually sizes the order
    in.holdings = 0;
    in.expected_price = 10.0;
    Rng rng(4);

    in.cash = 50'000;  // 500 CNY: below one lot at ~10 CNY
    for (int i = 0; i < 100; ++i) CHECK_FALSE(make_order_intent(params, in, 0.001, rng).has_value());

    in.cash = 250'000;  // 2500 CNY: two full lots at ~10 CNY
    bool saw_buy = false;
    for (int i = 0; i < 100 && !saw_buy; ++i) {
      auto intent = make_order_intent(params, in, 0.001, rng);
      if (intent && intent->side == Side::Buy) {
        saw_buy = true;
        CHECK(intent->quantity == 200);
      }
    }
    CHECK(saw_buy);
  }

  SUBCASE("futures positions respect the margin cap in both directions") {
    // the candidate price samples around p-hat, so the demand direction
    // follows the draw; sweep draws and check every emitted order obeys the
    // cap, with the cap actually hit at least once per direction
    InstrumentSpec fut = futures_spec();
    params.instrument = 5;
    in.instrument = &fut;
    in.reference_price = 3000.0;
    in.price_history = flat_history;  // floored variance -> cap always binds
    in.max_abs_position = 5;
    in.expected_price = 3000.0;
    Rng rng(5);

    in.holdings = 0;
    bool buy_at_cap = false, sell_at_cap = false;
    for (int i = 0; i < 200; ++i) {
      auto intent = make_order_intent(params, in, 0.001, rng);
      if (!intent) continue;
      CHECK(intent->quantity <= 5);
      if (intent->side == Side::Buy && intent->quantity == 5) buy_at_cap = true;
      if (intent->side == Side::Sell && intent->quantity == 5) sell_at_cap = true;
    }
    CHECK(buy_at_cap);
    CHECK(sell_at_cap);  // futures may go short

    in.holdings = -3;  // short 3 already: at most 2 more contracts short
    bool sell_seen = false;
    for (int i = 0; i < 200; ++i) {
      auto intent = make_order_intent(params, in, 0.001, rng);
      if (!intent || intent->side != Side::Sell) continue;
      sell_seen = true;
      CHECK(intent->quantity <= 2);
    }
    CHECK(sell_seen);

    in.holdings = 8;  // above cap: reducing is allowed, down to -5 at most
    for (int i = 0; i < 200; ++i) {
      auto intent = make_order_intent(params, in, 0.001, rng);
      if (!intent) continue;
      if (intent->side == Side::Buy) FAIL_CHECK("no room to extend above the cap");
      CHECK(intent->quantity <= 13);
    }
  }
}

TEST_CASE("spec rounding examples: floor of the demand gap in lots") {
  // pi = 350 against holdings 100 -> gap 250 -> floor to 2 lots = 200
  const double gap1 = 350.0 - 100.0;
  CHECK(static_cast<long long>(std::floor(gap1)) / 100 * 100 == 200);
  // pi = 99.5 against holdings 0 -> below one lot -> no order
  const double gap2 = 99.5;
  CHECK(static_cast<long long>(std::floor(gap2)) / 100 * 100 == 0);
}
