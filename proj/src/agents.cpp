#include "xmkt/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace xmkt {

double expected_price_informed_stock(const CommonValuePath& path, std::size_t stock, Step t,
                                     int tau) {
  return path.value(stock, t + tau);
}

double expected_price_informed_futures(const CommonValuePath& path, Step t, int tau,
                                       std::span<const double> shares_100m,
                                       double base_market_value, double per_day_rate,
                                       int expiry_day, int listed_day) {
  double market_value = 0.0;
  for (std::size_t i = 0; i < shares_100m.size(); ++i)
    market_value += path.value(i, t + tau) * shares_100m[i];
  const double implied_index = market_value / base_market_value * kIndexBase;
  return futures_common_value(implied_index, per_day_rate, expiry_day, listed_day);
}

double expected_price_uninformed(double common_value, double mean_price, double midpoint,
                                 double wa, double wb, double wc) {
  const double total = wa + wb + wc;
  if (total <= 0.0) throw std::invalid_argument("uninformed expectation: degenerate weights");
  return (wa * common_value + wb * mean_price + wc * midpoint) / total;
}

double expected_price_noise(double bid5, double ask5, double u) {
  return bid5 + u * (ask5 - bid5);
}

VarianceEstimate estimate_variance(std::span<const double> prices, int window, double floor) {
  VarianceEstimate est;
  const int available = static_cast<int>(prices.size()) - 1;
  const int n = std::min(window, available);
  est.returns_used = std::max(n, 0);
  if (n <= 0) {
    est.variance = floor;
    return est;
  }
  const std::size_t last = prices.size() - 1;
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    sum += std::log(prices[last - j] / prices[last - j - 1]);
  const double mean = sum / n;
  double ss = 0.0;
  for (int j = 0; j < n; ++j) {
    const double r = std::log(prices[last - j] / prices[last - j - 1]);
    ss += (r - mean) * (r - mean);
  }
  est.mean_return = mean;
  est.variance = std::max(ss / n, floor);
  return est;
}

double optimal_position(double expected_price, double p, double alpha, double variance) {
  return std::log(expected_price / p) / (alpha * variance * p);
}

Step next_arrival_interval(double mean_steps, Rng& rng) {
  const double draw = rng.exponential(mean_steps);
  const Step interval = static_cast<Step>(std::ceil(draw));
  return std::max<Step>(interval, 1);
}

std::optional<OrderIntent> make_order_intent(const TraderParams& params,
                                             const DecisionInputs& in, double price_delta,
                                             Rng& rng) {
  const InstrumentSpec& ins = *in.instrument;
  // Warm-up: wait for a handful of periods so the variance estimate rests on
  // observed returns rather than the floor; an all-floored start makes every
  // first-day order an all-in sweep of a nearly empty book.
  if (in.price_history.size() < 6) return std::nullopt;

  const double u = rng.uniform(-price_delta, price_delta);
  const double candidate = in.reference_price * (1.0 + u);
  Ticks price_ticks = price_to_ticks(candidate, ins);
  if (price_ticks < 1) price_ticks = 1;
  const double p = ticks_to_price(price_ticks, ins);

  Side side;
  Quantity qty;
  if (params.type == TraderType::Noise && in.noise_order_lots > 0) {
    // flat-size zero-intelligence orders: the direction still follows the
    // CARA sign, but the book keeps a liquidity backbone whatever the
    // variance estimate does
    const double gap = in.expected_price - p;
    side = gap > 0 ? Side::Buy : Side::Sell;
    qty = rng.uniform_int(1, in.noise_order_lots) * ins.lot;
  } else {
    const VarianceEstimate var = estimate_variance(in.price_history, params.window);
    // A windowed estimate collapses toward the floor in quiet stretches and
    // CARA demand then explodes; traders keep a quarter of the long-run
    // realized variance as their risk prior.
    const double risk = std::max(var.variance, 0.25 * in.long_run_variance);
    // CARA demand is in units of the underlying; a futures contract carries
    // multiplier-times the price exposure of one unit
    const double target =
        optimal_position(in.expected_price, p, params.risk_aversion, risk) / in.position_scale;
    const double gap = target - static_cast<double>(in.holdings);
    side = gap > 0 ? Side::Buy : Side::Sell;
    qty = static_cast<Quantity>(std::floor(std::fabs(gap)));
  }

  if (!ins.is_futures) {
    if (side == Side::Sell) {
      qty = std::min(qty, in.holdings);  // no short selling in stocks
    } else {
      const Quantity affordable = price_ticks > 0 ? in.cash / price_ticks : 0;
      qty = std::min(qty, affordable);
    }
  } else {
    // margin / safety cap on the absolute position after the trade
    const Quantity dir = side == Side::Buy ? 1 : -1;
    Quantity cap_qty;
    if (in.holdings == 0 || (in.holdings > 0) == (dir > 0)) {
      cap_qty = std::max<Quantity>(in.max_abs_position - std::llabs(in.holdings), 0);
    } else {
      cap_qty = std::llabs(in.holdings) + in.max_abs_position;  // reduce, then rebuild
    }
    qty = std::min(qty, cap_qty);
  }

  if (in.max_order_quantity > 0) qty = std::min(qty, in.max_order_quantity);
  qty -= qty % ins.lot;
  if (qty <= 0) return std::nullopt;
  return OrderIntent{side, price_ticks, qty};
}

}  // namespace xmkt
