#pragma once

#include <optional>
#include <span>

#include "xmkt/assets.hpp"
#include "xmkt/order_book.hpp"
#include "xmkt/rng.hpp"
#include "xmkt/types.hpp"

namespace xmkt {

enum class TraderType : std::uint8_t { Informed, Uninformed, Noise };

struct TraderParams {
  TraderType type = TraderType::Noise;
  std::int32_t instrument = 0;  // the one market this agent trades
  double risk_aversion = 0.5;   // alpha
  int window = 20;              // tau: foresight horizon = averaging = variance window
  double wa = 1, wb = 1, wc = 1;  // uninformed mixing weights
};

struct VarianceEstimate {
  double variance = 0;     // floored
  double mean_return = 0;
  int returns_used = 0;
};

constexpr double kVarianceFloor = 1e-8;

// informed stock trader: reads the common value tau steps ahead (clamped)
double expected_price_informed_stock(const CommonValuePath& path, std::size_t stock, Step t,
                                     int tau);

// informed futures trader: index implied by the stocks' future common values,
// compounded to expiry with the current listed-day counter
double expected_price_informed_futures(const CommonValuePath& path, Step t, int tau,
                                       std::span<const double> shares_100m,
                                       double base_market_value, double per_day_rate,
                                       int expiry_day, int listed_day);

// weighted mix of common value, trailing mean price, and book midpoint;
// throws std::invalid_argument on degenerate (all-zero) weights
double expected_price_uninformed(double common_value, double mean_price, double midpoint,
                                 double wa, double wb, double wc);

// uniform draw within the five-level band
double expected_price_noise(double bid5, double ask5, double u);

// Log-return variance over the trailing window with divisor = returns used.
// Uses every available return while fewer than `window` exist; result is
// floored so the demand denominator never vanishes.
VarianceEstimate estimate_variance(std::span<const double> prices, int window,
                                   double floor = kVarianceFloor);

// CARA-optimal position: ln(expected/p) / (alpha * variance * p)
double optimal_position(double expected_price, double p, double alpha, double variance);

// exponential inter-arrival draw, rounded up to at least one step
Step next_arrival_interval(double mean_steps, Rng& rng);

struct OrderIntent {
  Side side = Side::Buy;
  Ticks price = 0;
  Quantity quantity = 0;
};

// Everything a single-market trader sees when deciding, assembled by the
// engine. expected_price is precomputed per trader type.
struct DecisionInputs {
  const InstrumentSpec* instrument = nullptr;
  double expected_price = 0;              // p-hat in price units
  double reference_price = 0;             // last transaction price, price units
  std::span<const double> price_history;  // period prices up to the prior step
  Cents cash = 0;                         // spendable cash (stock buys)
  Quantity holdings = 0;                  // shares, or signed contracts
  Quantity max_abs_position = 0;          // futures margin/wealth cap, contracts
  double position_scale = 1.0;            // underlying units per tradable unit:
                                          // 1 for shares, the contract
                                          // multiplier for index futures
  double long_run_variance = 0.0;         // instrument-level realized variance
                                          // floor for the risk estimate; stops
                                          // demand from exploding in lulls
  Quantity max_order_quantity = 0;        // exchange per-order size limit, 0 = none
  int noise_order_lots = 0;               // noise traders quote a flat 1..N lots
                                          // instead of the CARA size, keeping the
                                          // book alive through volatile stretches
};

// Samples a candidate price around the last transaction price,
// p = reference * (1 + u) with u ~ U(-delta, delta), sizes the demand gap
// pi(p) - holdings with the CARA rule, and applies lot rounding and the
// wealth / short-sale / margin constraints. Quoting around the market price
// rather than around p-hat keeps ln(p-hat / p) carrying the trader's actual
// view, so mispricings meet corrective flow. Empty result: no order.
std::optional<OrderIntent> make_order_intent(const TraderParams& params,
                                             const DecisionInputs& in, double price_delta,
                                             Rng& rng);

}  // namespace xmkt
