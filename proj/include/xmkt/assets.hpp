#pragma once

#include <span>
#include <vector>

#include "xmkt/rng.hpp"
#include "xmkt/types.hpp"

namespace xmkt {

constexpr double kIndexBase = 3000.0;  // base-period index level, points

struct StockSpec {
  int id = 0;                // 1-based stock number
  double initial_value = 0;  // v*_{i,0}, CNY
  double drift = 0;          // per-step drift, 0 by default
  double sigma = 0;          // per-step shock s.d.
  double shares_100m = 0;    // shares outstanding, units of 1e8
};

struct FuturesSpec {
  int expiry_day = 19;  // trading day T on which the contract settles
  double annual_rate = 0.08;
  int trading_days_per_year = 245;
  double margin_rate = 0.18;
  double multiplier = 300.0;  // CNY per index point
  double tick_points = 0.2;

  double per_day_rate() const { return annual_rate / trading_days_per_year; }
};

// one step of the common-value diffusion: (1 + drift + sigma*eps) * v
double evolve_common_value(double v, double drift, double sigma, double eps);

// Per-stock fundamental paths, generated up front from one dedicated stream
// so informed foresight is a plain array read. Shocks that would drive a
// value non-positive are resampled (practically unreachable at the default
// sigmas).
class CommonValuePath {
 public:
  static CommonValuePath generate(const std::vector<StockSpec>& stocks, Step total_steps,
                                  Rng& rng);

  // clamped read: t beyond the run returns the final value
  double value(std::size_t stock, Step t) const {
    const auto& p = values_[stock];
    if (t < 0) t = 0;
    if (t >= static_cast<Step>(p.size())) t = static_cast<Step>(p.size()) - 1;
    return p[static_cast<std::size_t>(t)];
  }

  Step length() const { return values_.empty() ? 0 : static_cast<Step>(values_[0].size()); }
  std::size_t stock_count() const { return values_.size(); }

 private:
  std::vector<std::vector<double>> values_;
};

// weighted composite price index: (sum p_i * S_i) / M_0 * 3000
double compute_index(std::span<const double> prices, std::span<const double> shares_100m,
                     double base_market_value);

// base-period market value M_0 = sum v*_{i,0} * S_i (same 1e8-CNY units)
double base_market_value(const std::vector<StockSpec>& stocks);

// futures theoretical value I_t * (1+r)^(T-d+1); d is the listed-days counter
double futures_common_value(double index, double per_day_rate, int expiry_day, int listed_day);

// arithmetic mean of the step's trade prices; previous price if none
double period_transaction_price(std::span<const double> trade_prices, double previous_price);

}  // namespace xmkt
