#include "xmkt/assets.hpp"

#include <cmath>

namespace xmkt {

double evolve_common_value(double v, double drift, double sigma, double eps) {
  return (1.0 + drift + sigma * eps) * v;
}

CommonValuePath CommonValuePath::generate(const std::vector<StockSpec>& stocks, Step total_steps,
                                          Rng& rng) {
  CommonValuePath path;
  path.values_.resize(stocks.size());
  for (auto& v : path.values_) v.resize(static_cast<std::size_t>(total_steps));
  // step-major so stocks share the shock ordering regardless of stock count
  for (Step t = 0; t < total_steps; ++t) {
    for (std::size_t i = 0; i < stocks.size(); ++i) {
      auto& series = path.values_[i];
      if (t == 0) {
        series[0] = stocks[i].initial_value;
        continue;
      }
      double next;
      do {
        next = evolve_common_value(series[static_cast<std::size_t>(t - 1)], stocks[i].drift,
                                   stocks[i].sigma, rng.normal());
      } while (next <= 0.0);
      series[static_cast<std::size_t>(t)] = next;
    }
  }
  return path;
}

double compute_index(std::span<const double> prices, std::span<const double> shares_100m,
                     double base_market_value) {
  double market_value = 0.0;
  for (std::size_t i = 0; i < prices.size(); ++i) market_value += prices[i] * shares_100m[i];
  return market_value / base_market_value * kIndexBase;
}

double base_market_value(const std::vector<StockSpec>& stocks) {
  double m0 = 0.0;
  for (const auto& s : stocks) m0 += s.initial_value * s.shares_100m;
  return m0;
}

double futures_common_value(double index, double per_day_rate, int expiry_day, int listed_day) {
  return index * std::pow(1.0 + per_day_rate, expiry_day - listed_day + 1);
}

double period_transaction_price(std::span<const double> trade_prices, double previous_price) {
  if (trade_prices.empty()) return previous_price;
  double sum = 0.0;
  for (double p : trade_prices) sum += p;
  return sum / static_cast<double>(trade_prices.size());
}

}  // namespace xmkt
