#include "xmkt/stats/series.hpp"

#include <algorithm>
#include <cmath>

namespace xmkt::stats {

std::vector<double> compute_basis_series(std::span<const double> futures,
                                         std::span<const double> index) {
  if (futures.size() != index.size())
    throw StatsError(StatsError::LengthMismatch,
                     "basis: futures series has " + std::to_string(futures.size()) +
                         " points, index has " + std::to_string(index.size()));
  std::vector<double> basis(futures.size());
  for (std::size_t i = 0; i < futures.size(); ++i) basis[i] = futures[i] - index[i];
  return basis;
}

std::vector<double> log_return_series(std::span<const double> prices) {
  std::vector<double> r;
  if (prices.size() < 2) return r;
  r.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !(prices[i - 1] > 0.0))
      throw StatsError(StatsError::NonpositivePrice,
                       "log returns: non-positive price at index " + std::to_string(i));
    r.push_back(std::log(prices[i] / prices[i - 1]));
  }
  return r;
}

SpreadSeries bidask_spread_series(std::span<const double> best_bid,
                                  std::span<const double> best_ask,
                                  std::span<const bool> has_bid, std::span<const bool> has_ask) {
  if (best_bid.size() != best_ask.size() || has_bid.size() != best_bid.size() ||
      has_ask.size() != best_bid.size())
    throw StatsError(StatsError::LengthMismatch, "spread: quote columns differ in length");
  SpreadSeries out;
  for (std::size_t i = 0; i < best_bid.size(); ++i) {
    if (has_bid[i] && has_ask[i]) {
      out.spreads.push_back(best_ask[i] - best_bid[i]);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

AcfResult acf(std::span<const double> series, int max_lag) {
  const std::size_t n = series.size();
  if (static_cast<std::size_t>(max_lag) >= n || max_lag < 1)
    throw StatsError(StatsError::LengthMismatch, "acf: need n > max_lag >= 1");
  const double m = mean(series);
  double denom = 0.0;
  for (double x : series) denom += (x - m) * (x - m);
  if (denom <= 0.0)
    throw StatsError(StatsError::DegenerateSeries, "acf: series variance is zero");
  AcfResult out;
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  out.values.resize(static_cast<std::size_t>(max_lag));
  for (int k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
      num += (series[t] - m) * (series[t - static_cast<std::size_t>(k)] - m);
    out.values[static_cast<std::size_t>(k - 1)] = num / denom;
  }
  return out;
}

double excess_kurtosis(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4)
    throw StatsError(StatsError::DegenerateSeries, "kurtosis: need at least 4 points");
  const double m = mean(series);
  double m2 = 0.0, m4 = 0.0;
  for (double x : series) {
    const double d = x - m;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 <= 0.0)
    throw StatsError(StatsError::DegenerateSeries, "kurtosis: series variance is zero");
  return m4 / (m2 * m2) - 3.0;
}

double ols_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  const double tbar = static_cast<double>(n - 1) / 2.0;
  const double ybar = mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - tbar;
    num += dt * (y[t] - ybar);
    den += dt * dt;
  }
  return num / den;
}

std::vector<double> absolute(std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::fabs(xs[i]);
  return out;
}

Histogram histogram(std::span<const double> xs, int n_bins) {
  Histogram h;
  if (xs.empty() || n_bins < 1) return h;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) hi = lo + 1.0;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i)
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_bins;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double x : xs) {
    int b = static_cast<int>((x - lo) / (hi - lo) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

}  // namespace xmkt::stats
