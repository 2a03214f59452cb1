#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xmkt::stats {

struct StatsError : std::runtime_error {
  enum Kind { LengthMismatch, NonpositivePrice, DegenerateSeries };
  StatsError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// elementwise F - S
std::vector<double> compute_basis_series(std::span<const double> futures,
                                         std::span<const double> index);

// r_t = ln(p_t / p_{t-1}); length n-1
std::vector<double> log_return_series(std::span<const double> prices);

struct SpreadSeries {
  std::vector<double> spreads;
  long skipped = 0;  // steps with a one-sided or empty book
};

// best ask - best bid per quote row; rows missing a side are skipped
SpreadSeries bidask_spread_series(std::span<const double> best_bid,
                                  std::span<const double> best_ask,
                                  std::span<const bool> has_bid, std::span<const bool> has_ask);

struct AcfResult {
  std::vector<double> values;  // index k-1 holds lag k
  double band = 0;             // 95% white-noise band, 1.96 / sqrt(n)

  double at_lag(int k) const { return values[static_cast<std::size_t>(k - 1)]; }
};

// sample autocorrelation for lags 1..max_lag with the overall mean and
// variance normalization
AcfResult acf(std::span<const double> series, int max_lag);

// fourth standardized moment minus 3
double excess_kurtosis(std::span<const double> series);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // population (1/n)

// OLS slope of y on 0..n-1 (basis trend helper)
double ols_slope(std::span<const double> y);

std::vector<double> absolute(std::span<const double> xs);

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<long> counts;    // n_bins
};

Histogram histogram(std::span<const double> xs, int n_bins);

}  // namespace xmkt::stats
