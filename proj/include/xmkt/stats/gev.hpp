#pragma once

#include <span>

#include "xmkt/stats/garch.hpp"  // FitStatus

namespace xmkt::stats {

struct GevFit {
  double location = 0;  // mu
  double scale = 1;     // psi > 0
  double shape = 0;     // xi
  double loglik = 0;
  double ks_stat = 0;  // Kolmogorov-Smirnov distance against the fitted cdf
  FitStatus status = FitStatus::Ok;
  bool converged = false;
};

// Negative log-likelihood; +inf when the support constraint
// 1 + shape * (x - location) / scale > 0 fails for any point.
double gev_nll(std::span<const double> data, double location, double scale, double shape);

double gev_cdf(double x, double location, double scale, double shape);

// MLE over (location, scale, shape), started from probability-weighted
// moments; a Gumbel-moment restart covers the cases where that start stalls.
GevFit fit_gev(std::span<const double> data);

// Gaussian MLE log-likelihood of the same data, for model comparison.
double gaussian_loglik(std::span<const double> data);

}  // namespace xmkt::stats
