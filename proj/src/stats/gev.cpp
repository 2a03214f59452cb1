#include "xmkt/stats/gev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "xmkt/stats/optim.hpp"
#include "xmkt/stats/series.hpp"

namespace xmkt::stats {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.5772156649015329;
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

double gev_nll(std::span<const double> data, double location, double scale, double shape) {
  if (!(scale > 0.0)) return kInf;
  const std::size_t n = data.size();
  double nll = static_cast<double>(n) * std::log(scale);
  if (std::fabs(shape) < 1e-8) {
    for (double x : data) {
      const double w = (x - location) / scale;
      nll += w + std::exp(-w);
    }
  } else {
    const double inv_shape = 1.0 / shape;
    for (double x : data) {
      const double z = 1.0 + shape * (x - location) / scale;
      if (!(z > 0.0)) return kInf;  // outside the support
      nll += (1.0 + inv_shape) * std::log(z) + std::pow(z, -inv_shape);
    }
  }
  return std::isfinite(nll) ? nll : kInf;
}

double gev_cdf(double x, double location, double scale, double shape) {
  const double w = (x - location) / scale;
  if (std::fabs(shape) < 1e-8) return std::exp(-std::exp(-w));
  const double z = 1.0 + shape * w;
  if (z <= 0.0) return shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(z, -1.0 / shape));
}

namespace {

struct Start {
  double location, scale, shape;
};

// Hosking's probability-weighted-moment estimates (k = -shape convention)
Start pwm_start(std::span<const double> data) {
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  double b0 = 0, b1 = 0, b2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    b0 += x[j];
    if (n > 1) b1 += x[j] * static_cast<double>(j) / static_cast<double>(n - 1);
    if (n > 2)
      b2 += x[j] * static_cast<double>(j) * static_cast<double>(j - (j > 0 ? 1 : 0)) /
            static_cast<double>((n - 1) * (n - 2));
  }
  b0 /= static_cast<double>(n);
  b1 /= static_cast<double>(n);
  b2 /= static_cast<double>(n);
  const double l1 = b0;
  const double l2 = 2.0 * b1 - b0;
  const double l3 = 6.0 * b2 - 6.0 * b1 + b0;
  Start s{l1, std::max(l2, 1e-12), 0.0};
  if (l2 <= 0.0) return s;
  const double t3 = l3 / l2;
  const double c = 2.0 / (3.0 + t3) - std::log(2.0) / std::log(3.0);
  const double k = 7.8590 * c + 2.9554 * c * c;
  if (std::fabs(k) < 1e-6) {
    s.scale = l2 / std::log(2.0);
    s.location = l1 - kEulerGamma * s.scale;
    s.shape = 0.0;
    return s;
  }
  const double g = std::tgamma(1.0 + k);
  s.scale = l2 * k / ((1.0 - std::pow(2.0, -k)) * g);
  s.location = l1 - s.scale * (1.0 - g) / k;
  s.shape = -k;
  if (!(s.scale > 0.0) || !std::isfinite(s.scale) || !std::isfinite(s.location) ||
      !std::isfinite(s.shape)) {
    s = {l1, std::max(l2 / std::log(2.0), 1e-12), 0.0};
    s.location = l1 - kEulerGamma * s.scale;
  }
  return s;
}

}  // namespace

GevFit fit_gev(std::span<const double> data) {
  GevFit fit;
  if (data.size() < 10 || variance(data) <= 0.0) {
    fit.status = FitStatus::Degenerate;
    return fit;
  }

  auto objective_of = [&](std::span<const double> th) {
    // th = (location, log scale, shape)
    return gev_nll(data, th[0], std::exp(th[1]), th[2]);
  };

  const Start pwm = pwm_start(data);
  const double sd = std::sqrt(variance(data));
  std::vector<std::vector<double>> starts;
  starts.push_back({pwm.location, std::log(pwm.scale), pwm.shape});
  // Gumbel-moment restart in case the PWM start sits outside the support
  starts.push_back({mean(data) - kEulerGamma * sd * 0.7797, std::log(sd * 0.7797), 0.0});

  NelderMeadOptions opts;
  opts.max_iterations = 3000;
  const std::vector<double> steps{0.25 * pwm.scale, 0.25, 0.1};

  NelderMeadResult best;
  best.f = kInf;
  for (const auto& s0 : starts) {
    if (!std::isfinite(objective_of(s0))) continue;
    auto r = nelder_mead(objective_of, s0, steps, opts);
    if (r.f < best.f) best = r;
  }
  if (!std::isfinite(best.f)) {
    fit.status = FitStatus::NonConvergence;
    return fit;
  }

  const std::vector<double> h{1e-6 * std::max(1.0, std::fabs(best.x[0])), 1e-6, 1e-6};
  auto polished = newton_polish(objective_of, best.x, h, 1e-7, 40);

  fit.location = polished.x[0];
  fit.scale = std::exp(polished.x[1]);
  fit.shape = polished.x[2];
  fit.loglik = -polished.f;
  fit.converged = best.converged || polished.converged;
  fit.status = fit.converged ? FitStatus::Ok : FitStatus::NonConvergence;

  // Kolmogorov-Smirnov distance as the goodness-of-fit statistic
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = gev_cdf(sorted[i], fit.location, fit.scale, fit.shape);
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
    ks = std::max(ks, std::fabs(static_cast<double>(i) / n - f));
  }
  fit.ks_stat = ks;
  return fit;
}

double gaussian_loglik(std::span<const double> data) {
  const double n = static_cast<double>(data.size());
  const double v = variance(data);
  if (!(v > 0.0)) return kInf;
  return -0.5 * n * (kLog2Pi + std::log(v) + 1.0);
}

}  // namespace xmkt::stats
