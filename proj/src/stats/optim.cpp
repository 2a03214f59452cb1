#include "xmkt/stats/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xmkt::stats {

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0,
                             std::span<const double> steps, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  NelderMeadResult result;
  std::vector<double> centroid(n), reflected(n), expanded(n), contracted(n);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // order best..worst
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];

    double spread = std::fabs(fv[worst] - fv[best]);
    double xspread = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      xspread = std::max(xspread, std::fabs(simplex[worst][j] - simplex[best][j]));
    if (spread < opts.f_tolerance && xspread < opts.x_tolerance) {
      result.converged = true;
      break;
    }

    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst) c += simplex[i][j];
      centroid[j] = c / static_cast<double>(n);
    }

    for (std::size_t j = 0; j < n; ++j)
      reflected[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
    const double fr = f(reflected);
    if (fr < fv[best]) {
      for (std::size_t j = 0; j < n; ++j)
        expanded[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        fv[worst] = fe;
      } else {
        simplex[worst] = reflected;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = reflected;
      fv[worst] = fr;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j)
      contracted[j] = centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
    const double fc = f(contracted);
    if (fc < fv[worst]) {
      simplex[worst] = contracted;
      fv[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fv[i] = f(simplex[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  result.x = simplex[best];
  result.f = fv[best];
  result.iterations = iter;
  return result;
}

std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x,
                                     std::span<const double> h) {
  const std::size_t n = x.size();
  std::vector<double> g(n), xp(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = xp[i];
    xp[i] = xi + h[i];
    const double fp = f(xp);
    xp[i] = xi - h[i];
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h[i]);
  }
  return g;
}

std::vector<double> numeric_gradient_o4(const Objective& f, std::span<const double> x,
                                        std::span<const double> h) {
  const std::size_t n = x.size();
  std::vector<double> g(n), xp(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = xp[i];
    xp[i] = xi + 2.0 * h[i];
    const double f2p = f(xp);
    xp[i] = xi + h[i];
    const double f1p = f(xp);
    xp[i] = xi - h[i];
    const double f1m = f(xp);
    xp[i] = xi - 2.0 * h[i];
    const double f2m = f(xp);
    xp[i] = xi;
    g[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h[i]);
  }
  return g;
}

std::vector<std::vector<double>> numeric_hessian(const Objective& f, std::span<const double> x,
                                                 std::span<const double> h) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
  std::vector<double> xp(x.begin(), x.end());
  const double f0 = f(xp);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == j) {
        const double xi = xp[i];
        xp[i] = xi + h[i];
        const double fp = f(xp);
        xp[i] = xi - h[i];
        const double fm = f(xp);
        xp[i] = xi;
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
      } else {
        const double xi = xp[i], xj = xp[j];
        xp[i] = xi + h[i];
        xp[j] = xj + h[j];
        const double fpp = f(xp);
        xp[j] = xj - h[j];
        const double fpm = f(xp);
        xp[i] = xi - h[i];
        xp[j] = xj + h[j];
        const double fmp = f(xp);
        xp[j] = xj - h[j];
        const double fmm = f(xp);
        xp[i] = xi;
        xp[j] = xj;
        hess[i][j] = hess[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      }
    }
  }
  return hess;
}

std::vector<double> solve_spd(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i && ok; ++j) {
        double s = a[i][j] + (i == j ? jitter : 0.0);
        for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          if (s <= 0.0) {
            ok = false;
            break;
          }
          l[i][i] = std::sqrt(s);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    }
    if (!ok) {
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i][i]));
      jitter = jitter == 0.0 ? std::max(1e-10, 1e-8 * scale) : jitter * 10.0;
      continue;
    }
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
      y[i] = s / l[i][i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= l[k][ii] * x[k];
      x[ii] = s / l[ii][ii];
    }
    return x;
  }
  return {};
}

PolishResult newton_polish(const Objective& f, std::span<const double> x0,
                           std::span<const double> h, double g_tol, int max_iter) {
  PolishResult out;
  std::vector<double> x(x0.begin(), x0.end());
  double fx = f(x);
  for (int it = 0; it < max_iter; ++it) {
    auto g = numeric_gradient(f, x, h);
    double gmax = 0.0;
    for (double gi : g) gmax = std::max(gmax, std::fabs(gi));
    out.grad_inf_norm = gmax;
    if (gmax < g_tol) {
      out.converged = true;
      break;
    }
    auto hess = numeric_hessian(f, x, h);
    std::vector<double> rhs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
    auto dx = solve_spd(hess, rhs);
    if (dx.empty()) break;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::vector<double> xt(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + t * dx[i];
      const double ft = f(xt);
      if (std::isfinite(ft) && ft < fx) {
        x = std::move(xt);
        fx = ft;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  out.x = std::move(x);
  out.f = fx;
  return out;
}

}  // namespace xmkt::stats
