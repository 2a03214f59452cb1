#include "xmkt/stats/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "xmkt/stats/optim.hpp"
#include "xmkt/stats/series.hpp"

namespace xmkt::stats {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct RawParams {
  double ar1, ar2, c, alpha, beta;
};

// theta = (ar1, ar2, log c, logit(alpha+beta), logit(beta/(alpha+beta)))
RawParams theta_to_raw(std::span<const double> th) {
  const double u = sigmoid(th[3]);
  const double v = sigmoid(th[4]);
  return {th[0], th[1], std::exp(th[2]), u * (1.0 - v), u * v};
}

std::vector<double> raw_to_theta(const RawParams& p) {
  const double u = std::clamp(p.alpha + p.beta, 1e-8, 1.0 - 1e-8);
  const double v = std::clamp(p.beta / u, 1e-8, 1.0 - 1e-8);
  return {p.ar1, p.ar2, std::log(std::max(p.c, 1e-300)), logit(u), logit(v)};
}

// One likelihood pass; optionally fills the analytic gradient with respect
// to the raw parameters (a, b, c, alpha, beta). The variance recursion seeds
// from the sample variance of the AR residuals, whose own (a, b) dependence
// is carried through the gradient.
double nll_and_grad(std::span<const double> r, const RawParams& p, double* grad5) {
  const std::size_t n = r.size();
  if (n < 5) return kInf;
  if (!(p.c > 0.0) || p.alpha < 0.0 || p.beta < 0.0 || p.alpha + p.beta >= 1.0) return kInf;

  const std::size_t m = n - 2;
  double ss = 0.0, ss_da = 0.0, ss_db = 0.0;
  for (std::size_t t = 2; t < n; ++t) {
    const double e = r[t] - p.ar1 * r[t - 1] - p.ar2 * r[t - 2];
    ss += e * e;
    ss_da += -2.0 * e * r[t - 1];
    ss_db += -2.0 * e * r[t - 2];
  }
  double h = ss / static_cast<double>(m);
  if (!(h > 0.0)) return kInf;

  double dh[5] = {ss_da / static_cast<double>(m), ss_db / static_cast<double>(m), 0.0, 0.0, 0.0};
  double g[5] = {0, 0, 0, 0, 0};
  double nll = 0.0;
  double prev_e = 0.0, prev_h = 0.0;
  bool first = true;
  for (std::size_t t = 2; t < n; ++t) {
    const double e = r[t] - p.ar1 * r[t - 1] - p.ar2 * r[t - 2];
    if (!first) {
      const double de_prev_da = -r[t - 2];                     // d e_{t-1} / d a
      const double de_prev_db = t >= 3 ? -r[t - 3] : 0.0;      // d e_{t-1} / d b
      dh[0] = 2.0 * p.alpha * prev_e * de_prev_da + p.beta * dh[0];
      dh[1] = 2.0 * p.alpha * prev_e * de_prev_db + p.beta * dh[1];
      dh[2] = 1.0 + p.beta * dh[2];
      dh[3] = prev_e * prev_e + p.beta * dh[3];
      dh[4] = prev_h + p.beta * dh[4];
      h = p.c + p.alpha * prev_e * prev_e + p.beta * prev_h;
    }
    if (!(h > 0.0) || !std::isfinite(h)) return kInf;
    nll += 0.5 * (kLog2Pi + std::log(h) + e * e / h);
    if (grad5) {
      const double w = 0.5 * (1.0 - e * e / h) / h;  // d nll_t / d h_t
      const double v = e / h;                        // d nll_t / d e_t
      g[0] += w * dh[0] + v * (-r[t - 1]);
      g[1] += w * dh[1] + v * (-r[t - 2]);
      g[2] += w * dh[2];
      g[3] += w * dh[3];
      g[4] += w * dh[4];
    }
    prev_e = e;
    prev_h = h;
    first = false;
  }
  if (grad5)
    for (int i = 0; i < 5; ++i) grad5[i] = g[i];
  return std::isfinite(nll) ? nll : kInf;
}

// chain rule from raw-parameter gradient to theta-space gradient
void raw_grad_to_theta(const double* g_raw, std::span<const double> th, double* g_theta) {
  const double u = sigmoid(th[3]);
  const double v = sigmoid(th[4]);
  const double c = std::exp(th[2]);
  const double du = u * (1.0 - u);
  const double dv = v * (1.0 - v);
  g_theta[0] = g_raw[0];
  g_theta[1] = g_raw[1];
  g_theta[2] = g_raw[2] * c;
  // alpha = u(1-v), beta = uv
  g_theta[3] = g_raw[3] * du * (1.0 - v) + g_raw[4] * du * v;
  g_theta[4] = g_raw[3] * u * (-dv) + g_raw[4] * u * dv;
}

struct ThetaEval {
  double f = kInf;
  double g[5] = {0, 0, 0, 0, 0};
  double gmax = kInf;
};

ThetaEval eval_theta(std::span<const double> r, std::span<const double> th) {
  ThetaEval out;
  double g_raw[5];
  const RawParams p = theta_to_raw(th);
  out.f = nll_and_grad(r, p, g_raw);
  if (!std::isfinite(out.f)) return out;
  raw_grad_to_theta(g_raw, th, out.g);
  out.gmax = 0.0;
  for (double gi : out.g) out.gmax = std::max(out.gmax, std::fabs(gi));
  return out;
}

}  // namespace

double ar2_garch11_nll(std::span<const double> returns, double ar1, double ar2, double c,
                       double alpha, double beta) {
  return nll_and_grad(returns, {ar1, ar2, c, alpha, beta}, nullptr);
}

GarchFit fit_ar2_garch11(std::span<const double> returns) {
  GarchFit fit;
  const std::size_t n = returns.size();
  if (n < 20) {
    fit.status = FitStatus::Degenerate;
    return fit;
  }
  const double mu = mean(returns);
  const double var = variance(returns);
  // relative guard: constant series can carry harmless rounding dust
  if (var <= 1e-30 + mu * mu * 1e-24) {
    fit.status = FitStatus::Degenerate;
    return fit;
  }

  // OLS start for the AR part
  double c11 = 0, c22 = 0, c12 = 0, b1 = 0, b2 = 0;
  for (std::size_t t = 2; t < n; ++t) {
    c11 += returns[t - 1] * returns[t - 1];
    c22 += returns[t - 2] * returns[t - 2];
    c12 += returns[t - 1] * returns[t - 2];
    b1 += returns[t] * returns[t - 1];
    b2 += returns[t] * returns[t - 2];
  }
  const double det = c11 * c22 - c12 * c12;
  double a0 = 0.0, b0 = 0.0;
  if (std::fabs(det) > 1e-300) {
    a0 = (b1 * c22 - b2 * c12) / det;
    b0 = (b2 * c11 - b1 * c12) / det;
  }
  a0 = std::clamp(a0, -0.99, 0.99);
  b0 = std::clamp(b0, -0.99, 0.99);

  double resid_var = 0.0;
  for (std::size_t t = 2; t < n; ++t) {
    const double e = returns[t] - a0 * returns[t - 1] - b0 * returns[t - 2];
    resid_var += e * e;
  }
  resid_var /= static_cast<double>(n - 2);
  if (!(resid_var > 0.0)) {
    fit.status = FitStatus::Degenerate;
    return fit;
  }

  const double alpha0 = 0.10, beta0 = 0.80;
  auto theta = raw_to_theta({a0, b0, resid_var * (1.0 - alpha0 - beta0), alpha0, beta0});

  auto objective = [&](std::span<const double> th) {
    const RawParams p = theta_to_raw(th);
    return nll_and_grad(returns, p, nullptr);
  };

  NelderMeadOptions nm_opts;
  nm_opts.max_iterations = 4000;
  const std::vector<double> steps{0.1, 0.1, 0.5, 0.5, 0.5};
  auto nm = nelder_mead(objective, theta, steps, nm_opts);
  theta = nm.x;
  fit.iterations = nm.iterations;

  // Newton refinement on the analytic gradient; a step is accepted when it
  // shrinks the gradient norm or genuinely lowers the objective, which keeps
  // progress going below the resolution of the summed likelihood.
  ThetaEval cur = eval_theta(returns, theta);
  for (int it = 0; it < 100 && cur.gmax >= 1e-7; ++it) {
    const double h = 1e-5;
    std::vector<std::vector<double>> hess(5, std::vector<double>(5, 0.0));
    std::vector<double> tp(theta), tm(theta);
    for (int j = 0; j < 5; ++j) {
      tp = theta;
      tm = theta;
      tp[static_cast<std::size_t>(j)] += h;
      tm[static_cast<std::size_t>(j)] -= h;
      const ThetaEval ep = eval_theta(returns, tp);
      const ThetaEval em = eval_theta(returns, tm);
      if (!std::isfinite(ep.f) || !std::isfinite(em.f)) break;
      for (int i = 0; i < 5; ++i)
        hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            (ep.g[i] - em.g[i]) / (2.0 * h);
    }
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) {
        const double s = 0.5 * (hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                                hess[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        hess[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = s;
      }
    std::vector<double> rhs(5);
    for (int i = 0; i < 5; ++i) rhs[static_cast<std::size_t>(i)] = -cur.g[i];
    auto dx = solve_spd(hess, rhs);
    if (dx.empty()) break;
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 25; ++ls, t *= 0.5) {
      std::vector<double> cand(theta);
      for (int i = 0; i < 5; ++i) cand[static_cast<std::size_t>(i)] += t * dx[static_cast<std::size_t>(i)];
      const ThetaEval e = eval_theta(returns, cand);
      if (!std::isfinite(e.f)) continue;
      if (e.gmax < cur.gmax || e.f < cur.f - 1e-9 * std::fabs(cur.f)) {
        theta = std::move(cand);
        cur = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  const RawParams p = theta_to_raw(theta);
  fit.ar1 = p.ar1;
  fit.ar2 = p.ar2;
  fit.c = p.c;
  fit.alpha = p.alpha;
  fit.beta = p.beta;
  fit.loglik = -cur.f;

  // independent finite-difference flatness check in the optimizer's space
  const std::vector<double> hfd{1e-4, 1e-4, 1e-4, 1e-4, 1e-4};
  auto fd = numeric_gradient_o4(objective, theta, hfd);
  double fd_max = 0.0;
  for (double gi : fd) fd_max = std::max(fd_max, std::fabs(gi));
  fit.grad_inf_norm = fd_max;
  fit.converged = cur.gmax < 1e-6 && fd_max < 1e-4;
  fit.status = fit.converged ? FitStatus::Ok : FitStatus::NonConvergence;

  // observed-information standard errors in the natural parameter space
  auto raw_objective = [&](std::span<const double> x) {
    return ar2_garch11_nll(returns, x[0], x[1], x[2], x[3], x[4]);
  };
  const std::vector<double> raw{fit.ar1, fit.ar2, fit.c, fit.alpha, fit.beta};
  // steps must stay inside the feasible region: c > 0 rules out any absolute
  // floor (c itself can sit at 1e-9), and alpha/beta may touch zero
  std::vector<double> hr(5);
  hr[0] = std::max(1e-4 * std::fabs(raw[0]), 1e-6);
  hr[1] = std::max(1e-4 * std::fabs(raw[1]), 1e-6);
  hr[2] = 1e-3 * raw[2];
  hr[3] = std::max(1e-4 * raw[3], 1e-8);
  hr[4] = std::max(1e-4 * raw[4], 1e-8);
  const double persistence_gap = 1.0 - raw[3] - raw[4];
  hr[3] = std::min(hr[3], 0.25 * persistence_gap);
  hr[4] = std::min(hr[4], 0.25 * persistence_gap);
  auto hess = numeric_hessian(raw_objective, raw, hr);
  double* se[5] = {&fit.se_ar1, &fit.se_ar2, &fit.se_c, &fit.se_alpha, &fit.se_beta};
  for (int i = 0; i < 5; ++i) {
    std::vector<double> unit(5, 0.0);
    unit[static_cast<std::size_t>(i)] = 1.0;
    auto col = solve_spd(hess, unit);
    *se[i] = (!col.empty() && col[static_cast<std::size_t>(i)] > 0.0)
                 ? std::sqrt(col[static_cast<std::size_t>(i)])
                 : std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

}  // namespace xmkt::stats
