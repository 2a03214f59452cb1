#pragma once

#include <span>

namespace xmkt::stats {

enum class FitStatus { Ok, NonConvergence, Degenerate };

struct GarchFit {
  // r_t = ar1 * r_{t-1} + ar2 * r_{t-2} + e_t,  s2_t = c + alpha * e_{t-1}^2 + beta * s2_{t-1}
  double ar1 = 0, ar2 = 0, c = 0, alpha = 0, beta = 0;
  double se_ar1 = 0, se_ar2 = 0, se_c = 0, se_alpha = 0, se_beta = 0;
  double loglik = 0;
  FitStatus status = FitStatus::Ok;
  bool converged = false;
  double grad_inf_norm = 0;  // in the optimizer's transformed space
  int iterations = 0;

  double persistence() const { return alpha + beta; }
};

// Gaussian negative log-likelihood of the joint AR(2)-GARCH(1,1) model.
// The variance recursion starts from the sample variance of the AR
// residuals. Returns +inf outside c > 0, alpha, beta >= 0, alpha + beta < 1.
double ar2_garch11_nll(std::span<const double> returns, double ar1, double ar2, double c,
                       double alpha, double beta);

// Joint MLE over all five parameters: simplex search in a transformed space
// that enforces the constraint set, then a Newton polish. Standard errors
// come from the numerical Hessian in the natural parameter space.
GarchFit fit_ar2_garch11(std::span<const double> returns);

}  // namespace xmkt::stats
