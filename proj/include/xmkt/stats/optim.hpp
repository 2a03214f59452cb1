#pragma once

#include <functional>
#include <span>
#include <vector>

namespace xmkt::stats {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  int max_iterations = 2000;
  double f_tolerance = 1e-12;  // simplex spread stopping rule
  double x_tolerance = 1e-10;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex on an unconstrained objective. `steps` sets the initial
// simplex edge per coordinate.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0,
                             std::span<const double> steps, const NelderMeadOptions& opts = {});

// central-difference gradient
std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x,
                                     std::span<const double> h);

// fourth-order five-point gradient; suppresses the h^2 curvature term that
// dominates plain central differences on sharply curved likelihoods
std::vector<double> numeric_gradient_o4(const Objective& f, std::span<const double> x,
                                        std::span<const double> h);

// central-difference Hessian (symmetrized)
std::vector<std::vector<double>> numeric_hessian(const Objective& f, std::span<const double> x,
                                                 std::span<const double> h);

// Solves A x = b for a symmetric positive definite A via Cholesky, adding
// diagonal jitter until the factorization succeeds. Returns empty on failure.
std::vector<double> solve_spd(std::vector<std::vector<double>> a, std::vector<double> b);

// Newton polish with backtracking line search; returns the improved point.
// Stops when the infinity norm of the gradient drops below g_tol.
struct PolishResult {
  std::vector<double> x;
  double f = 0;
  double grad_inf_norm = 0;
  bool converged = false;
};
PolishResult newton_polish(const Objective& f, std::span<const double> x0,
                           std::span<const double> h, double g_tol, int max_iter = 60);

}  // namespace xmkt::stats
