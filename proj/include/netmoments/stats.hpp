#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netmoments/errors.hpp"

namespace netmoments {

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

/// Spearman rank correlation with average ranks for ties; two-sided p-value
/// from the t approximation on n-2 degrees of freedom.
/// Throws DegenerateInput for constant input or fewer than 3 points.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> v);

struct OlsFit {
  std::vector<double> coefficients;  // intercept first, then predictors
  double r2 = 0.0;
  double rss = 0.0;
  double aic = 0.0;
  std::size_t rows = 0;
  std::size_t predictors = 0;
};

/// Ordinary least squares with intercept via Householder QR.
/// predictors holds one column per term, each of length m.
/// R^2 = 1 - RSS/TSS (0 for a constant response);
/// AIC = m ln(RSS/m) + 2(k+1) with k = number of predictor terms.
/// Throws RankDeficient on a singular design and DegenerateInput when
/// m < k + 2.
OlsFit ols_fit(const std::vector<std::vector<double>>& predictors,
               std::span<const double> response);

struct LowessPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Locally weighted degree-1 regression with the tricube kernel
/// w(u) = (1-|u|^3)^3 for |u|<1 and 0 otherwise, bandwidth set per point by
/// the ceil(frac*m)-th nearest neighbor distance, plus optional bisquare
/// robustifying iterations. Returns the fitted curve sorted by x.
/// Throws DegenerateInput when all x coincide, m < 3, or frac is outside
/// (0, 1].
std::vector<LowessPoint> lowess(std::span<const double> xs,
                                std::span<const double> ys, double frac = 0.67,
                                int robust_iters = 0);

/// Two-sided p of the two-sample Kolmogorov-Smirnov test (asymptotic).
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

/// Two-sided p from the Student t distribution with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace netmoments
