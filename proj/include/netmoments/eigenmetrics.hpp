#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "netmoments/graph.hpp"

namespace netmoments {

/// EC variance below this is treated as exactly zero, making skewness
/// undefined.
inline constexpr double kZeroVarianceTol = 1e-12;

/// Population moments of an eigenvector-centrality vector.
struct EcMoments {
  double mean = 0.0;
  double var = 0.0;
  /// Standardized third moment m3 / m2^(3/2); empty when var is zero.
  std::optional<double> skew;
};

/// The full eigenmetric hierarchy of one network: spectral radius (tier 1),
/// eigenvector centrality (node-level detail) and its moments (tiers 2-3).
struct EigenSummary {
  double lambda = 0.0;           // km
  std::vector<double> ec;        // unit Euclidean norm, all positive
  double ec_mean = 0.0;
  double ec_var = 0.0;
  std::optional<double> ec_skew;
};

/// Reusable buffers for the power iteration; lets hot loops (synthesis)
/// measure thousands of candidate matrices without allocating.
struct EigenWorkspace {
  std::vector<double> v;
  std::vector<double> y;
};

/// Lightweight result used by the synthesis inner loop.
struct EigenMetrics {
  double lambda = 0.0;
  double mean = 0.0;
  double var = 0.0;
  std::optional<double> skew;
};

/// Dominant eigenvalue of the weight matrix, to 1e-10 relative accuracy.
/// Throws ConvergenceFailure if the iteration budget is exhausted (cannot
/// happen for valid networks; indicates a solver bug).
double spectral_radius(const WeightedNetwork& net);

/// Unit-Euclidean-norm dominant eigenvector with positive orientation.
std::vector<double> eigenvector_centrality(const WeightedNetwork& net);

/// Population mean/variance/skewness of an EC vector (divide-by-n moments).
/// Skewness is a missing value, not an error, when variance < 1e-12.
EcMoments ec_moments(std::span<const double> ec);

/// Spectral radius via the eigenvector identity
/// (sum_ij w_ij v_j) / (sum_i v_i); agrees with spectral_radius to 1e-8
/// relative and serves as an independent cross-check of the solver.
/// Throws ZeroDenominator if sum_i v_i <= 0.
double frobenius_radius(const WeightedNetwork& net, std::span<const double> ec);

EigenSummary eigen_summary(const WeightedNetwork& net);

/// Allocation-free measurement of a row-major matrix; `a` must satisfy the
/// WeightedNetwork invariants (symmetric, zero diagonal, positive).
EigenMetrics measure_eigen(const double* a, std::size_t n, EigenWorkspace& ws);

/// Core solver: writes the unit Perron vector into ws.v and returns the
/// dominant eigenvalue.
double dominant_eigen(const double* a, std::size_t n, EigenWorkspace& ws);

}  // namespace netmoments
