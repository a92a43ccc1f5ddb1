#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netmoments/eigenmetrics.hpp"
#include "netmoments/graph.hpp"

namespace netmoments {

/// Per-metric acceptance tolerances for synthesis. The values double as the
/// scales of the squared-difference objective, so objective <= 1 guarantees
/// per-metric acceptance.
struct Tolerances {
  double lambda_km = 0.05;
  double var = 1e-4;
  double skew = 0.02;
};

/// A prescribed (spectral radius, EC variance, EC skewness) triple.
/// skew_t empty means the skewness is unconstrained (Free).
struct MetricTarget {
  std::size_t n = 6;
  double lambda_t = 0.0;  // km
  double var_t = 0.0;
  std::optional<double> skew_t;
  Bounds bounds;
  Tolerances tol;

  /// Throws InvalidLevel unless
  ///   (n-1)*w_min <= lambda_t <= (n-1)*w_max,
  ///   0 <= var_t < 1/n, and
  ///   skew_t is Free whenever var_t == 0.
  void validate() const;
};

/// Compact label such as "L80_V0.026_Sfree" used in file names and records.
std::string target_label(const MetricTarget& target);

/// Requested levels for a sweep grid: EC-variance levels are listed per
/// spectral radius and EC-skewness levels per (radius, variance) pair.
struct GridSpec {
  std::size_t n = 6;
  Bounds bounds;
  std::vector<double> lambda_levels;
  std::vector<std::vector<double>> var_levels;
  std::vector<std::vector<std::vector<double>>> skew_levels;
  Tolerances tol;

  std::string to_json() const;
  static GridSpec from_json(const std::string& text);
};

/// Thrown when no candidate meets every tolerance within the iteration
/// budget; carries the best candidate found and its residuals.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& msg, WeightedNetwork best, double resid_lambda,
             double resid_var, double resid_skew, int outer_iters)
      : Error(msg),
        resid_lambda(resid_lambda),
        resid_var(resid_var),
        resid_skew(resid_skew),
        outer_iters(outer_iters),
        best_(std::move(best)) {}

  const WeightedNetwork& best_candidate() const { return best_; }

  double resid_lambda;
  double resid_var;
  double resid_skew;
  int outer_iters;

 private:
  WeightedNetwork best_;
};

struct SynthesisOptions {
  /// Outer re-randomizations before giving up.
  int max_outer = 500;
  /// Objective evaluations allowed per inner minimization.
  int inner_evals = 2000;
};

/// Sum over constrained metrics of ((measured - target)/tolerance)^2.
/// When the target constrains skewness but the candidate's variance is below
/// the zero threshold, a large finite penalty stands in for the undefined
/// skew term so the search can leave the degenerate region.
double objective(const WeightedNetwork& candidate, const MetricTarget& target);

/// Builds a network matching the target within its tolerances.
///
/// Search structure: a random bounded matrix is refined by derivative-free
/// coordinate descent over the upper-triangle entries (box-projected,
/// per-coordinate adaptive steps) plus a whole-matrix rescale move that
/// exploits the scale covariance of the spectral radius; when the descent
/// stalls, one free entry is re-randomized and the descent restarts.
/// Deterministic for a fixed (target, seed). Throws Infeasible when the
/// budget is exhausted.
WeightedNetwork synthesize(const MetricTarget& target, std::uint64_t seed,
                           const SynthesisOptions& options = {});

/// Expands a GridSpec into targets ordered radius-major, then variance, then
/// skewness. A zero-variance level contributes exactly one skew-Free target.
/// Throws InvalidLevel if any implied target is invalid.
std::vector<MetricTarget> grid_targets(const GridSpec& spec);

/// The built-in grid: five spectral radii at {0.2,0.4,0.6,0.8,1.0} of
/// (n-1)*w_max (clamped to the feasible floor), five variance levels per
/// radius spanning [0, 0.8*var_max], and five skew levels per positive
/// variance spanning the empirically reachable range. The empirical extremes
/// are found by bounded searches seeded from `seed`, so the grid is
/// deterministic per seed.
GridSpec default_grid(std::size_t n = 6, Bounds bounds = {},
                      std::uint64_t seed = 20240501,
                      const Tolerances& tol = {});

}  // namespace netmoments
