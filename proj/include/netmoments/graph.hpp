#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netmoments/errors.hpp"

namespace netmoments {

/// Box bounds for edge weights, in km. The defaults cover the dispersal
/// setting this library was built for: corridors between 1 and 20 km.
struct Bounds {
  double w_min = 1.0;
  double w_max = 20.0;

  bool operator==(const Bounds&) const = default;
};

/// A fully connected, undirected, weighted network on n >= 2 nodes.
///
/// Weights are corridor distances in km: a low weight means easy movement.
/// The matrix is symmetric with a zero diagonal and every off-diagonal
/// weight inside [w_min, w_max]; strictly positive off-diagonals make it
/// irreducible. Instances are immutable after construction and safe to share
/// across threads.
class WeightedNetwork {
 public:
  /// Absolute tolerance when checking symmetry of externally supplied
  /// matrices. Internal constructors mirror the upper triangle, so their
  /// symmetry is exact.
  static constexpr double kSymmetryTol = 1e-9;

  /// Validates an externally supplied square matrix.
  /// Throws ValidationError with kind NonSquare, NonzeroDiagonal,
  /// AsymmetricEntry or OutOfBounds. The input is copied.
  static WeightedNetwork validate(const std::vector<std::vector<double>>& raw,
                                  Bounds bounds = {});

  /// Same as validate() but for a row-major flat matrix.
  static WeightedNetwork validate_flat(std::span<const double> raw,
                                       std::size_t n, Bounds bounds = {});

  /// All off-diagonal weights equal to w. Throws BoundViolation if w is
  /// outside the bounds.
  static WeightedNetwork uniform(std::size_t n, double w, Bounds bounds = {});

  /// Builds from the strict upper triangle in row-major order
  /// (w01, w02, ..., w0{n-1}, w12, ...); the lower triangle is mirrored
  /// exactly. Bounds are enforced.
  static WeightedNetwork from_upper_triangle(std::size_t n,
                                             std::span<const double> upper,
                                             Bounds bounds = {});

  std::size_t size() const { return n_; }
  Bounds bounds() const { return bounds_; }
  double weight(std::size_t i, std::size_t j) const {
    return weights_[i * n_ + j];
  }
  /// Row-major n*n matrix.
  const std::vector<double>& flat() const { return weights_; }
  const double* data() const { return weights_.data(); }

  /// Largest off-diagonal weight.
  double max_weight() const;

  /// Strict upper triangle, row-major; the free variables of this matrix
  /// class.
  std::vector<double> upper_triangle() const;
  static std::size_t upper_size(std::size_t n) { return n * (n - 1) / 2; }

  // --- serialization ----------------------------------------------------
  // JSON: {"n": 6, "w_min": 1.0, "w_max": 20.0, "weights": [[...], ...]}
  // CSV:  one "n,w_min,w_max" header line, then n rows of n values.
  // Both round-trip weights bit-exactly. Decoding throws DecodeError on
  // malformed text and ValidationError on invariant violations.
  std::string to_json() const;
  static WeightedNetwork from_json(const std::string& text);
  std::string to_csv() const;
  static WeightedNetwork from_csv(const std::string& text);

  /// Reads .json or .csv based on the file extension.
  static WeightedNetwork load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool operator==(const WeightedNetwork&) const = default;

 private:
  WeightedNetwork(std::size_t n, std::vector<double> weights, Bounds bounds)
      : n_(n), weights_(std::move(weights)), bounds_(bounds) {}

  std::size_t n_ = 0;
  std::vector<double> weights_;
  Bounds bounds_;
};

/// Shortest round-trip decimal form of a double (used by all CSV writers).
std::string format_double(double x);

}  // namespace netmoments
