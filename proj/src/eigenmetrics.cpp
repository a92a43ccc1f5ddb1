#include "netmoments/eigenmetrics.hpp"

#include <cmath>

#include "netmoments/errors.hpp"
#include "netmoments/kernels.hpp"

namespace netmoments {

namespace {

constexpr int kMaxIterations = 100000;
// Unshifted iteration is fastest for well-separated spectra; if it has not
// converged after this many sweeps the spectrum is nearly symmetric
// (lambda_min close to -lambda_max) and a diagonal shift fixes the ratio.
constexpr int kShiftAfter = 512;

}  // namespace

double dominant_eigen(const double* a, std::size_t n, EigenWorkspace& ws) {
  const auto& k = simd::kernels();
  ws.v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  ws.y.resize(n);
  double* v = ws.v.data();
  double* y = ws.y.data();

  double shift = 0.0;
  double lambda = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    k.matvec(a, v, y, n);
    lambda = k.dot(v, y, n);
    const double tol = 1e-12 * std::max(1.0, std::abs(lambda));
    if (k.residual_sq(y, v, lambda, n) <= tol * tol) {
      if (k.sum(v, n) < 0.0) k.scale(v, -1.0, n);
      return lambda;
    }
    if (it == kShiftAfter && lambda > 0.0) shift = lambda;
    if (shift != 0.0) {
      // iterate on A + shift*I; same eigenvectors, spectrum moved positive
      for (std::size_t i = 0; i < n; ++i) y[i] += shift * v[i];
    }
    const double norm = std::sqrt(k.dot(y, y, n));
    if (!(norm > 0.0)) {
      throw ConvergenceFailure("power iteration collapsed to the zero vector");
    }
    k.scale(y, 1.0 / norm, n);
    std::swap(ws.v, ws.y);
    v = ws.v.data();
    y = ws.y.data();
  }
  throw ConvergenceFailure("power iteration exceeded " +
                           std::to_string(kMaxIterations) + " iterations");
}

double spectral_radius(const WeightedNetwork& net) {
  EigenWorkspace ws;
  return dominant_eigen(net.data(), net.size(), ws);
}

std::vector<double> eigenvector_centrality(const WeightedNetwork& net) {
  EigenWorkspace ws;
  dominant_eigen(net.data(), net.size(), ws);
  return std::move(ws.v);
}

EcMoments ec_moments(std::span<const double> ec) {
  const auto& k = simd::kernels();
  const auto n = ec.size();
  const double nd = static_cast<double>(n);
  EcMoments m;
  m.mean = k.sum(ec.data(), n) / nd;
  double s2 = 0.0, s3 = 0.0;
  k.central_sums(ec.data(), n, m.mean, &s2, &s3);
  m.var = s2 / nd;
  if (m.var >= kZeroVarianceTol)
    m.skew = (s3 / nd) / (m.var * std::sqrt(m.var));
  return m;
}

double frobenius_radius(const WeightedNetwork& net,
                        std::span<const double> ec) {
  const auto& k = simd::kernels();
  const auto n = net.size();
  std::vector<double> av(n);
  k.matvec(net.data(), ec.data(), av.data(), n);
  const double denom = k.sum(ec.data(), n);
  if (!(denom > 0.0)) {
    throw ZeroDenominator(
        "eigenvector components sum to a non-positive value; not a valid "
        "centrality vector");
  }
  return k.sum(av.data(), n) / denom;
}

EigenSummary eigen_summary(const WeightedNetwork& net) {
  EigenWorkspace ws;
  EigenSummary s;
  s.lambda = dominant_eigen(net.data(), net.size(), ws);
  s.ec = std::move(ws.v);
  const EcMoments m = ec_moments(s.ec);
  s.ec_mean = m.mean;
  s.ec_var = m.var;
  s.ec_skew = m.skew;
  return s;
}

EigenMetrics measure_eigen(const double* a, std::size_t n,
                           EigenWorkspace& ws) {
  EigenMetrics out;
  out.lambda = dominant_eigen(a, n, ws);
  const auto& k = simd::kernels();
  const double nd = static_cast<double>(n);
  out.mean = k.sum(ws.v.data(), n) / nd;
  double s2 = 0.0, s3 = 0.0;
  k.central_sums(ws.v.data(), n, out.mean, &s2, &s3);
  out.var = s2 / nd;
  if (out.var >= kZeroVarianceTol)
    out.skew = (s3 / nd) / (out.var * std::sqrt(out.var));
  return out;
}

}  // namespace netmoments
