#include "netmoments/kernels.hpp"

namespace netmoments::simd::detail {

namespace {

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matvec_scalar(const double* a, const double* x, double* y,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

double residual_sq_scalar(const double* y, const double* v, double lambda,
                          std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - lambda * v[i];
    s += r * r;
  }
  return s;
}

void scale_scalar(double* v, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= c;
}

void central_sums_scalar(const double* v, std::size_t n, double mean,
                         double* m2, double* m3) {
  double s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
  }
  *m2 = s2;
  *m3 = s3;
}

}  // namespace

const KernelOps scalar_ops = {
    sum_scalar,   dot_scalar,   matvec_scalar,
    residual_sq_scalar, scale_scalar, central_sums_scalar,
    "scalar",
};

}  // namespace netmoments::simd::detail
