#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace netmoments::simd {

/// Dense double-precision primitives used by the eigensolver and the
/// statistics layer. Every operation has a scalar reference implementation
/// and, on x86-64 with AVX2+FMA, a vectorized variant. The active variant is
/// chosen once at startup (see select_backend) and can be overridden with the
/// NETMOMENTS_KERNELS environment variable or set_backend().
///
/// Vector variants reassociate floating-point sums, so results may differ
/// from the scalar reference in the last few ulps; all callers treat kernel
/// output as accurate to ~1e-13 relative, never bit-exact across backends.
struct KernelOps {
  // sum of a[0..n)
  double (*sum)(const double* a, std::size_t n);
  // inner product of a and b
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = A x for a row-major n-by-n matrix
  void (*matvec)(const double* a, const double* x, double* y, std::size_t n);
  // sum of (y_i - lambda * v_i)^2
  double (*residual_sq)(const double* y, const double* v, double lambda,
                        std::size_t n);
  // v *= c
  void (*scale)(double* v, double c, std::size_t n);
  // m2 = sum (v_i - mean)^2, m3 = sum (v_i - mean)^3
  void (*central_sums)(const double* v, std::size_t n, double mean, double* m2,
                       double* m3);
  const char* name;
};

enum class Backend { Auto, Scalar, Avx2 };

/// Active kernel table. First call performs backend selection.
const KernelOps& kernels();

bool backend_available(Backend b);

/// Force a backend (mainly for tests and the CLI --kernels flag).
/// Throws std::invalid_argument if the backend is not available on this host.
void set_backend(Backend b);

Backend active_backend();
std::string backend_name(Backend b);

/// Parses "auto" | "scalar" | "avx2"; throws std::invalid_argument otherwise.
Backend parse_backend(const std::string& s);

namespace detail {
extern const KernelOps scalar_ops;
#if defined(NETMOMENTS_HAVE_AVX2)
extern const KernelOps avx2_ops;
#endif
}  // namespace detail

}  // namespace netmoments::simd
