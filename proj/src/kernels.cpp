#include "netmoments/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace netmoments::simd {

namespace {

bool cpu_has_avx2() {
#if defined(NETMOMENTS_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelOps* resolve(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &detail::scalar_ops;
    case Backend::Avx2:
#if defined(NETMOMENTS_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_ops;
#endif
      return nullptr;
    case Backend::Auto:
#if defined(NETMOMENTS_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_ops;
#endif
      return &detail::scalar_ops;
  }
  return nullptr;
}

Backend initial_backend() {
  if (const char* env = std::getenv("NETMOMENTS_KERNELS")) {
    try {
      Backend b = parse_backend(env);
      if (resolve(b) != nullptr) return b;
    } catch (const std::invalid_argument&) {
      // fall through to auto; a bad env var must not abort the tool
    }
  }
  return Backend::Auto;
}

std::atomic<const KernelOps*>& active_ptr() {
  static std::atomic<const KernelOps*> ptr{resolve(initial_backend())};
  return ptr;
}

}  // namespace

const KernelOps& kernels() { return *active_ptr().load(std::memory_order_relaxed); }

bool backend_available(Backend b) { return resolve(b) != nullptr; }

void set_backend(Backend b) {
  const KernelOps* ops = resolve(b);
  if (ops == nullptr)
    throw std::invalid_argument("kernel backend not available on this host: " +
                                backend_name(b));
  active_ptr().store(ops, std::memory_order_relaxed);
}

Backend active_backend() {
  const KernelOps* ops = active_ptr().load(std::memory_order_relaxed);
  if (ops == &detail::scalar_ops) return Backend::Scalar;
  return Backend::Avx2;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::Auto:
      return "auto";
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "?";
}

Backend parse_backend(const std::string& s) {
  if (s == "auto") return Backend::Auto;
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2") return Backend::Avx2;
  throw std::invalid_argument("unknown kernel backend: " + s);
}

}  // namespace netmoments::simd
