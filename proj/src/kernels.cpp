#include "qg/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qg::kernels {

bool avx2_active() {
#if defined(QG_HAVE_AVX2_TU)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
#else
  return false;
#endif
}

MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz) {
#if defined(QG_HAVE_AVX2_TU)
  if (avx2_active())
    return avx2::dot_range(xs, ys, zs, n, bx, by, bz, dx, dy, dz);
#endif
  return scalar::dot_range(xs, ys, zs, n, bx, by, bz, dx, dy, dz);
}

double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz) {
#if defined(QG_HAVE_AVX2_TU)
  if (avx2_active())
    return avx2::max_abs_offset(xs, ys, zs, n, bx, by, bz, dx, dy, dz);
#endif
  return scalar::max_abs_offset(xs, ys, zs, n, bx, by, bz, dx, dy, dz);
}

double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz) {
#if defined(QG_HAVE_AVX2_TU)
  if (avx2_active()) return avx2::min_dist2(xs, ys, zs, n, qx, qy, qz);
#endif
  return scalar::min_dist2(xs, ys, zs, n, qx, qy, qz);
}

double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim) {
#if defined(QG_HAVE_AVX2_TU)
  if (avx2_active())
    return avx2::layer_hessian_frob2(xs, ys, zs, ws, n, px, py, pz, dim);
#endif
  return scalar::layer_hessian_frob2(xs, ys, zs, ws, n, px, py, pz, dim);
}

}  // namespace qg::kernels
