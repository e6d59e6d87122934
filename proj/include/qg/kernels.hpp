#pragma once

#include <cstddef>

// Hot inner loops over structure-of-arrays point data.  Each kernel has a
// scalar reference implementation and an AVX2 variant; the top-level entry
// points dispatch at runtime on CPU capability.  The two paths are
// equivalence-tested against each other.

namespace qg::kernels {

struct MinMax {
  double lo;
  double hi;
};

// min/max of (p - base) . dir over n points.
MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz);

// sup |(p - base) . dir| over n points.
double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz);

// min |p - q|^2 over n points.
double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz);

// Squared Frobenius norm of sum_i w_i Hess K(X - p_i), K the fundamental
// solution of the Laplacian in ambient dimension `dim` (log potential for
// dim = 2, 1/r for dim = 3).  Normalizing constants applied by the caller.
double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim);

bool avx2_active();

namespace scalar {
MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz);
double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz);
double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz);
double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QG_HAVE_AVX2_TU 1
namespace avx2 {
MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz);
double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz);
double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz);
double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim);
}  // namespace avx2
#endif

}  // namespace qg::kernels
