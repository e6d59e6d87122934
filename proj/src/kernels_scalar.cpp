#include <algorithm>
#include <cmath>
#include <limits>

#include "qg/kernels.hpp"

namespace qg::kernels::scalar {

MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (xs[i] - bx) * dx + (ys[i] - by) * dy + (zs[i] - bz) * dz;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (xs[i] - bx) * dx + (ys[i] - by) * dy + (zs[i] - bz) * dz;
    m = std::max(m, std::abs(d));
  }
  return m;
}

double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double ax = xs[i] - qx, ay = ys[i] - qy, az = zs[i] - qz;
    best = std::min(best, ax * ax + ay * ay + az * az);
  }
  return best;
}

double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim) {
  if (dim == 2) {
    // Hess ln r = (I r^2 - 2 x x^T) / r^4
    double hxx = 0, hxy = 0, hyy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double ax = px - xs[i], ay = py - ys[i];
      double r2 = ax * ax + ay * ay;
      double inv4 = 1.0 / (r2 * r2);
      double w = ws[i];
      hxx += w * (r2 - 2 * ax * ax) * inv4;
      hyy += w * (r2 - 2 * ay * ay) * inv4;
      hxy += w * (-2 * ax * ay) * inv4;
    }
    return hxx * hxx + hyy * hyy + 2 * hxy * hxy;
  }
  // Hess (1/r) = (3 x x^T - I r^2) / r^5
  double hxx = 0, hyy = 0, hzz = 0, hxy = 0, hxz = 0, hyz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double ax = px - xs[i], ay = py - ys[i], az = pz - zs[i];
    double r2 = ax * ax + ay * ay + az * az;
    double r = std::sqrt(r2);
    double inv5 = 1.0 / (r2 * r2 * r);
    double w = ws[i];
    hxx += w * (3 * ax * ax - r2) * inv5;
    hyy += w * (3 * ay * ay - r2) * inv5;
    hzz += w * (3 * az * az - r2) * inv5;
    hxy += w * 3 * ax * ay * inv5;
    hxz += w * 3 * ax * az * inv5;
    hyz += w * 3 * ay * az * inv5;
  }
  return hxx * hxx + hyy * hyy + hzz * hzz +
         2 * (hxy * hxy + hxz * hxz + hyz * hyz);
}

}  // namespace qg::kernels::scalar
