#include "qg/kernels.hpp"

#if defined(QG_HAVE_AVX2_TU)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qg::kernels::avx2 {

namespace {

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  lo = _mm_min_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  lo = _mm_max_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  return _mm_cvtsd_f64(lo);
}

}  // namespace

MinMax dot_range(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double bx, double by, double bz, double dx,
                 double dy, double dz) {
  const double inf = std::numeric_limits<double>::infinity();
  __m256d vlo = _mm256_set1_pd(inf);
  __m256d vhi = _mm256_set1_pd(-inf);
  __m256d vbx = _mm256_set1_pd(bx), vby = _mm256_set1_pd(by),
          vbz = _mm256_set1_pd(bz);
  __m256d vdx = _mm256_set1_pd(dx), vdy = _mm256_set1_pd(dy),
          vdz = _mm256_set1_pd(dz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), vbx), vdx);
    d = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_loadu_pd(ys + i), vby), vdy, d);
    d = _mm256_fmadd_pd(_mm256_sub_pd(_mm256_loadu_pd(zs + i), vbz), vdz, d);
    vlo = _mm256_min_pd(vlo, d);
    vhi = _mm256_max_pd(vhi, d);
  }
  double lo = hmin(vlo), hi = hmax(vhi);
  for (; i < n; ++i) {
    double d = (xs[i] - bx) * dx + (ys[i] - by) * dy + (zs[i] - bz) * dz;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

double max_abs_offset(const double* xs, const double* ys, const double* zs,
                      std::size_t n, double bx, double by, double bz,
                      double dx, double dy, double dz) {
  MinMax mm = dot_range(xs, ys, zs, n, bx, by, bz, dx, dy, dz);
  if (n == 0) return 0;
  return std::max(std::abs(mm.lo), std::abs(mm.hi));
}

double min_dist2(const double* xs, const double* ys, const double* zs,
                 std::size_t n, double qx, double qy, double qz) {
  const double inf = std::numeric_limits<double>::infinity();
  __m256d vbest = _mm256_set1_pd(inf);
  __m256d vqx = _mm256_set1_pd(qx), vqy = _mm256_set1_pd(qy),
          vqz = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ax = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    __m256d ay = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    __m256d az = _mm256_sub_pd(_mm256_loadu_pd(zs + i), vqz);
    __m256d d = _mm256_mul_pd(ax, ax);
    d = _mm256_fmadd_pd(ay, ay, d);
    d = _mm256_fmadd_pd(az, az, d);
    vbest = _mm256_min_pd(vbest, d);
  }
  double best = hmin(vbest);
  for (; i < n; ++i) {
    double ax = xs[i] - qx, ay = ys[i] - qy, az = zs[i] - qz;
    best = std::min(best, ax * ax + ay * ay + az * az);
  }
  return best;
}

double layer_hessian_frob2(const double* xs, const double* ys,
                           const double* zs, const double* ws, std::size_t n,
                           double px, double py, double pz, int dim) {
  std::size_t i = 0;
  if (dim == 2) {
    __m256d sxx = _mm256_setzero_pd(), sxy = _mm256_setzero_pd(),
            syy = _mm256_setzero_pd();
    __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py);
    __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0);
    for (; i + 4 <= n; i += 4) {
      __m256d ax = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs + i));
      __m256d ay = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys + i));
      __m256d r2 = _mm256_fmadd_pd(ay, ay, _mm256_mul_pd(ax, ax));
      __m256d inv4 = _mm256_div_pd(one, _mm256_mul_pd(r2, r2));
      __m256d w4 = _mm256_mul_pd(_mm256_loadu_pd(ws + i), inv4);
      sxx = _mm256_fmadd_pd(
          w4, _mm256_sub_pd(r2, _mm256_mul_pd(two, _mm256_mul_pd(ax, ax))),
          sxx);
      syy = _mm256_fmadd_pd(
          w4, _mm256_sub_pd(r2, _mm256_mul_pd(two, _mm256_mul_pd(ay, ay))),
          syy);
      sxy = _mm256_fnmadd_pd(w4, _mm256_mul_pd(two, _mm256_mul_pd(ax, ay)),
                             sxy);
    }
    double hxx = hsum(sxx), hyy = hsum(syy), hxy = hsum(sxy);
    for (; i < n; ++i) {
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
  __m256d sxx = _mm256_setzero_pd(), syy = _mm256_setzero_pd(),
          szz = _mm256_setzero_pd();
  __m256d sxy = _mm256_setzero_pd(), sxz = _mm256_setzero_pd(),
          syz = _mm256_setzero_pd();
  __m256d vpx = _mm256_set1_pd(px), vpy = _mm256_set1_pd(py),
          vpz = _mm256_set1_pd(pz);
  __m256d one = _mm256_set1_pd(1.0), three = _mm256_set1_pd(3.0);
  for (; i + 4 <= n; i += 4) {
    __m256d ax = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs + i));
    __m256d ay = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys + i));
    __m256d az = _mm256_sub_pd(vpz, _mm256_loadu_pd(zs + i));
    __m256d r2 = _mm256_fmadd_pd(
        az, az, _mm256_fmadd_pd(ay, ay, _mm256_mul_pd(ax, ax)));
    __m256d r = _mm256_sqrt_pd(r2);
    __m256d inv5 =
        _mm256_div_pd(one, _mm256_mul_pd(_mm256_mul_pd(r2, r2), r));
    __m256d w5 = _mm256_mul_pd(_mm256_loadu_pd(ws + i), inv5);
    sxx = _mm256_fmadd_pd(
        w5, _mm256_sub_pd(_mm256_mul_pd(three, _mm256_mul_pd(ax, ax)), r2),
        sxx);
    syy = _mm256_fmadd_pd(
        w5, _mm256_sub_pd(_mm256_mul_pd(three, _mm256_mul_pd(ay, ay)), r2),
        syy);
    szz = _mm256_fmadd_pd(
        w5, _mm256_sub_pd(_mm256_mul_pd(three, _mm256_mul_pd(az, az)), r2),
        szz);
    sxy = _mm256_fmadd_pd(w5, _mm256_mul_pd(three, _mm256_mul_pd(ax, ay)),
                          sxy);
    sxz = _mm256_fmadd_pd(w5, _mm256_mul_pd(three, _mm256_mul_pd(ax, az)),
                          sxz);
    syz = _mm256_fmadd_pd(w5, _mm256_mul_pd(three, _mm256_mul_pd(ay, az)),
                          syz);
  }
  double hxx = hsum(sxx), hyy = hsum(syy), hzz = hsum(szz);
  double hxy = hsum(sxy), hxz = hsum(sxz), hyz = hsum(syz);
  for (; i < n; ++i) {
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

}  // namespace qg::kernels::avx2

#endif  // QG_HAVE_AVX2_TU
