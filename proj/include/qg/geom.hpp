#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qg/util.hpp"

namespace qg {

// Ambient point in R^d, d in {2, 3}.  2-d points keep z == 0 so that the
// arithmetic below is dimension-agnostic.
struct Point {
  double x = 0, y = 0, z = 0;
  int dim = 2;

  double& coord(int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double coord(int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Point make_point(double x, double y) { return {x, y, 0, 2}; }
inline Point make_point(double x, double y, double z) { return {x, y, z, 3}; }

inline Point operator+(const Point& a, const Point& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z, a.dim};
}
inline Point operator-(const Point& a, const Point& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z, a.dim};
}
inline Point operator*(const Point& a, double s) {
  return {a.x * s, a.y * s, a.z * s, a.dim};
}
inline Point operator*(double s, const Point& a) { return a * s; }
inline double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Point& a, const Point& b) { return norm(a - b); }
inline Point normalized(const Point& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n, a.dim};
}

struct Ball {
  Point center;
  double radius = 1;  // > 0
};

// Oriented hyperplane through `base` with unit `normal`.
struct Hyperplane {
  Point base;
  Point normal;
};

struct Polyline {
  std::vector<Point> vertices;

  double length() const {
    double l = 0;
    for (std::size_t i = 1; i < vertices.size(); ++i)
      l += dist(vertices[i - 1], vertices[i]);
    return l;
  }
};

struct DegenerateFitError : std::runtime_error {
  int rank;
  explicit DegenerateFitError(int r)
      : std::runtime_error("degenerate point set for plane fit, rank " +
                           std::to_string(r)),
        rank(r) {}
};

// Signed distance from y to P; |result| = dist(y, P).
inline double plane_offset(const Hyperplane& P, const Point& y) {
  return dot(y - P.base, P.normal);
}

// Largest ball inside B(x,r) cut to the half-space {(y-x).v > eps*r}.
Ball inscribed_halfball(const Ball& B, const Point& v, double eps);

// Weighted total-least-squares hyperplane: base = weighted centroid, normal
// minimizes the weighted sum of squared offsets.  Eigen-degenerate ties are
// broken toward the lexicographically smallest unit normal whose first
// nonzero coordinate is positive.
Hyperplane fit_plane(const std::vector<Point>& points,
                     const std::vector<double>& weights);

// Same fit directly from SoA arrays (avoids repacking in hot paths).
Hyperplane fit_plane_soa(const double* xs, const double* ys, const double* zs,
                         const double* ws, std::size_t n, int dim);

}  // namespace qg
