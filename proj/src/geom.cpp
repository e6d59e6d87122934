#include "qg/geom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace qg {

Ball inscribed_halfball(const Ball& B, const Point& v, double eps) {
  if (eps < 0 || eps >= 1)
    throw PreconditionError("inscribed_halfball: eps outside [0,1) gives an empty region");
  double r = B.radius;
  Point c = B.center + v * (r * (1 + eps) / 2);
  return {c, r * (1 - eps) / 2};
}

namespace {

// Lexicographically smallest unit vector of span{V} whose first nonzero
// coordinate is positive: eliminate leading coordinates until one direction
// remains.
Point canonical_in_span(std::vector<Eigen::Vector3d> V, int dim) {
  const double tol = 1e-12;
  for (int j = 0; j < dim && V.size() > 1; ++j) {
    std::size_t piv = 0;
    for (std::size_t i = 1; i < V.size(); ++i)
      if (std::abs(V[i][j]) > std::abs(V[piv][j])) piv = i;
    if (std::abs(V[piv][j]) < tol) continue;
    for (std::size_t i = 0; i < V.size(); ++i) {
      if (i == piv) continue;
      V[i] -= (V[i][j] / V[piv][j]) * V[piv];
    }
    V.erase(V.begin() + piv);
  }
  Eigen::Vector3d w = V.front().normalized();
  for (int j = 0; j < dim; ++j) {
    if (std::abs(w[j]) < tol) continue;
    if (w[j] < 0) w = -w;
    break;
  }
  Point p{w[0], w[1], w[2], dim};
  return p;
}

}  // namespace

Hyperplane fit_plane_soa(const double* xs, const double* ys, const double* zs,
                         const double* ws, std::size_t n, int dim) {
  if (n < static_cast<std::size_t>(dim))
    throw PreconditionError("fit_plane: need at least d points");
  double wsum = 0, cx = 0, cy = 0, cz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += ws[i];
    cx += ws[i] * xs[i];
    cy += ws[i] * ys[i];
    cz += ws[i] * (zs ? zs[i] : 0.0);
  }
  if (!(wsum > 0)) throw PreconditionError("fit_plane: total weight must be positive");
  cx /= wsum;
  cy /= wsum;
  cz /= wsum;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    double ax = xs[i] - cx, ay = ys[i] - cy, az = (zs ? zs[i] : 0.0) - cz;
    double w = ws[i];
    cov(0, 0) += w * ax * ax;
    cov(0, 1) += w * ax * ay;
    cov(0, 2) += w * ax * az;
    cov(1, 1) += w * ay * ay;
    cov(1, 2) += w * ay * az;
    cov(2, 2) += w * az * az;
  }
  cov(1, 0) = cov(0, 1);
  cov(2, 0) = cov(0, 2);
  cov(2, 1) = cov(1, 2);
  if (dim == 2) {
    // keep 2-d problems exactly planar
    cov(0, 2) = cov(1, 2) = cov(2, 0) = cov(2, 1) = 0;
    cov(2, 2) = 0;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  Eigen::Vector3d evals = es.eigenvalues();  // ascending
  Eigen::Matrix3d evecs = es.eigenvectors();

  // For dim == 2 the z axis is an artificial zero mode; drop it.
  std::vector<int> live;
  for (int i = 0; i < 3; ++i) {
    if (dim == 2 && std::abs(evecs.col(i)[2]) > 0.5) continue;
    live.push_back(i);
  }

  double lmax = 0;
  for (int i : live) lmax = std::max(lmax, evals[i]);
  const double rel = 1e-9;
  int rank = 0;
  for (int i : live)
    if (evals[i] > rel * lmax && lmax > 0) ++rank;
  if (rank < dim - 1) throw DegenerateFitError(rank);

  double lmin = evals[live.front()];
  for (int i : live) lmin = std::min(lmin, evals[i]);
  std::vector<Eigen::Vector3d> tied;
  for (int i : live)
    if (evals[i] <= lmin + rel * (lmax + 1e-300)) tied.push_back(evecs.col(i));

  Hyperplane P;
  P.base = Point{cx, cy, cz, dim};
  P.normal = tied.size() == 1 ? canonical_in_span({tied[0]}, dim)
                              : canonical_in_span(tied, dim);
  return P;
}

Hyperplane fit_plane(const std::vector<Point>& points,
                     const std::vector<double>& weights) {
  if (points.empty()) throw PreconditionError("fit_plane: empty point set");
  std::vector<double> xs(points.size()), ys(points.size()), zs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
    zs[i] = points[i].z;
  }
  return fit_plane_soa(xs.data(), ys.data(), zs.data(), weights.data(),
                       points.size(), points.front().dim);
}

}  // namespace qg
