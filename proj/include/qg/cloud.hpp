#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qg/geom.hpp"

namespace qg {

// Uniform hash grid over a point set; cells keyed by integer coordinates.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const double* xs, const double* ys, const double* zs,
            std::size_t n, int dim, double cell);

  double cell_size() const { return cell_; }
  std::size_t size() const { return n_; }

  // Visit indices of stored points within distance < r of c (plus some grid
  // slack; callers re-check exact distances when they need strictness).
  void for_each_in_ball(const Point& c, double r,
                        const std::function<void(std::uint32_t)>& fn) const;

  std::vector<std::uint32_t> in_ball(const Point& c, double r) const;

  // Index of the nearest stored point and its distance; n must be > 0.
  std::pair<std::uint32_t, double> nearest(const Point& q) const;

 private:
  std::int64_t key(std::int64_t ix, std::int64_t iy, std::int64_t iz) const;

  const double* xs_ = nullptr;
  const double* ys_ = nullptr;
  const double* zs_ = nullptr;
  std::size_t n_ = 0;
  int dim_ = 2;
  double cell_ = 1;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

// Weighted point cloud approximating (boundary, surface measure) at
// resolution h, stored SoA for the SIMD kernels.
struct SampledBoundary {
  int dim = 2;
  double h = 0;
  double diam = 0;
  std::vector<double> xs, ys, zs, ws;
  GridIndex index;

  std::size_t size() const { return xs.size(); }
  Point point(std::size_t i) const { return {xs[i], ys[i], zs[i], dim}; }
  double total_weight() const;

  void build_index();

  // Distance to the nearest sample (exact over the stored cloud).
  double sample_distance(const Point& q) const;
};

struct CloudParseError : std::runtime_error {
  int line;
  CloudParseError(int l, const std::string& what)
      : std::runtime_error("line " + std::to_string(l) + ": " + what),
        line(l) {}
};

void save_cloud(const SampledBoundary& S, const std::string& path);
SampledBoundary load_cloud(const std::string& path, int expect_dim = 0);

}  // namespace qg
