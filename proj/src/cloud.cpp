#include "qg/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "qg/kernels.hpp"
#include "qg/util.hpp"

namespace qg {

GridIndex::GridIndex(const double* xs, const double* ys, const double* zs,
                     std::size_t n, int dim, double cell)
    : xs_(xs), ys_(ys), zs_(zs), n_(n), dim_(dim), cell_(cell) {
  cells_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto ix = static_cast<std::int64_t>(std::floor(xs[i] / cell_));
    auto iy = static_cast<std::int64_t>(std::floor(ys[i] / cell_));
    auto iz = dim_ == 3 ? static_cast<std::int64_t>(std::floor(zs[i] / cell_))
                        : 0;
    cells_[key(ix, iy, iz)].push_back(static_cast<std::uint32_t>(i));
  }
}

std::int64_t GridIndex::key(std::int64_t ix, std::int64_t iy,
                            std::int64_t iz) const {
  // 21 bits per axis, offset to stay positive
  const std::int64_t off = 1 << 20;
  return ((ix + off) << 42) | ((iy + off) << 21) | (iz + off);
}

void GridIndex::for_each_in_ball(
    const Point& c, double r,
    const std::function<void(std::uint32_t)>& fn) const {
  auto lo = [&](double v) {
    return static_cast<std::int64_t>(std::floor((v - r) / cell_));
  };
  auto hi = [&](double v) {
    return static_cast<std::int64_t>(std::floor((v + r) / cell_));
  };
  double r2 = r * r;
  std::int64_t z0 = dim_ == 3 ? lo(c.z) : 0, z1 = dim_ == 3 ? hi(c.z) : 0;
  for (std::int64_t ix = lo(c.x); ix <= hi(c.x); ++ix)
    for (std::int64_t iy = lo(c.y); iy <= hi(c.y); ++iy)
      for (std::int64_t iz = z0; iz <= z1; ++iz) {
        auto it = cells_.find(key(ix, iy, iz));
        if (it == cells_.end()) continue;
        for (std::uint32_t i : it->second) {
          double ax = xs_[i] - c.x, ay = ys_[i] - c.y, az = zs_[i] - c.z;
          if (ax * ax + ay * ay + az * az < r2) fn(i);
        }
      }
}

std::vector<std::uint32_t> GridIndex::in_ball(const Point& c, double r) const {
  std::vector<std::uint32_t> out;
  for_each_in_ball(c, r, [&](std::uint32_t i) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::uint32_t, double> GridIndex::nearest(const Point& q) const {
  double r = cell_;
  while (true) {
    std::uint32_t best = 0;
    double best2 = std::numeric_limits<double>::infinity();
    for_each_in_ball(q, r, [&](std::uint32_t i) {
      double ax = xs_[i] - q.x, ay = ys_[i] - q.y, az = zs_[i] - q.z;
      double d2 = ax * ax + ay * ay + az * az;
      if (d2 < best2 || (d2 == best2 && i < best)) {
        best2 = d2;
        best = i;
      }
    });
    // a hit is only conclusive once the search radius exceeds it
    if (best2 <= r * r) return {best, std::sqrt(best2)};
    if (std::isfinite(best2)) {
      r = std::sqrt(best2) * (1 + 1e-12);
    } else {
      r *= 2;
    }
  }
}

double SampledBoundary::total_weight() const {
  double s = 0;
  for (double w : ws) s += w;
  return s;
}

void SampledBoundary::build_index() {
  double lox = xs[0], hix = xs[0], loy = ys[0], hiy = ys[0], loz = zs[0],
         hiz = zs[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lox = std::min(lox, xs[i]);
    hix = std::max(hix, xs[i]);
    loy = std::min(loy, ys[i]);
    hiy = std::max(hiy, ys[i]);
    loz = std::min(loz, zs[i]);
    hiz = std::max(hiz, zs[i]);
  }
  double dx = hix - lox, dy = hiy - loy, dz = hiz - loz;
  diam = std::sqrt(dx * dx + dy * dy + dz * dz);
  double cell = std::max(2 * h, diam / 512);
  index = GridIndex(xs.data(), ys.data(), zs.data(), xs.size(), dim, cell);
}

double SampledBoundary::sample_distance(const Point& q) const {
  return index.nearest(q).second;
}

void save_cloud(const SampledBoundary& S, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "dim=" << S.dim << " h=" << format_double(S.h) << "\n";
  for (std::size_t i = 0; i < S.size(); ++i) {
    out << format_double(S.xs[i]) << ' ' << format_double(S.ys[i]);
    if (S.dim == 3) out << ' ' << format_double(S.zs[i]);
    out << ' ' << format_double(S.ws[i]) << "\n";
  }
}

SampledBoundary load_cloud(const std::string& path, int expect_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  SampledBoundary S;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 2 || tok[0].rfind("dim=", 0) != 0 ||
          tok[1].rfind("h=", 0) != 0)
        throw CloudParseError(lineno, "expected header 'dim=<d> h=<h>'");
      S.dim = std::stoi(tok[0].substr(4));
      if (S.dim != 2 && S.dim != 3)
        throw CloudParseError(lineno, "dim must be 2 or 3");
      bool ok = false;
      S.h = parse_double(tok[1].substr(2), &ok);
      if (!ok || !(S.h > 0)) throw CloudParseError(lineno, "bad h");
      if (expect_dim != 0 && S.dim != expect_dim)
        throw CloudParseError(lineno, "dimension mismatch: cloud is " +
                                          std::to_string(S.dim) + "-d");
      have_header = true;
      continue;
    }
    std::size_t need = S.dim + 1;
    if (tok.size() != need)
      throw CloudParseError(lineno, "expected " + std::to_string(need) +
                                        " fields, got " +
                                        std::to_string(tok.size()));
    double vals[4];
    for (std::size_t i = 0; i < need; ++i) {
      bool ok = false;
      vals[i] = parse_double(tok[i], &ok);
      if (!ok || !std::isfinite(vals[i]))
        throw CloudParseError(lineno, "malformed number '" + tok[i] + "'");
    }
    double w = vals[need - 1];
    if (!(w > 0)) throw CloudParseError(lineno, "nonpositive weight");
    S.xs.push_back(vals[0]);
    S.ys.push_back(vals[1]);
    S.zs.push_back(S.dim == 3 ? vals[2] : 0.0);
    S.ws.push_back(w);
  }
  if (!have_header) throw CloudParseError(lineno, "missing header");
  if (S.size() == 0) throw CloudParseError(lineno, "empty cloud");
  S.build_index();
  return S;
}

}  // namespace qg
