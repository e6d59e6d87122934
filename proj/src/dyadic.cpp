#include "qg/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "qg/util.hpp"

namespace qg {

namespace {

// Incremental separated-net helper: hash grid with cell = separation.
class NetHash {
 public:
  NetHash(const SampledBoundary& S, double sep) : S_(&S), sep_(sep) {}

  bool far_from_all(std::uint32_t i) const {
    Point p = S_->point(i);
    auto cx = cell(p.x), cy = cell(p.y), cz = S_->dim == 3 ? cell(p.z) : 0;
    for (std::int64_t ix = cx - 1; ix <= cx + 1; ++ix)
      for (std::int64_t iy = cy - 1; iy <= cy + 1; ++iy)
        for (std::int64_t iz = cz - 1; iz <= cz + 1; ++iz) {
          auto it = cells_.find(key(ix, iy, iz));
          if (it == cells_.end()) continue;
          for (std::uint32_t j : it->second)
            if (dist(S_->point(j), p) < sep_) return false;
        }
    return true;
  }

  void insert(std::uint32_t i) {
    Point p = S_->point(i);
    cells_[key(cell(p.x), cell(p.y), S_->dim == 3 ? cell(p.z) : 0)].push_back(i);
  }

 private:
  std::int64_t cell(double v) const {
    return static_cast<std::int64_t>(std::floor(v / sep_));
  }
  static std::int64_t key(std::int64_t ix, std::int64_t iy, std::int64_t iz) {
    const std::int64_t off = 1 << 20;
    return ((ix + off) << 42) | ((iy + off) << 21) | (iz + off);
  }
  const SampledBoundary* S_;
  double sep_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

bool lex_less(const Point& a, const Point& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

double exact_diam(const SampledBoundary& S,
                  const std::vector<std::uint32_t>& members) {
  if (members.size() <= 256) {
    double best = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        best = std::max(best, dist(S.point(members[i]), S.point(members[j])));
    return best;
  }
  // large cubes: bounding-box diagonal (upper bound, reporting only)
  double lox = S.xs[members[0]], hix = lox, loy = S.ys[members[0]], hiy = loy;
  double loz = S.zs[members[0]], hiz = loz;
  for (auto i : members) {
    lox = std::min(lox, S.xs[i]);
    hix = std::max(hix, S.xs[i]);
    loy = std::min(loy, S.ys[i]);
    hiy = std::max(hiy, S.ys[i]);
    loz = std::min(loz, S.zs[i]);
    hiz = std::max(hiz, S.zs[i]);
  }
  double dx = hix - lox, dy = hiy - loy, dz = hiz - loz;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

DyadicGrid build_grid(const SampledBoundary& S, int k_min, int k_max) {
  if (k_min > k_max) throw PreconditionError("build_grid: k_min > k_max");
  double ell_fine = std::ldexp(1.0, -k_max);
  double ell_coarse = std::ldexp(1.0, -k_min);
  if (ell_fine < 10 * S.h)
    throw PreconditionError("build_grid: 2^-k_max below the trusted scale 10h");
  if (ell_coarse > S.diam * (1 + 1e-9))
    throw PreconditionError("build_grid: 2^-k_min exceeds the cloud diameter");

  const std::size_t n = S.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (S.ws[a] != S.ws[b]) return S.ws[a] > S.ws[b];
    if (lex_less(S.point(a), S.point(b))) return true;
    if (lex_less(S.point(b), S.point(a))) return false;
    return a < b;
  });

  DyadicGrid G;
  G.k_min = k_min;
  G.k_max = k_max;
  G.generations.resize(k_max - k_min + 1);
  G.sample_cube.assign(k_max - k_min + 1, std::vector<int>(n, -1));

  std::vector<std::uint32_t> prev_net;  // center sample indices, id order
  for (int g = 0; g <= k_max - k_min; ++g) {
    int k = k_min + g;
    double ell = std::ldexp(1.0, -k);

    // net: coarser centers survive (they are 2^-(k-1)-separated), then greedy
    NetHash hash(S, ell);
    std::vector<std::uint32_t> net;
    for (std::uint32_t c : prev_net) {
      net.push_back(c);
      hash.insert(c);
    }
    for (std::uint32_t i : order) {
      if (!hash.far_from_all(i)) continue;
      if (g > 0) {
        // only accept net points sitting ell/4 deep inside their parent:
        // inner-ball margins then survive the hierarchy instead of
        // collapsing to sample spacing next to a coarser cube boundary.
        int pid = G.sample_cube[g - 1][i];
        Point p = S.point(i);
        bool deep = true;
        S.index.for_each_in_ball(p, ell / 4, [&](std::uint32_t j) {
          if (deep && G.sample_cube[g - 1][j] != pid &&
              dist(S.point(j), p) < ell / 4)
            deep = false;
        });
        if (!deep) continue;
      }
      net.push_back(i);
      hash.insert(i);
    }

    // cube ids in net order
    std::vector<int> ids(net.size());
    std::unordered_map<std::uint32_t, int> center_to_id;
    for (std::size_t c = 0; c < net.size(); ++c) {
      DyadicCube Q;
      Q.k = k;
      Q.id = static_cast<int>(G.cubes.size());
      Q.center = net[c];
      ids[c] = Q.id;
      center_to_id[net[c]] = Q.id;
      G.cubes.push_back(std::move(Q));
      G.generations[g].push_back(ids[c]);
    }

    auto assign = [&](std::uint32_t sample, const std::vector<int>& cand_ids) {
      Point p = S.point(sample);
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int cid : cand_ids) {
        double d = dist(S.point(G.cubes[cid].center), p);
        if (d < bd || (d == bd && cid < best)) {
          bd = d;
          best = cid;
        }
      }
      G.sample_cube[g][sample] = best;
      G.cubes[best].members.push_back(sample);
    };

    if (g == 0) {
      for (std::uint32_t i = 0; i < n; ++i) assign(i, ids);
    } else {
      // recurse within each parent's members
      for (int pid : G.generations[g - 1]) {
        auto& P = G.cubes[pid];
        std::vector<int> cands;
        for (std::uint32_t m : P.members) {
          auto it = center_to_id.find(m);
          if (it != center_to_id.end()) cands.push_back(it->second);
        }
        std::sort(cands.begin(), cands.end());
        for (std::uint32_t m : P.members) assign(m, cands);
        for (int cid : cands) {
          G.cubes[cid].parent = pid;
          P.children.push_back(cid);
        }
      }
    }

    for (int cid : G.generations[g]) {
      auto& Q = G.cubes[cid];
      std::sort(Q.members.begin(), Q.members.end());
      double s = 0;
      for (std::uint32_t m : Q.members) s += S.ws[m];
      Q.sigma = s;
    }

    // per-cube safe radius: distance from x_Q to the nearest non-member
    // sample, capped at 2*ell; r_Q = safe/2 makes Delta(x_Q, 2 r_Q) a subset
    // of the members by construction.  a0 reports the worst margin/ell.
    double a0 = 2.0;
    for (int cid : G.generations[g]) {
      auto& Q = G.cubes[cid];
      Point c = S.point(Q.center);
      double safe = 2 * ell;
      double rad = ell / 2;
      while (rad <= 4 * S.diam) {
        double best = std::numeric_limits<double>::infinity();
        S.index.for_each_in_ball(c, rad, [&](std::uint32_t i) {
          if (G.sample_cube[g][i] != cid)
            best = std::min(best, dist(S.point(i), c));
        });
        if (best <= rad) {
          safe = std::min(safe, best);
          break;
        }
        rad *= 2;
      }
      Q.r_Q = safe / 2;
      a0 = std::min(a0, safe / ell);
    }
    G.a0_per_gen.push_back(a0);

    prev_net = net;
  }
  return G;
}

Ball cube_window(const SampledBoundary& S, const DyadicCube& Q, double A) {
  return {S.point(Q.center), A * Q.ell()};
}

GridReport verify_grid(const DyadicGrid& G, const SampledBoundary& S) {
  GridReport R;
  const std::size_t n = S.size();

  // (i) each generation partitions the sample set
  R.partition_ok = true;
  for (std::size_t g = 0; g < G.generations.size(); ++g) {
    std::vector<char> seen(n, 0);
    std::size_t total = 0;
    for (int cid : G.generations[g]) {
      for (std::uint32_t m : G.cubes[cid].members) {
        if (seen[m]) R.partition_ok = false;
        seen[m] = 1;
        ++total;
      }
      if (G.cubes[cid].members.empty()) R.partition_ok = false;
    }
    if (total != n) R.partition_ok = false;
  }

  // (ii)/(iii) nesting and unique ancestor
  R.nesting_ok = true;
  R.unique_ancestor_ok = true;
  for (const auto& Q : G.cubes) {
    if (!Q.children.empty()) {
      std::vector<std::uint32_t> merged;
      for (int c : Q.children) {
        const auto& M = G.cubes[c].members;
        merged.insert(merged.end(), M.begin(), M.end());
        if (G.cubes[c].parent != Q.id) R.unique_ancestor_ok = false;
      }
      std::sort(merged.begin(), merged.end());
      if (merged != Q.members) R.nesting_ok = false;
    }
    if (Q.k > G.k_min && Q.parent < 0) R.unique_ancestor_ok = false;
  }

  // (iv) diameter constant
  R.C1 = 0;
  for (const auto& Q : G.cubes)
    R.C1 = std::max(R.C1, exact_diam(S, Q.members) / Q.ell());

  // (v) surface-ball constant
  R.a0 = 2.0;
  for (double a : G.a0_per_gen) R.a0 = std::min(R.a0, a);

  // (vi) thin-boundary statistic over tau in {a0/2, a0/4, a0/8}
  for (int j = 1; j <= 3; ++j) R.thin_tau.push_back(R.a0 / std::ldexp(1.0, j));
  for (double tau : R.thin_tau) {
    double frac_sum = 0;
    std::size_t cubes = 0;
    for (std::size_t g = 0; g < G.generations.size(); ++g) {
      for (int cid : G.generations[g]) {
        const auto& Q = G.cubes[cid];
        double ell = Q.ell();
        double near_w = 0;
        for (std::uint32_t m : Q.members) {
          Point p = S.point(m);
          double best = std::numeric_limits<double>::infinity();
          S.index.for_each_in_ball(p, tau * ell, [&](std::uint32_t i) {
            if (G.sample_cube[g][i] != cid)
              best = std::min(best, dist(S.point(i), p));
          });
          if (best <= tau * ell) near_w += S.ws[m];
        }
        frac_sum += near_w / Q.sigma;
        ++cubes;
      }
    }
    R.thin_fraction.push_back(cubes ? frac_sum / cubes : 0.0);
  }
  // least-squares exponent of fraction ~ tau^eta
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < R.thin_tau.size(); ++i) {
      if (R.thin_fraction[i] <= 0) continue;
      double lx = std::log(R.thin_tau[i]), ly = std::log(R.thin_fraction[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    R.thin_eta = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  }
  return R;
}

std::string export_grid(const DyadicGrid& G, const SampledBoundary& S) {
  std::ostringstream os;
  for (const auto& Q : G.cubes) {
    os << Q.k << ' ' << Q.id << ' ' << Q.parent;
    Point c = S.point(Q.center);
    os << ' ' << format_double(c.x) << ' ' << format_double(c.y);
    if (S.dim == 3) os << ' ' << format_double(c.z);
    os << ' ' << format_double(Q.sigma) << ' ' << Q.members.size() << "\n";
  }
  return os.str();
}

}  // namespace qg
