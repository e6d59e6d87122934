#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qg/cloud.hpp"

namespace qg {

struct DyadicCube {
  int k = 0;                 // generation; ell = 2^-k
  int id = -1;               // global cube id, build order
  int parent = -1;           // -1 at the top generation
  std::vector<int> children;
  std::uint32_t center = 0;  // sample index of x_Q
  double r_Q = 0;            // Delta(x_Q, 2 r_Q) subset of members, by construction
  double sigma = 0;          // sum of member weights
  std::vector<std::uint32_t> members;  // ascending sample indices

  double ell() const { return std::ldexp(1.0, -k); }
};

struct DyadicGrid {
  int k_min = 0, k_max = 0;
  std::vector<DyadicCube> cubes;                 // indexed by id
  std::vector<std::vector<int>> generations;     // per k - k_min: cube ids
  std::vector<std::vector<int>> sample_cube;     // per generation: sample -> id
  std::vector<double> a0_per_gen;                // measured per-generation a0

  const DyadicCube& cube(int id) const { return cubes[id]; }
  int n_generations() const { return k_max - k_min + 1; }
};

struct GridReport {
  bool partition_ok = false;       // (i)
  bool nesting_ok = false;         // (ii)
  bool unique_ancestor_ok = false; // (iii)
  double C1 = 0;                   // (iv) measured sup diam(Q)/ell(Q)
  double a0 = 0;                   // (v) measured inf safe-radius/ell(Q)
  std::vector<double> thin_tau;       // (vi) tested tau values
  std::vector<double> thin_fraction;  // mean weight fraction within tau*ell of E\Q
  double thin_eta = 0;                // fitted exponent
};

// Christ-style nested nets over the sampled boundary.  Deterministic:
// candidate order is descending weight, then lexicographic coordinates.
DyadicGrid build_grid(const SampledBoundary& S, int k_min, int k_max);

GridReport verify_grid(const DyadicGrid& G, const SampledBoundary& S);

Ball cube_window(const SampledBoundary& S, const DyadicCube& Q, double A);

// One line per cube: `k id parent x_Q sigma n_members`.
std::string export_grid(const DyadicGrid& G, const SampledBoundary& S);

}  // namespace qg
