#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qg/cloud.hpp"
#include "qg/dyadic.hpp"
#include "qg/geom.hpp"

namespace qg {

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One bilateral beta evaluation: value is a certified upper bound for
// bbeta(x, r) (best plane over the candidate family), lower_bound a certified
// lower bound for the infimum over all planes.
struct BetaRecord {
  Point x;
  double r = 0;
  double value = 0;          // term_E_to_P + term_P_to_E, best candidate
  Hyperplane plane;          // achieving plane
  double term_E_to_P = 0;
  double term_P_to_E = 0;
  double lower_bound = 0;
  double covering_error = 0;  // net covering slack used for lower_bound
};

struct BetaOptions {
  // Direction-net resolution: eps/8 when a decision threshold is known,
  // else 1 degree.
  double eps_hint = 0;
  double theta_override = 0;
  unsigned threads = 1;
};

double beta_theta(const BetaOptions& opt);

BetaRecord bbeta(const SampledBoundary& S, const Point& x, double r,
                 const BetaOptions& opt = {});

// Cheap certified lower bound for bbeta(x, r) from a coarse direction net
// (the one-sided width term only).  Never exceeds the true infimum.
double bbeta_quick_lower_bound(const SampledBoundary& S, const Point& x,
                               double r, int n_dirs = 64);

enum class CubeBetaStatus : std::uint8_t { Clean = 0, Flagged = 1, Untested = 2 };

struct BadSet {
  double eps = 0;
  double A = 2;
  std::vector<CubeBetaStatus> status;  // per cube id
  std::vector<double> value;           // computed upper bound, NaN if untested
};

BadSet bad_set(const DyadicGrid& G, const SampledBoundary& S, double eps,
               double A = 2, unsigned threads = 1);

struct CarlesonReport {
  double eps = 0;
  double A = 2;
  std::vector<double> ratio;   // per cube id: ln2 * sum of flagged descendant
                               // sigma / sigma(Q)
  double norm = 0;             // sup over the coarsest tested generation
  std::map<int, int> bad_per_generation;
};

CarlesonReport carleson_norm(const DyadicGrid& G, const BadSet& flags);

struct LowBetaWindow {
  Point x1;
  double r1 = 0;
  BetaRecord record;
};

// The rho-scan: largest dyadic s <= r/4 (down to 10h) admitting a flat window
// B(y, s) inside B(x, r) centered in Delta(x, r/2).  A scale is rejected only
// when every candidate window is certifiably non-flat (lower bound >= eps);
// the flattest candidate at the first surviving scale is returned.
std::optional<LowBetaWindow> low_beta_window(const SampledBoundary& S,
                                             const Point& x, double r,
                                             double eps,
                                             const BetaOptions& opt = {});

// CSV: `k,ell,x...,bbeta_value,flagged` per cube.
std::string beta_csv(const DyadicGrid& G, const SampledBoundary& S,
                     const BadSet& flags);

}  // namespace qg
