#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qg/domain.hpp"
#include "qg/dyadic.hpp"
#include "qg/geom.hpp"

namespace qg {

// Certified corkscrew ball: B(X, radius) inside B(x, r) on the claimed side.
struct CorkscrewCert {
  enum class Kind { Interior, Exterior, C0Exterior };

  Kind kind = Kind::Interior;
  Point x;            // anchor
  double r = 0;       // scale
  Point X;            // corkscrew point
  double radius = 0;  // certified ball radius
  std::optional<Point> witness;  // z_Q for the dyadic exterior test

  double constant() const { return radius / r; }
};

// Whitney-ball chain: radii are delta(center)/2, so every ball satisfies the
// two-sided C0 = 4 distance bound by construction.
struct HarnackChain {
  Point X, Y;
  std::vector<Ball> balls;

  std::size_t length() const { return balls.size(); }
};

struct GoodCurve {
  Polyline curve;  // from X to Y
  double C_meas = 0;  // length(curve) / |X - Y|
  double c_meas = 0;  // min over dense samples of delta(Z)/dist(Z, {X, Y})
  std::vector<std::string> case_trace;
};

// A failed construction names the stage that came up empty; that failure is
// the uniform-domain violation signal, not an exception.
struct GoodCurveResult {
  std::optional<GoodCurve> curve;
  std::string failure_stage;

  bool ok() const { return curve.has_value(); }
};

// Maximin lattice search for min(delta(X), r - |X - x|) over the requested
// side, refined by 3 rounds of step-halving coordinate descent.
std::optional<CorkscrewCert> interior_corkscrew(const DomainOracle& oracle,
                                                const Point& x, double r,
                                                double step);
std::optional<CorkscrewCert> exterior_corkscrew(const DomainOracle& oracle,
                                                const Point& x, double r,
                                                double step);

// Dyadic-cube exterior access: some surface point z near x_Q must admit an
// exterior ball of radius >= c0 * ell(Q) inside B(z, r_Q/4).
std::optional<CorkscrewCert> c0_exterior_test(const DomainOracle& oracle,
                                              const SampledBoundary& S,
                                              const DyadicCube& Q, double c0,
                                              double step);

std::optional<HarnackChain> harnack_chain(const DomainOracle& oracle,
                                          const Point& X, const Point& Y,
                                          double lattice_step);

Polyline chain_to_curve(const HarnackChain& chain, const Point& X,
                        const Point& Y);

// (C_meas, c_meas) of a curve between X and Y, from >= n_per_segment samples
// per segment.
std::pair<double, double> measure_curve(const DomainOracle& oracle,
                                        const Polyline& curve, const Point& X,
                                        const Point& Y,
                                        int n_per_segment = 64);

// Scale-dispatched construction: segment when the points are deep and close,
// one Harnack chain when |X-Y| is comparable to both boundary distances, and
// otherwise corkscrew ladders over B(q, 2^i) joined by per-scale chains.
// rel_step scales every internal lattice relative to its local scale.
GoodCurveResult good_curve(const DomainOracle& oracle, const Point& X,
                           const Point& Y, double rel_step = 1.0 / 64);

// Oracle re-validation of a certificate (side, distance, containment), with
// n_samples deterministic probes inside the certified ball.
bool validate_cert(const DomainOracle& oracle, const CorkscrewCert& cert,
                   int n_samples = 1000);

// Polyline in the cloud line format plus a JSON sidecar at path + ".json".
void save_curve(const GoodCurve& g, const std::string& path);

}  // namespace qg
