#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qg/access.hpp"
#include "qg/domain.hpp"
#include "qg/dyadic.hpp"
#include "qg/flatness.hpp"

namespace qg {

// The claimed-flat window contains a boundary point on the wrong side: the
// caller's beta precondition did not actually hold.
struct FlatnessViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The oracle contradicts itself (both probe points exterior across a window
// that the boundary passes through).
struct OracleInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Side classification across a flat window: which side of the fitted plane
// is the exterior, witnessed by probe points at height k*r/2.
struct SideClassification {
  Point x;
  double r = 0;
  Hyperplane plane;
  double c = 0, C = 0, eps = 0;
  double k = 0;  // 1/(2C+1)
  Point X_plus, X_minus;
  int exterior_sign = 0;  // +1: the +normal side is exterior
  Ball exterior_ball;     // inscribed half-ball on the exterior side
};

SideClassification side_classify(const DomainOracle& oracle,
                                 const SampledBoundary& S, const Point& x,
                                 double r, const Hyperplane& P, double c,
                                 double C, double eps);

// Flatness route to an exterior corkscrew: scan for a flat sub-window, fit,
// classify sides, inscribe.  Failure names the stage.
struct FlatnessRouteResult {
  enum class Stage { Ok, RhoScan, Classification };

  Stage failed = Stage::Ok;
  std::string detail;
  std::optional<LowBetaWindow> window;
  std::optional<SideClassification> classification;
  std::optional<CorkscrewCert> cert;  // relative to B(x, r)

  bool ok() const { return failed == Stage::Ok; }
};

FlatnessRouteResult exterior_corkscrew_via_flatness(const DomainOracle& oracle,
                                                    const SampledBoundary& S,
                                                    const Point& x, double r,
                                                    double eps, double c,
                                                    double C);

// Per-cube exterior-access failures (1 = no certified ball of radius
// c0*ell(Q) in any B(z, r_Q/4)).
std::vector<char> c0_bad_cubes(const DyadicGrid& G, const DomainOracle& oracle,
                               const SampledBoundary& S, double c0,
                               unsigned threads = 1);

double packing_ratio_from_flags(const DyadicGrid& G, const DyadicCube& Q,
                                const std::vector<char>& bad);

double packing_ratio(const DyadicGrid& G, const DomainOracle& oracle,
                     const SampledBoundary& S, const DyadicCube& Q, double c0);

// Carleson-type square-function energy of the single layer potential of the
// sampled measure, over B minus a kappa*h collar around the samples.
double layer_energy(const SampledBoundary& S, const Ball& B,
                    double kappa = 3);

struct AdrEstimate {
  double C_low = 0;
  double C_high = 0;
  int empty_windows = 0;
  int used = 0;
};

AdrEstimate adr_estimate(const SampledBoundary& S,
                         const std::vector<Ball>& windows);

struct Verdict {
  enum class Status { Pass, Fail, Untested };

  Status status = Status::Untested;
  double statistic = 0;
  std::string note;
};

struct AnalysisConfig {
  double h = 0.005;
  int n_windows = 50;
  int n_pairs = 20;
  std::vector<double> eps_grid{0.05, 0.1, 0.2};
  std::vector<double> c0_grid{0.01, 0.05};
  double rel_step = 1.0 / 64;       // good-curve lattice, relative to scale
  double corkscrew_step_div = 40;   // corkscrew lattice step = r / this
  unsigned threads = 1;
  std::uint64_t seed = 0;

  // verdict thresholds
  double thr_adr_high = 64;
  double thr_adr_low = 1.0 / 64;
  double thr_interior = 1.0 / 64;
  double thr_exterior = 1.0 / 64;
  double thr_bwgl = 3.2;    // nats, judged at eps = 0.1
  double thr_c_min = 0.02;  // cigar constant floor
  double thr_c_max = 64;    // length-ratio ceiling
};

struct ClassificationReport {
  CorpusSpec spec;
  AnalysisConfig config;
  double r_min = 0, r_max = 0;

  AdrEstimate adr;

  double interior_min = 0;
  int interior_fail = 0;
  double exterior_min = 0;
  int exterior_fail = 0;
  double exterior_fail_scale = 0;  // largest r among failed exterior windows

  int pairs_run = 0;
  int curve_fail = 0;
  double lambda_min = 0, lambda_max = 0;
  double C_max = 0;
  double c_min = 0;
  std::vector<std::string> curve_failures;

  std::vector<std::pair<double, double>> bwgl;     // (eps, norm)
  std::vector<std::pair<double, double>> packing;  // (c0, sup ratio)
  std::vector<double> energies;
  double energy_r = 0;

  std::vector<std::string> untested_notes;

  Verdict v_adr, v_ur, v_uniform, v_nta, v_chordarc;
};

ClassificationReport classify_domain(const CorpusSpec& spec,
                                     const AnalysisConfig& config);

// Fixed-field-order JSON document for the report.
std::string report_to_json(const ClassificationReport& report);

// Human-readable digest of a report JSON document.
std::string report_digest(const std::string& json_text);

}  // namespace qg
