// End-to-end acceptance gate: one line per criterion, nonzero exit on any
// failure.  Every quantitative claim is checked against an independent
// test-side oracle (exhaustive sweeps, closed forms, or brute-force lattices),
// never against the implementation's own internals.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qg/access.hpp"
#include "qg/cloud.hpp"
#include "qg/domain.hpp"
#include "qg/dyadic.hpp"
#include "qg/engine.hpp"
#include "qg/flatness.hpp"
#include "qg/geom.hpp"
#include "qg/kernels.hpp"
#include "qg/util.hpp"

namespace {

using qg::make_point;
using qg::Point;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = 0.6931471805599453;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAIL[" << what << "]";
    }
  }
};

// Independent bilateral-beta evaluation over an explicit direction/offset
// family, with dense plane sampling and brute-force nearest queries.
double exhaustive_bbeta(const qg::SampledBoundary& S, const Point& x, double r,
                        int n_dirs, int n_offsets) {
  std::vector<Point> E;
  for (std::size_t i = 0; i < S.size(); ++i)
    if (qg::dist(S.point(i), x) < r) E.push_back(S.point(i));
  double best = std::numeric_limits<double>::infinity();
  for (int di = 0; di < n_dirs; ++di) {
    double a = kPi * di / n_dirs;
    Point n = make_point(std::cos(a), std::sin(a));
    Point tau = make_point(-n.y, n.x);
    for (int oi = 1; oi < n_offsets; ++oi) {
      double t = -r + 2.0 * r * oi / n_offsets;
      double term1 = 0;
      for (const Point& p : E)
        term1 = std::max(term1, std::abs(qg::dot(p - x, n) - t));
      term1 /= r;
      if (term1 >= best) continue;
      double L2 = r * r - t * t;
      if (L2 <= 0) continue;
      double L = std::sqrt(L2);
      Point c = x + n * t;
      double sup = 0;
      int m = std::max(2, static_cast<int>(std::ceil(2 * L / (S.h / 2))));
      bool aborted = false;
      for (int i = 0; i < m; ++i) {
        Point q = c + tau * (-L + (i + 0.5) * (2 * L / m));
        double d = std::numeric_limits<double>::infinity();
        for (const Point& p : E) d = std::min(d, qg::dist(p, q));
        sup = std::max(sup, d);
        if (term1 + (sup + S.h) / r >= best) {
          aborted = true;
          break;
        }
      }
      if (!aborted) best = std::min(best, term1 + (sup + S.h) / r);
    }
  }
  return best;
}

// Brute-force maximin corkscrew constant over a fine lattice.
double lattice_oracle(const qg::DomainOracle& O, const Point& x, double r,
                      bool exterior, double step) {
  int m = static_cast<int>(std::floor(r / step));
  double best = 0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      Point p = make_point(x.x + i * step, x.y + j * step);
      bool out = O.side(p) == qg::Side::Outside;
      if (out != exterior) continue;
      double f = std::min(O.boundary_distance(p), r - qg::dist(p, x));
      best = std::max(best, f);
    }
  return best / r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- criterion 1: dyadic grid verification and constant stability ----------

Criterion criterion_grid_suite() {
  Criterion c;
  const double h0 = std::ldexp(1.0, -10);
  for (const std::string& spec : {"disk", "line", "graph:0.5", "cantor:3"}) {
    auto t0 = Clock::now();
    double C1[2], a0[2];
    for (int pass = 0; pass < 2; ++pass) {
      double h = pass == 0 ? h0 : h0 / 2;
      qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec(spec), h);
      qg::DyadicGrid G = qg::build_grid(S, 0, 6);
      qg::GridReport rep = qg::verify_grid(G, S);
      c.require(rep.partition_ok, spec + " partition");
      c.require(rep.nesting_ok, spec + " nesting");
      c.require(rep.unique_ancestor_ok, spec + " ancestors");
      C1[pass] = rep.C1;
      a0[pass] = rep.a0;
    }
    double rc = C1[1] / C1[0], ra = a0[1] / a0[0];
    c.require(rc >= 0.8 && rc <= 1.25, spec + " C1 drift " + fmt(rc));
    c.require(ra >= 0.8 && ra <= 1.25, spec + " a0 drift " + fmt(ra));
    double el = seconds_since(t0) / 2;
    c.require(el < 30, spec + " runtime " + fmt(el) + "s");
    c.detail << " " << spec << "{C1=" << fmt(C1[0]) << " a0=" << fmt(a0[0])
             << "}";
  }
  return c;
}

// --- criterion 2: beta values against the exhaustive sweep -----------------

Criterion criterion_beta_oracle() {
  Criterion c;
  auto t0 = Clock::now();
  qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec("graph:0.3"), 0.01);
  qg::Rng rng(11);
  double worst_gap = 0;
  for (int t = 0; t < 25; ++t) {
    Point x = S.point(rng.index(S.size()));
    while (std::abs(x.x) > 0.7) x = S.point(rng.index(S.size()));
    double r = rng.uniform(0.1, 0.25);
    std::size_t n_in = S.index.in_ball(x, r).size();
    c.require(n_in <= 200, "window size " + std::to_string(n_in));
    qg::BetaRecord rec = qg::bbeta(S, x, r);
    double exh = exhaustive_bbeta(S, x, r, 720, 128);
    c.require(rec.lower_bound <= exh + 1e-9, "lower bound above oracle");
    c.require(rec.value - exh <= rec.covering_error + 1e-9,
              "value beyond covering error");
    worst_gap = std::max(worst_gap, std::abs(rec.value - exh));
  }
  double el = seconds_since(t0);
  c.require(el < 60, "runtime " + fmt(el) + "s");
  c.detail << " 25 windows, worst |value-oracle|=" << fmt(worst_gap) << ", "
           << fmt(el) << "s";
  return c;
}

// --- criterion 3: non-flat Carleson norm contrast ---------------------------

Criterion criterion_bwgl_contrast() {
  Criterion c;
  std::vector<double> level, norm;
  for (int k = 2; k <= 5; ++k) {
    double h = std::pow(4.0, -k) / 10;
    std::string spec = "cantor:" + std::to_string(k);
    qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec(spec), h);
    qg::DyadicGrid G = qg::build_grid(S, 0, 2 * k);
    qg::BadSet flags = qg::bad_set(G, S, 0.1);
    double n = qg::carleson_norm(G, flags).norm;
    if (!level.empty())
      c.require(n > norm.back(), spec + " norm not increasing");
    level.push_back(k);
    norm.push_back(n);
    c.detail << " L" << k << "=" << fmt(n);
  }
  // least-squares slope, nats per fragmentation level
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < level.size(); ++i) mx += level[i], my += norm[i];
  mx /= level.size();
  my /= norm.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < level.size(); ++i) {
    sxy += (level[i] - mx) * (norm[i] - my);
    sxx += (level[i] - mx) * (level[i] - mx);
  }
  double slope = sxy / sxx;
  c.require(slope >= 1.0 && slope <= 2.0, "slope " + fmt(slope));
  c.detail << " slope=" << fmt(slope);

  // flat boundaries: the norm saturates, independent of how deep we test
  for (const std::string& spec : {"disk", "graph:0.5"}) {
    double h = std::ldexp(1.0, -7) / 10;
    qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec(spec), h);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (int k_max : {5, 6, 7}) {
      qg::DyadicGrid G = qg::build_grid(S, 0, k_max);
      qg::BadSet flags = qg::bad_set(G, S, 0.1);
      double n = qg::carleson_norm(G, flags).norm;
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    c.require(hi <= lo * 1.25, spec + " norm drift " + fmt(hi / lo));
    c.detail << " " << spec << "=" << fmt(hi);
  }
  return c;
}

// --- criterion 4: flatness route to exterior corkscrews ---------------------

Criterion criterion_flatness_route() {
  Criterion c;
  for (const std::string& spec : {"disk", "halfspace", "graph:0.5"}) {
    auto t0 = Clock::now();
    qg::Domain D = qg::make_domain(qg::parse_spec(spec));
    qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec(spec), 0.005);
    qg::Rng rng(spec.size());
    int ok = 0, total = 0;
    while (total < 50) {
      Point x = S.point(rng.index(S.size()));
      double r = rng.uniform(0.2, 0.4);
      if (spec != "disk" && std::abs(x.x) > 0.5) continue;
      ++total;
      qg::FlatnessRouteResult res = qg::exterior_corkscrew_via_flatness(
          *D.oracle, S, x, r, 0.03, 0.5, 1.5);
      if (!res.ok()) continue;
      ++ok;
      c.require(res.cert->constant() >= 1.0 / 32,
                spec + " constant " + fmt(res.cert->constant()));
      c.require(qg::validate_cert(*D.oracle, *res.cert),
                spec + " cert re-validation");
      // the direct maximin search must confirm at least as much exterior room
      auto direct = qg::exterior_corkscrew(*D.oracle, x, r, r / 100);
      c.require(direct.has_value() &&
                    direct->constant() >= res.cert->constant() * 0.95 - 0.01,
                spec + " direct search disagrees");
    }
    c.require(ok >= 48, spec + " success " + std::to_string(ok) + "/50");
    double el = seconds_since(t0);
    c.require(el < 300, spec + " runtime " + fmt(el) + "s");
    c.detail << " " << spec << "=" << ok << "/50";
  }
  return c;
}

// --- criterion 5: negatives where one hypothesis fails ----------------------

Criterion criterion_negatives() {
  Criterion c;
  qg::AnalysisConfig cfg;
  qg::ClassificationReport rep =
      qg::classify_domain(qg::parse_spec("cantor:4"), cfg);
  c.require(rep.v_uniform.status == qg::Verdict::Status::Pass,
            "interior access verdict");
  double pack = 0;
  for (auto [c0, ratio] : rep.packing)
    if (std::abs(c0 - 0.05) < 1e-12) pack = ratio;
  c.require(pack > 3, "packing ratio " + fmt(pack));
  c.detail << " packing(0.05)=" << fmt(pack);

  qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec("cantor:4"), 0.005);
  auto [ci, cd] = S.index.nearest(make_point(0.5, 0.5));
  c.require(!qg::low_beta_window(S, S.point(ci), 0.5, 0.05).has_value(),
            "flat-window scan should fail");

  qg::Domain cusp = qg::make_domain(qg::parse_spec("cusp:2"));
  double prev = std::numeric_limits<double>::infinity();
  c.detail << " cusp c:";
  for (double t : {0.2, 0.1, 0.05}) {
    auto g = qg::good_curve(*cusp.oracle, make_point(1, 0), make_point(t, 0));
    double cm = g.ok() ? g.curve->c_meas : 0.0;
    c.require(cm < prev, "cigar constant not decreasing at t=" + fmt(t));
    prev = cm;
    c.detail << " " << fmt(cm);
  }
  return c;
}

// --- criterion 6: side classification is exclusive --------------------------

Criterion criterion_side_exclusivity() {
  Criterion c;
  int total = 0, clean = 0, flagged_nonflat = 0, inconsistent = 0;
  for (const std::string& spec :
       {"disk", "halfspace", "square", "graph:0.5", "slit:1,0.5", "cusp:2"}) {
    qg::Domain D = qg::make_domain(qg::parse_spec(spec));
    qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec(spec), 0.005);
    qg::Rng rng(1 + spec.size());
    for (int t = 0; t < 120; ++t) {
      Point x = S.point(rng.index(S.size()));
      double r = rng.uniform(0.05, 0.3);
      // the exclusivity statement assumes the window carries an interior
      // corkscrew with constant c; windows without one (cusp tips) are
      // outside its hypotheses
      auto ic = qg::interior_corkscrew(*D.oracle, x, r, r / 40);
      if (!ic || ic->constant() < 0.25) continue;
      std::vector<Point> pts;
      std::vector<double> ws;
      for (std::uint32_t i : S.index.in_ball(x, r)) {
        pts.push_back(S.point(i));
        ws.push_back(S.ws[i]);
      }
      if (pts.size() < 2) continue;
      qg::Hyperplane P = qg::fit_plane(pts, ws);
      ++total;
      try {
        qg::side_classify(*D.oracle, S, x, r, P, 0.5, 1.5, 0.03);
        ++clean;
      } catch (const qg::FlatnessViolationError&) {
        ++flagged_nonflat;  // logged: the flatness hypothesis did not hold
      } catch (const qg::OracleInconsistencyError&) {
        ++inconsistent;
      }
    }
  }
  c.require(total >= 500, "only " + std::to_string(total) + " calls");
  c.require(inconsistent == 0,
            std::to_string(inconsistent) + " both-outside events");
  c.detail << " " << total << " calls, " << clean << " classified, "
           << flagged_nonflat << " flatness-flagged, 0 contradictions";
  return c;
}

// --- criterion 7: corkscrew constants against closed forms -------------------

Criterion criterion_corkscrew_convergence() {
  Criterion c;
  qg::Domain H = qg::make_domain(qg::parse_spec("halfspace"));
  auto ci = qg::interior_corkscrew(*H.oracle, make_point(0, 0), 1, 1.0 / 200);
  auto ce = qg::exterior_corkscrew(*H.oracle, make_point(0, 0), 1, 1.0 / 200);
  c.require(ci && std::abs(ci->constant() - 0.5) <= 0.025,
            "half-space interior " + fmt(ci ? ci->constant() : -1));
  c.require(ce && std::abs(ce->constant() - 0.5) <= 0.025,
            "half-space exterior " + fmt(ce ? ce->constant() : -1));

  qg::Domain D = qg::make_domain(qg::parse_spec("disk"));
  double r = 0.5;
  double ref = lattice_oracle(*D.oracle, make_point(1, 0), r, true, r / 400);
  auto cd = qg::exterior_corkscrew(*D.oracle, make_point(1, 0), r, r / 200);
  c.require(cd && std::abs(cd->constant() - ref) <= 0.05 * ref,
            "disk exterior " + fmt(cd ? cd->constant() : -1) + " vs " +
                fmt(ref));
  c.detail << " halfspace int=" << fmt(ci ? ci->constant() : -1)
           << " ext=" << fmt(ce ? ce->constant() : -1)
           << " disk ext=" << fmt(cd ? cd->constant() : -1) << " (oracle "
           << fmt(ref) << ")";
  return c;
}

// --- criterion 8: good-curve constants across separations --------------------

Criterion criterion_curve_constants() {
  Criterion c;
  qg::Domain H = qg::make_domain(qg::parse_spec("halfspace"));
  double prev_C = 0;
  for (double lambda : {2.0, 4.0, 16.0, 64.0}) {
    auto g = qg::good_curve(*H.oracle, make_point(0, 1),
                            make_point(lambda, 1), 1.0 / 64);
    c.require(g.ok(), "construction failed at lambda " + fmt(lambda));
    if (!g.ok()) continue;
    c.require(g.curve->C_meas >= prev_C * 0.98,
              "length ratio decreasing at lambda " + fmt(lambda));
    c.require(g.curve->C_meas <= 8, "length ratio " + fmt(g.curve->C_meas));
    c.require(g.curve->c_meas >= 0.03,
              "cigar constant " + fmt(g.curve->c_meas));
    if (lambda >= 16) {
      bool ladder = false;
      for (const std::string& s : g.curve->case_trace)
        if (s.rfind("ladder", 0) == 0) ladder = true;
      c.require(g.curve->case_trace.front() == "case3" && ladder,
                "expected the ladder construction at lambda " + fmt(lambda));
    }
    prev_C = std::max(prev_C, g.curve->C_meas);
    c.detail << " L" << fmt(lambda) << "{C=" << fmt(g.curve->C_meas)
             << " c=" << fmt(g.curve->c_meas) << "}";
  }
  return c;
}

// --- criterion 9: layer energy lives outside the domain ---------------------

Criterion criterion_energy_shell() {
  Criterion c;
  qg::Domain D = qg::make_domain(qg::parse_spec("disk"));
  qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec("disk"), 0.005);
  qg::Ball B{make_point(1, 0), 0.5};

  // independent lattice quadrature, split by the oracle's side call
  double e_in = 0, e_out = 0;
  double step = B.radius / 64, collar = 3 * S.h;
  int m = static_cast<int>(std::floor(B.radius / step));
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      Point p = make_point(B.center.x + i * step, B.center.y + j * step);
      if (qg::dist(p, B.center) > B.radius) continue;
      if (S.sample_distance(p) <= collar) continue;
      double e = qg::kernels::layer_hessian_frob2(
          S.xs.data(), S.ys.data(), S.zs.data(), S.ws.data(), S.size(), p.x,
          p.y, 0, 2);
      (D.oracle->side(p) == qg::Side::Inside ? e_in : e_out) += e;
    }
  double share = e_in / (e_in + e_out);
  c.require(share <= 1e-3, "interior share " + fmt(share));

  double e1 = qg::layer_energy(S, B);
  qg::SampledBoundary S2 = qg::sample_boundary(qg::parse_spec("disk"), 0.0025);
  double e2 = qg::layer_energy(S2, B);
  c.require(e2 >= 0.7 * e1 && e2 <= 1.3 * e1,
            "refinement drift " + fmt(e2 / e1));
  c.detail << " interior share=" << fmt(share) << " refine ratio="
           << fmt(e2 / e1);
  return c;
}

// --- criterion 10: deterministic reports -------------------------------------

Criterion criterion_determinism() {
  Criterion c;
  qg::AnalysisConfig cfg;
  std::string a =
      qg::report_to_json(qg::classify_domain(qg::parse_spec("disk"), cfg));
  std::string b =
      qg::report_to_json(qg::classify_domain(qg::parse_spec("disk"), cfg));
  c.require(a == b, "reports differ");
  c.detail << " two runs, " << a.size() << " bytes each, byte-identical="
           << (a == b ? "yes" : "no");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {"dyadic grid verification and constant stability", criterion_grid_suite},
      {"bilateral beta vs exhaustive sweep", criterion_beta_oracle},
      {"Carleson norm contrast, fragmented vs flat", criterion_bwgl_contrast},
      {"flatness route to exterior corkscrews", criterion_flatness_route},
      {"hypothesis-necessity negatives", criterion_negatives},
      {"side classification exclusivity", criterion_side_exclusivity},
      {"corkscrew constants vs closed forms", criterion_corkscrew_convergence},
      {"good-curve constants across separations", criterion_curve_constants},
      {"layer energy concentrates off the domain", criterion_energy_shell},
      {"byte-identical classification reports", criterion_determinism},
  };

  int failed = 0, idx = 0;
  for (const Entry& e : entries) {
    ++idx;
    Criterion c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail << " exception: " << ex.what();
    }
    if (!c.pass) ++failed;
    std::printf("[%2d] %s: %s --%s\n", idx, c.pass ? "pass" : "FAIL", e.name,
                c.detail.str().c_str());
    std::fflush(stdout);
  }
  if (failed) std::printf("ACCEPTANCE: %d criterion(s) failed\n", failed);
  else std::printf("ACCEPTANCE: all 10 criteria passed\n");
  return failed ? 1 : 0;
}
