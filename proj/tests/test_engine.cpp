#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "qg/engine.hpp"
#include "qg/util.hpp"

using qg::make_point;
using qg::Point;

TEST_CASE("side classification on the flat half-space window") {
  qg::Domain D = qg::make_domain(qg::parse_spec("halfspace"));
  qg::SampledBoundary S =
      qg::sample_boundary(qg::parse_spec("halfspace"), 0.005);
  qg::Hyperplane P{make_point(0, 0), make_point(0, 1)};

  qg::SideClassification sc =
      qg::side_classify(*D.oracle, S, make_point(0, 0), 1, P, 0.5, 2, 0.02);
  CHECK(sc.k == doctest::Approx(0.2));
  CHECK(sc.exterior_sign == -1);  // the lower half is outside
  CHECK(sc.X_minus.y == doctest::Approx(-0.1));
  CHECK(D.oracle->side(sc.X_minus) == qg::Side::Outside);
  CHECK(D.oracle->side(sc.X_plus) == qg::Side::Inside);
  CHECK(sc.exterior_ball.radius == doctest::Approx(0.49));
  CHECK(sc.exterior_ball.center.y == doctest::Approx(-0.51));

  // parameter gate: eps must stay below c*k/4
  CHECK_THROWS_AS(qg::side_classify(*D.oracle, S, make_point(0, 0), 1, P, 0.5,
                                    2, 0.2),
                  qg::PreconditionError);
}

TEST_CASE("side classification points outward on the disk") {
  qg::Domain D = qg::make_domain(qg::parse_spec("disk"));
  qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec("disk"), 0.002);
  qg::Hyperplane P{make_point(1, 0), make_point(1, 0)};
  qg::SideClassification sc =
      qg::side_classify(*D.oracle, S, make_point(1, 0), 0.05, P, 0.5, 2, 0.02);
  CHECK(sc.exterior_sign == +1);
  CHECK(D.oracle->side(sc.X_plus) == qg::Side::Outside);
}

TEST_CASE("a non-flat window surfaces as a flatness violation, never as a "
          "probe contradiction") {
  qg::Domain D = qg::make_domain(qg::parse_spec("cantor:3"));
  qg::SampledBoundary S =
      qg::sample_boundary(qg::parse_spec("cantor:3"), 0.004);
  // plane far from tangent across a window full of squares
  auto [ci, cd] = S.index.nearest(make_point(0.5, 0.5));
  qg::Hyperplane P{S.point(ci), make_point(0, 1)};
  CHECK_THROWS_AS(qg::side_classify(*D.oracle, S, S.point(ci), 0.5, P, 0.5, 2,
                                    0.02),
                  qg::FlatnessViolationError);
}

TEST_CASE("flatness route to an exterior corkscrew") {
  qg::Domain D = qg::make_domain(qg::parse_spec("halfspace"));
  qg::SampledBoundary S =
      qg::sample_boundary(qg::parse_spec("halfspace"), 0.005);
  qg::FlatnessRouteResult r = qg::exterior_corkscrew_via_flatness(
      *D.oracle, S, make_point(0, 0), 1, 0.03, 0.5, 1.5);
  REQUIRE(r.ok());
  REQUIRE(r.cert.has_value());
  CHECK(r.cert->kind == qg::CorkscrewCert::Kind::Exterior);
  CHECK(r.cert->constant() >= 0.25 * (1 - 0.03) / 2 - 1e-9);
  CHECK(qg::validate_cert(*D.oracle, *r.cert));
  CHECK(r.window->r1 == doctest::Approx(0.25));

  // precondition gate
  CHECK_THROWS_AS(qg::exterior_corkscrew_via_flatness(*D.oracle, S,
                                                      make_point(0, 0), 1, 0.2,
                                                      0.5, 1.5),
                  qg::PreconditionError);
}

TEST_CASE("flatness route fails at the scan stage on fragmented data") {
  qg::Domain D = qg::make_domain(qg::parse_spec("cantor:4"));
  qg::SampledBoundary S =
      qg::sample_boundary(qg::parse_spec("cantor:4"), 0.005);
  auto [ci, cd] = S.index.nearest(make_point(0.5, 0.5));
  qg::FlatnessRouteResult r = qg::exterior_corkscrew_via_flatness(
      *D.oracle, S, S.point(ci), 0.5, 0.03, 0.5, 1.5);
  CHECK(!r.ok());
  CHECK(r.failed == qg::FlatnessRouteResult::Stage::RhoScan);
}

TEST_CASE("packing ratios: zero on accessible boundaries, monotone in c0") {
  qg::Domain DH = qg::make_domain(qg::parse_spec("halfspace"));
  qg::SampledBoundary SH =
      qg::sample_boundary(qg::parse_spec("halfspace"), 0.005);
  qg::DyadicGrid GH = qg::build_grid(SH, 0, 4);
  for (int id : GH.generations[0])
    CHECK(qg::packing_ratio(GH, *DH.oracle, SH, GH.cubes[id], 0.02) ==
          doctest::Approx(0.0));

  qg::Domain DD = qg::make_domain(qg::parse_spec("disk"));
  qg::SampledBoundary SD = qg::sample_boundary(qg::parse_spec("disk"), 0.005);
  qg::DyadicGrid GD = qg::build_grid(SD, 0, 4);
  double prev = -1;
  for (double c0 : {0.01, 0.05, 0.12}) {
    auto bad = qg::c0_bad_cubes(GD, *DD.oracle, SD, c0);
    double sup = 0;
    for (const auto& Q : GD.cubes)
      sup = std::max(sup, qg::packing_ratio_from_flags(GD, Q, bad));
    CHECK(sup >= prev - 1e-12);
    prev = sup;
    if (c0 <= 0.05) CHECK(sup == doctest::Approx(0.0));
  }
}

TEST_CASE("layer energy: rotation invariance and the fragmentation contrast") {
  qg::SampledBoundary S = qg::sample_boundary(qg::parse_spec("disk"), 0.005);
  double e0 = qg::layer_energy(S, {make_point(1, 0), 0.5});
  CHECK(e0 > 0);
  for (double a : {0.7, 2.1, 4.0}) {
    double e = qg::layer_energy(
        S, {make_point(std::cos(a), std::sin(a)), 0.5});
    CHECK(e == doctest::Approx(e0).epsilon(0.02));
  }

  qg::SampledBoundary C =
      qg::sample_boundary(qg::parse_spec("cantor:4"), 0.005);
  auto [ci, cd] = C.index.nearest(make_point(0.5, 0.5));
  double ec = qg::layer_energy(C, {C.point(ci), 0.5});
  CHECK(ec / e0 > 5);

  // collar exclusion can empty the lattice
  CHECK_THROWS_AS(qg::layer_energy(S, {make_point(1, 0), 0.001}),
                  qg::ResolutionError);
}

TEST_CASE("boundary-measure ratios against closed forms") {
  qg::SampledBoundary L = qg::sample_boundary(qg::parse_spec("line"), 0.002);
  std::vector<qg::Ball> wins;
  for (double cx : {-0.4, -0.1, 0.2, 0.5})
    for (double r : {0.05, 0.1, 0.3}) wins.push_back({make_point(cx, 0), r});
  qg::AdrEstimate a = qg::adr_estimate(L, wins);
  CHECK(a.C_low == doctest::Approx(2.0).epsilon(0.03));
  CHECK(a.C_high == doctest::Approx(2.0).epsilon(0.03));
  CHECK(a.empty_windows == 0);

  qg::SampledBoundary D = qg::sample_boundary(qg::parse_spec("disk"), 0.002);
  for (double r : {0.1, 0.5, 1.0, 1.9}) {
    qg::AdrEstimate ad = qg::adr_estimate(D, {{make_point(1, 0), r}});
    double expected = 4 * std::asin(r / 2) / r;
    CHECK(ad.C_high == doctest::Approx(expected).epsilon(0.03));
  }
}

TEST_CASE("full classification: verdict consistency and stable reports") {
  qg::AnalysisConfig cfg;
  cfg.h = 0.01;
  cfg.n_windows = 20;
  cfg.n_pairs = 6;
  qg::ClassificationReport rep =
      qg::classify_domain(qg::parse_spec("disk"), cfg);

  auto passed = [](const qg::Verdict& v) {
    return v.status == qg::Verdict::Status::Pass;
  };
  // implication chain among the verdicts
  if (passed(rep.v_chordarc)) CHECK(passed(rep.v_nta));
  if (passed(rep.v_nta)) CHECK(passed(rep.v_uniform));
  if (passed(rep.v_ur) && passed(rep.v_uniform)) CHECK(passed(rep.v_nta));
  CHECK(passed(rep.v_chordarc));  // the disk is the everything-passes case

  // verdicts are scale-qualified
  CHECK(rep.v_adr.note.find("tested scales") != std::string::npos);

  std::string j1 = qg::report_to_json(rep);
  std::string j2 =
      qg::report_to_json(qg::classify_domain(qg::parse_spec("disk"), cfg));
  CHECK(j1 == j2);

  // fixed field order in the document
  std::size_t p_spec = j1.find("\"spec\"");
  std::size_t p_adr = j1.find("\"adr\"");
  std::size_t p_verd = j1.find("\"verdicts\"");
  std::size_t p_prov = j1.find("\"provenance\"");
  CHECK(p_spec < p_adr);
  CHECK(p_adr < p_verd);
  CHECK(p_verd < p_prov);

  std::string digest = qg::report_digest(j1);
  CHECK(digest.find("ADR") != std::string::npos);
  CHECK(digest.find("ChordArc") != std::string::npos);
}
