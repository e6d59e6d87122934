#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qg/geom.hpp"
#include "qg/util.hpp"

using qg::make_point;
using qg::Point;

TEST_CASE("plane_offset") {
  qg::Hyperplane P{make_point(0, 0), make_point(0, 1)};
  CHECK(qg::plane_offset(P, make_point(3, 5)) == doctest::Approx(5));
  CHECK(qg::plane_offset(P, make_point(-7, 0)) == doctest::Approx(0));

  double s = 1 / std::sqrt(2.0);
  qg::Hyperplane D{make_point(1, 1), make_point(s, s)};
  CHECK(qg::plane_offset(D, make_point(2, 2)) ==
        doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(qg::plane_offset(D, make_point(2, 0))) ==
        doctest::Approx(0));
}

TEST_CASE("inscribed_halfball closed forms") {
  qg::Ball B{make_point(0, 0), 1};
  Point v = make_point(0, 1);

  qg::Ball a = qg::inscribed_halfball(B, v, 0);
  CHECK(a.radius == doctest::Approx(0.5));
  CHECK(a.center.y == doctest::Approx(0.5));
  CHECK(a.center.x == doctest::Approx(0));

  qg::Ball b = qg::inscribed_halfball(B, v, 1.0 / 3);
  CHECK(b.radius == doctest::Approx(1.0 / 3));
  CHECK(b.center.y == doctest::Approx(2.0 / 3));

  qg::Ball c = qg::inscribed_halfball({make_point(0, 0), 2}, v, 0.1);
  CHECK(c.radius == doctest::Approx(0.9));

  // the result stays inside the ball and clear of the plane slab
  for (double eps : {0.0, 0.05, 0.3}) {
    qg::Ball r = qg::inscribed_halfball(B, v, eps);
    CHECK(qg::norm(r.center) + r.radius <= 1 + 1e-12);
    CHECK(r.center.y - r.radius >= eps * B.radius - 1e-12);
  }
}

TEST_CASE("fit_plane: collinear points give an exact line") {
  std::vector<Point> pts{make_point(0, 1), make_point(1, 3), make_point(2, 5),
                         make_point(-1, -1)};
  std::vector<double> ws(pts.size(), 1.0);
  qg::Hyperplane P = qg::fit_plane(pts, ws);
  for (const Point& p : pts)
    CHECK(std::abs(qg::plane_offset(P, p)) <= 1e-12);
  CHECK(qg::norm(P.normal) == doctest::Approx(1));
}

TEST_CASE("fit_plane: unit-square corners tie") {
  std::vector<Point> pts{make_point(0, 0), make_point(1, 0), make_point(1, 1),
                         make_point(0, 1)};
  std::vector<double> ws(pts.size(), 1.0);
  qg::Hyperplane P = qg::fit_plane(pts, ws);
  CHECK(P.base.x == doctest::Approx(0.5));
  CHECK(P.base.y == doctest::Approx(0.5));
  double res = 0;
  for (const Point& p : pts) {
    double o = qg::plane_offset(P, p);
    res += o * o;
  }
  CHECK(res == doctest::Approx(1.0));  // 4 corners at distance 1/2
}

TEST_CASE("fit_plane: symmetric cloud about the x-axis") {
  qg::Rng rng(3);
  std::vector<Point> pts;
  std::vector<double> ws;
  for (int i = 0; i < 40; ++i) {
    double x = rng.uniform(-2, 2), y = rng.uniform(0.01, 0.2);
    double w = rng.uniform(0.5, 1.5);
    pts.push_back(make_point(x, y));
    pts.push_back(make_point(x, -y));
    ws.push_back(w);
    ws.push_back(w);
  }
  qg::Hyperplane P = qg::fit_plane(pts, ws);
  CHECK(std::abs(P.normal.y) == doctest::Approx(1).epsilon(1e-9));
  CHECK(std::abs(P.normal.x) == doctest::Approx(0).epsilon(1e-9));
}

TEST_CASE("fit_plane_soa matches fit_plane") {
  qg::Rng rng(11);
  std::vector<double> xs, ys, zs, ws;
  std::vector<Point> pts;
  for (int i = 0; i < 25; ++i) {
    double x = rng.uniform(-1, 1), y = 0.3 * x + rng.uniform(-0.05, 0.05);
    xs.push_back(x);
    ys.push_back(y);
    zs.push_back(0);
    ws.push_back(1);
    pts.push_back(make_point(x, y));
  }
  qg::Hyperplane a = qg::fit_plane(pts, ws);
  qg::Hyperplane b =
      qg::fit_plane_soa(xs.data(), ys.data(), zs.data(), ws.data(), 25, 2);
  CHECK(a.base.x == doctest::Approx(b.base.x));
  CHECK(a.base.y == doctest::Approx(b.base.y));
  CHECK(std::abs(qg::dot(a.normal, b.normal)) == doctest::Approx(1));
}

TEST_CASE("fit_plane in 3-d recovers a tilted plane") {
  qg::Rng rng(5);
  Point n = qg::normalized(Point{1, 2, 2, 3});
  std::vector<Point> pts;
  std::vector<double> ws;
  for (int i = 0; i < 60; ++i) {
    Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), 3};
    p = p - n * qg::dot(p, n);  // project onto the plane through 0
    pts.push_back(p);
    ws.push_back(1);
  }
  qg::Hyperplane P = qg::fit_plane(pts, ws);
  CHECK(std::abs(qg::dot(P.normal, n)) == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("degenerate input raises") {
  std::vector<Point> one{make_point(1, 2)};
  std::vector<double> w1{1.0};
  CHECK_THROWS_AS(qg::fit_plane(one, w1), qg::PreconditionError);

  // enough points, but zero spread: the fit has no direction to report
  std::vector<Point> same(3, make_point(1, 2));
  std::vector<double> w3(3, 1.0);
  CHECK_THROWS_AS(qg::fit_plane(same, w3), qg::DegenerateFitError);
}

TEST_CASE("polyline length") {
  qg::Polyline p;
  p.vertices = {make_point(0, 0), make_point(3, 4), make_point(3, 5)};
  CHECK(p.length() == doctest::Approx(6));
}
