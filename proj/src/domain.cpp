#include "qg/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qg/util.hpp"

namespace qg {

namespace {

constexpr double kPi = std::numbers::pi;

Point unshift(const Point& X, const Point& s) { return X - s; }

// ---------------------------------------------------------------- half-space
class HalfSpaceOracle final : public DomainOracle {
 public:
  HalfSpaceOracle(int dim, Point shift) : dim_(dim), shift_(shift) {}

  Side side(const Point& X) const override {
    return height(X) > 0 ? Side::Inside : Side::Outside;
  }
  double boundary_distance(const Point& X) const override {
    return std::abs(height(X));
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point p = X;
    if (dim_ == 2)
      p.y = shift_.y;
    else
      p.z = shift_.z;
    p.dim = dim_;
    return p;
  }
  double boundary_diameter() const override {
    return std::numeric_limits<double>::infinity();
  }

 private:
  double height(const Point& X) const {
    Point q = unshift(X, shift_);
    return dim_ == 2 ? q.y : q.z;
  }
  int dim_;
  Point shift_;
};

// ---------------------------------------------------------------------- ball
class BallOracle final : public DomainOracle {
 public:
  BallOracle(int dim, double R, Point shift) : dim_(dim), R_(R), shift_(shift) {}

  Side side(const Point& X) const override {
    return norm(unshift(X, shift_)) < R_ ? Side::Inside : Side::Outside;
  }
  double boundary_distance(const Point& X) const override {
    return std::abs(norm(unshift(X, shift_)) - R_);
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point q = unshift(X, shift_);
    double n = norm(q);
    if (n < 1e-300) return Point{R_ + shift_.x, shift_.y, shift_.z, dim_};
    Point p = shift_ + q * (R_ / n);
    p.dim = dim_;
    return p;
  }
  double boundary_diameter() const override { return 2 * R_; }

 private:
  int dim_;
  double R_;
  Point shift_;
};

// -------------------------------------------------------------------- square
// Open axis-aligned square (-s/2, s/2)^2.
class SquareOracle final : public DomainOracle {
 public:
  SquareOracle(double side, Point shift) : s_(side), shift_(shift) {}

  Side side(const Point& X) const override {
    Point q = unshift(X, shift_);
    return (std::abs(q.x) < s_ / 2 && std::abs(q.y) < s_ / 2) ? Side::Inside
                                                              : Side::Outside;
  }
  double boundary_distance(const Point& X) const override {
    Point q = unshift(X, shift_);
    double dx = std::abs(q.x) - s_ / 2, dy = std::abs(q.y) - s_ / 2;
    if (dx <= 0 && dy <= 0) return -std::max(dx, dy);
    double ox = std::max(dx, 0.0), oy = std::max(dy, 0.0);
    return std::sqrt(ox * ox + oy * oy);
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point q = unshift(X, shift_);
    double hx = s_ / 2;
    Point p = q;
    if (std::abs(q.x) < hx && std::abs(q.y) < hx) {
      // snap the closer coordinate to its wall
      if (hx - std::abs(q.x) < hx - std::abs(q.y))
        p.x = q.x >= 0 ? hx : -hx;
      else
        p.y = q.y >= 0 ? hx : -hx;
    } else {
      p.x = std::clamp(q.x, -hx, hx);
      p.y = std::clamp(q.y, -hx, hx);
    }
    return p + shift_;
  }
  double boundary_diameter() const override { return s_ * std::sqrt(2.0); }

 private:
  double s_;
  Point shift_;
};

// ------------------------------------------------------------------ polyline
// Shared helper: closest point on a chain of segments.
struct PolyDist {
  std::vector<Point> pts;

  std::pair<double, Point> closest(const Point& q) const {
    double best = std::numeric_limits<double>::infinity();
    Point arg = pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Point &a = pts[i - 1], &b = pts[i];
      Point ab = b - a;
      double len2 = dot(ab, ab);
      double t = len2 > 0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
      Point p = a + ab * t;
      double d = dist(q, p);
      if (d < best) {
        best = d;
        arg = p;
      }
    }
    return {best, arg};
  }
};

// ------------------------------------------------------------ lipschitz graph
// Omega = {y > f(x)} with f piecewise linear, extended past the breakpoint
// range with its end slopes.
class GraphOracle final : public DomainOracle {
 public:
  GraphOracle(std::vector<double> bx, std::vector<double> by, Point shift)
      : bx_(std::move(bx)), by_(std::move(by)), shift_(shift) {
    double span = bx_.back() - bx_.front();
    double x0 = bx_.front() - 2 * span, x1 = bx_.back() + 2 * span;
    poly_.pts.push_back(make_point(x0, value(x0)));
    for (std::size_t i = 0; i < bx_.size(); ++i)
      poly_.pts.push_back(make_point(bx_[i], by_[i]));
    poly_.pts.push_back(make_point(x1, value(x1)));
  }

  double value(double x) const {
    if (x <= bx_.front()) {
      double sl = (by_[1] - by_[0]) / (bx_[1] - bx_[0]);
      return by_.front() + sl * (x - bx_.front());
    }
    if (x >= bx_.back()) {
      std::size_t n = bx_.size();
      double sl = (by_[n - 1] - by_[n - 2]) / (bx_[n - 1] - bx_[n - 2]);
      return by_.back() + sl * (x - bx_.back());
    }
    auto it = std::upper_bound(bx_.begin(), bx_.end(), x);
    std::size_t i = it - bx_.begin();
    double t = (x - bx_[i - 1]) / (bx_[i] - bx_[i - 1]);
    return by_[i - 1] + t * (by_[i] - by_[i - 1]);
  }

  Side side(const Point& X) const override {
    Point q = unshift(X, shift_);
    return q.y > value(q.x) ? Side::Inside : Side::Outside;
  }
  double boundary_distance(const Point& X) const override {
    return poly_.closest(unshift(X, shift_)).first;
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    return poly_.closest(unshift(X, shift_)).second + shift_;
  }
  double boundary_diameter() const override {
    return std::numeric_limits<double>::infinity();
  }

 private:
  std::vector<double> bx_, by_;
  Point shift_;
  PolyDist poly_;
};

// ------------------------------------------------------- cantor complement
// Omega = R^2 minus the level-k four-corners square union K; the boundary is
// the union of the 4^k square boundaries, the exterior of Omega is int(K).
class CantorOracle final : public DomainOracle {
 public:
  CantorOracle(int level, Point shift) : k_(level), shift_(shift) {}

  Side side(const Point& X) const override {
    Point q = unshift(X, shift_);
    double ox = 0, oy = 0, s = 1;
    for (int d = 0; d < k_; ++d) {
      double c = s / 4;
      bool lox = q.x >= ox && q.x <= ox + c;
      bool hix = q.x >= ox + s - c && q.x <= ox + s;
      bool loy = q.y >= oy && q.y <= oy + c;
      bool hiy = q.y >= oy + s - c && q.y <= oy + s;
      if (!((lox || hix) && (loy || hiy))) return Side::Inside;
      if (hix) ox += s - c;
      if (hiy) oy += s - c;
      s = c;
    }
    return Side::Outside;  // in the closed square union K
  }

  double boundary_distance(const Point& X) const override {
    Point q = unshift(X, shift_);
    double best = std::numeric_limits<double>::infinity();
    Point arg{};
    descend(q, 0, 0, 1, 0, best, arg);
    return best;
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point q = unshift(X, shift_);
    double best = std::numeric_limits<double>::infinity();
    Point arg{};
    descend(q, 0, 0, 1, 0, best, arg);
    return arg + shift_;
  }
  double boundary_diameter() const override { return std::sqrt(2.0); }

  // exact closed-form boundary description, used by generators and tests
  void squares(std::vector<std::array<double, 3>>* out) const {
    collect(0, 0, 1, 0, out);
  }

 private:
  static double square_boundary_dist(const Point& q, double ox, double oy,
                                     double s, Point* arg) {
    double dx = std::max({ox - q.x, q.x - (ox + s), 0.0});
    double dy = std::max({oy - q.y, q.y - (oy + s), 0.0});
    if (dx > 0 || dy > 0) {
      arg->x = std::clamp(q.x, ox, ox + s);
      arg->y = std::clamp(q.y, oy, oy + s);
      return std::sqrt(dx * dx + dy * dy);
    }
    // interior of the square: nearest wall
    double l = q.x - ox, r = ox + s - q.x, b = q.y - oy, t = oy + s - q.y;
    double m = std::min({l, r, b, t});
    *arg = q;
    if (m == l)
      arg->x = ox;
    else if (m == r)
      arg->x = ox + s;
    else if (m == b)
      arg->y = oy;
    else
      arg->y = oy + s;
    return m;
  }

  void descend(const Point& q, double ox, double oy, double s, int depth,
               double& best, Point& arg) const {
    // lower bound: distance to this cell's bounding square
    double dx = std::max({ox - q.x, q.x - (ox + s), 0.0});
    double dy = std::max({oy - q.y, q.y - (oy + s), 0.0});
    if (std::sqrt(dx * dx + dy * dy) >= best) return;
    if (depth == k_) {
      Point a{};
      double d = square_boundary_dist(q, ox, oy, s, &a);
      if (d < best) {
        best = d;
        arg = a;
      }
      return;
    }
    double c = s / 4;
    descend(q, ox, oy, c, depth + 1, best, arg);
    descend(q, ox + s - c, oy, c, depth + 1, best, arg);
    descend(q, ox, oy + s - c, c, depth + 1, best, arg);
    descend(q, ox + s - c, oy + s - c, c, depth + 1, best, arg);
  }

  void collect(double ox, double oy, double s, int depth,
               std::vector<std::array<double, 3>>* out) const {
    if (depth == k_) {
      out->push_back({ox, oy, s});
      return;
    }
    double c = s / 4;
    collect(ox, oy, c, depth + 1, out);
    collect(ox + s - c, oy, c, depth + 1, out);
    collect(ox, oy + s - c, c, depth + 1, out);
    collect(ox + s - c, oy + s - c, c, depth + 1, out);
  }

  int k_;
  Point shift_;
};

// ---------------------------------------------------------------------- cusp
// Horn domain Omega = {x > 0, |y| < x^alpha}, alpha > 1: the walls meet
// tangentially at the origin, which kills the Harnack-chain condition near
// the tip at rate controlled by alpha.
class CuspOracle final : public DomainOracle {
 public:
  CuspOracle(double alpha, double window, Point shift)
      : alpha_(alpha), W_(window), shift_(shift) {
    // one wall, x-sorted, clustered toward the tip; the other is its mirror
    double span = 8 * W_;
    int n = 16384;
    xs_.resize(n + 1);
    ys_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
      double t = static_cast<double>(i) / n;
      xs_[i] = span * t * t;
      ys_[i] = std::pow(xs_[i], alpha_);
    }
  }

  Side side(const Point& X) const override {
    Point q = unshift(X, shift_);
    return (q.x > 0 && std::abs(q.y) < std::pow(q.x, alpha_)) ? Side::Inside
                                                              : Side::Outside;
  }
  double boundary_distance(const Point& X) const override {
    return wall_closest(unshift(X, shift_)).first;
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point q = unshift(X, shift_);
    Point p = wall_closest(q).second;
    if (q.y < 0) p.y = -p.y;
    return p + shift_;
  }
  double boundary_diameter() const override {
    double cap = std::pow(W_, alpha_);
    return std::max(2 * cap, std::hypot(W_, cap));
  }

 private:
  // nearest point on the upper wall to (q.x, |q.y|); by symmetry this is the
  // distance to both walls.  x-sorted scan pruned by the horizontal gap.
  std::pair<double, Point> wall_closest(const Point& q0) const {
    Point q = make_point(q0.x, std::abs(q0.y));
    auto it = std::lower_bound(xs_.begin(), xs_.end(), q.x);
    std::size_t mid = it - xs_.begin();
    double best = std::numeric_limits<double>::infinity();
    Point arg = make_point(xs_.front(), ys_.front());
    auto try_seg = [&](std::size_t i) {  // segment [i, i+1]
      Point a = make_point(xs_[i], ys_[i]);
      Point b = make_point(xs_[i + 1], ys_[i + 1]);
      Point ab = b - a;
      double len2 = dot(ab, ab);
      double t = len2 > 0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
      Point p = a + ab * t;
      double d = dist(q, p);
      if (d < best) {
        best = d;
        arg = p;
      }
    };
    std::size_t n = xs_.size() - 1;
    for (std::size_t lo = std::min(mid, n - 1);; --lo) {
      if (xs_[lo + 1] < q.x - best) break;
      try_seg(lo);
      if (lo == 0) break;
    }
    for (std::size_t hi = std::min(mid, n - 1) + 1; hi < n; ++hi) {
      if (xs_[hi] > q.x + best) break;
      try_seg(hi);
    }
    return {best, arg};
  }

  double alpha_, W_;
  Point shift_;
  std::vector<double> xs_, ys_;
};

// ----------------------------------------------------------------- slit disk
// Open disk of radius R minus the closed radial segment [R-L, R] x {0}.
// Both sides of the slit form a single H^1 set, measured once.
class SlitDiskOracle final : public DomainOracle {
 public:
  SlitDiskOracle(double R, double L, Point shift)
      : R_(R), L_(L), shift_(shift) {}

  Side side(const Point& X) const override {
    Point q = unshift(X, shift_);
    if (norm(q) >= R_) return Side::Outside;
    if (q.y == 0 && q.x >= R_ - L_ && q.x <= R_) return Side::Outside;
    return Side::Inside;
  }
  double boundary_distance(const Point& X) const override {
    Point q = unshift(X, shift_);
    double dc = std::abs(norm(q) - R_);
    double sx = std::clamp(q.x, R_ - L_, R_);
    double ds = std::hypot(q.x - sx, q.y);
    return std::min(dc, ds);
  }
  std::optional<Point> nearest_boundary(const Point& X) const override {
    Point q = unshift(X, shift_);
    double n = norm(q);
    Point on_circle =
        n > 1e-300 ? q * (R_ / n) : make_point(R_, 0);
    Point on_slit = make_point(std::clamp(q.x, R_ - L_, R_), 0.0);
    Point p = dist(q, on_circle) <= dist(q, on_slit) ? on_circle : on_slit;
    return p + shift_;
  }
  double boundary_diameter() const override { return 2 * R_; }

 private:
  double R_, L_;
  Point shift_;
};

// --------------------------------------------------------------- generators

void push_sample(SampledBoundary* S, const Point& p, double w) {
  S->xs.push_back(p.x);
  S->ys.push_back(p.y);
  S->zs.push_back(S->dim == 3 ? p.z : 0.0);
  S->ws.push_back(w);
}

// Evenly spaced midpoint samples along a segment, exact length share weights.
void sample_segment(SampledBoundary* S, const Point& a, const Point& b,
                    double h) {
  double len = dist(a, b);
  int m = std::max(1, static_cast<int>(std::ceil(len / h)));
  for (int i = 0; i < m; ++i) {
    double t = (i + 0.5) / m;
    push_sample(S, a + (b - a) * t, len / m);
  }
}

void sample_circle(SampledBoundary* S, const Point& c, double R, double h) {
  int m = std::max(8, static_cast<int>(std::ceil(2 * kPi * R / h)));
  for (int i = 0; i < m; ++i) {
    double th = 2 * kPi * (i + 0.5) / m;
    push_sample(S, c + make_point(R * std::cos(th), R * std::sin(th)),
                2 * kPi * R / m);
  }
}

void sample_square_boundary(SampledBoundary* S, double ox, double oy, double s,
                            const Point& shift, double h) {
  Point a = make_point(ox, oy) + shift;
  Point b = make_point(ox + s, oy) + shift;
  Point c = make_point(ox + s, oy + s) + shift;
  Point d = make_point(ox, oy + s) + shift;
  sample_segment(S, a, b, h);
  sample_segment(S, b, c, h);
  sample_segment(S, c, d, h);
  sample_segment(S, d, a, h);
}

void sample_sphere(SampledBoundary* S, const Point& c, double R, double h) {
  auto n = static_cast<std::size_t>(
      std::max(32.0, std::ceil(4 * kPi * R * R / (h * h))));
  double area = 4 * kPi * R * R / static_cast<double>(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    double zy = 1.0 - 2.0 * (i + 0.5) / static_cast<double>(n);
    double rad = std::sqrt(std::max(0.0, 1.0 - zy * zy));
    double th = golden * static_cast<double>(i);
    Point p = c + make_point(R * rad * std::cos(th), R * rad * std::sin(th),
                             R * zy);
    p.dim = 3;
    push_sample(S, p, area);
  }
}

std::pair<std::vector<double>, std::vector<double>> default_graph(
    double L, double W) {
  // deterministic tent with slopes exactly +-L: one kink, so most windows
  // away from it are flat at every scale
  std::vector<double> bx, by;
  int n = 2;
  double step = 2 * W / n;
  for (int i = 0; i <= n; ++i) {
    bx.push_back(-W + i * step);
    by.push_back((i % 2) ? L * step : 0.0);
  }
  return {bx, by};
}

}  // namespace

std::string CorpusSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::HalfSpace:
      os << (dim == 2 ? "halfspace" : "plane");
      break;
    case Kind::Ball:
      os << (dim == 2 ? "disk" : "sphere") << ":" << format_double(radius);
      break;
    case Kind::Square:
      os << "square:" << format_double(side);
      break;
    case Kind::LipschitzGraph:
      os << "graph:" << format_double(slope);
      break;
    case Kind::CantorComplement:
      os << "cantor:" << level;
      break;
    case Kind::Cusp:
      os << "cusp:" << format_double(alpha);
      break;
    case Kind::SlitDisk:
      os << "slit:" << format_double(radius) << "," << format_double(slit);
      break;
  }
  return os.str();
}

CorpusSpec parse_spec(const std::string& text) {
  CorpusSpec s;
  std::string head = text, args;
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    head = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  std::vector<double> vals;
  {
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) vals.push_back(parse_double(tok));
    }
  }
  auto arg = [&](std::size_t i, double dflt) {
    return i < vals.size() ? vals[i] : dflt;
  };
  if (head == "disk" || head == "ball") {
    s.kind = CorpusSpec::Kind::Ball;
    s.radius = arg(0, 1.0);
  } else if (head == "sphere") {
    s.kind = CorpusSpec::Kind::Ball;
    s.dim = 3;
    s.radius = arg(0, 1.0);
  } else if (head == "halfspace" || head == "line") {
    s.kind = CorpusSpec::Kind::HalfSpace;
    s.window = arg(0, 1.0);
  } else if (head == "plane") {
    s.kind = CorpusSpec::Kind::HalfSpace;
    s.dim = 3;
    s.window = arg(0, 1.0);
  } else if (head == "square") {
    s.kind = CorpusSpec::Kind::Square;
    s.side = arg(0, 1.0);
  } else if (head == "graph") {
    s.kind = CorpusSpec::Kind::LipschitzGraph;
    s.slope = arg(0, 0.5);
    s.window = arg(1, 1.0);
  } else if (head == "cantor") {
    s.kind = CorpusSpec::Kind::CantorComplement;
    s.level = static_cast<int>(arg(0, 1.0));
  } else if (head == "cusp") {
    s.kind = CorpusSpec::Kind::Cusp;
    s.alpha = arg(0, 2.0);
    s.window = arg(1, 1.0);
  } else if (head == "slit") {
    s.kind = CorpusSpec::Kind::SlitDisk;
    s.radius = arg(0, 1.0);
    s.slit = arg(1, 0.5);
  } else {
    throw PreconditionError("unknown corpus spec '" + text + "'");
  }
  return s;
}

Domain make_domain(const CorpusSpec& spec) {
  Domain d;
  d.spec = spec;
  using K = CorpusSpec::Kind;
  switch (spec.kind) {
    case K::HalfSpace:
      d.oracle = std::make_shared<HalfSpaceOracle>(spec.dim, spec.shift);
      break;
    case K::Ball:
      if (!(spec.radius > 0)) throw PreconditionError("ball radius must be > 0");
      d.oracle = std::make_shared<BallOracle>(spec.dim, spec.radius, spec.shift);
      break;
    case K::Square:
      if (!(spec.side > 0)) throw PreconditionError("square side must be > 0");
      d.oracle = std::make_shared<SquareOracle>(spec.side, spec.shift);
      break;
    case K::LipschitzGraph: {
      auto bx = spec.breakpoints;
      auto by = spec.values;
      if (bx.empty()) std::tie(bx, by) = default_graph(spec.slope, spec.window);
      if (bx.size() < 2 || bx.size() != by.size())
        throw PreconditionError("graph: need matching breakpoints/values");
      d.oracle = std::make_shared<GraphOracle>(bx, by, spec.shift);
      break;
    }
    case K::CantorComplement:
      if (spec.level < 1) throw PreconditionError("cantor level must be >= 1");
      d.oracle = std::make_shared<CantorOracle>(spec.level, spec.shift);
      break;
    case K::Cusp:
      if (!(spec.alpha > 1)) throw PreconditionError("cusp exponent must be > 1");
      d.oracle = std::make_shared<CuspOracle>(spec.alpha, spec.window, spec.shift);
      break;
    case K::SlitDisk:
      if (!(spec.radius > 0) || !(spec.slit > 0) || spec.slit >= spec.radius)
        throw PreconditionError("slit disk: need 0 < L < R");
      d.oracle =
          std::make_shared<SlitDiskOracle>(spec.radius, spec.slit, spec.shift);
      break;
  }
  return d;
}

SampledBoundary sample_boundary(const CorpusSpec& spec, double h) {
  if (!(h > 0)) throw PreconditionError("sample_boundary: h must be > 0");
  SampledBoundary S;
  S.dim = spec.dim;
  S.h = h;
  using K = CorpusSpec::Kind;
  switch (spec.kind) {
    case K::HalfSpace: {
      double W = spec.window;
      if (h > W / 50) throw PreconditionError("h too coarse for the window");
      if (spec.dim == 2) {
        sample_segment(&S, make_point(-W, 0) + spec.shift,
                       make_point(W, 0) + spec.shift, h);
      } else {
        int m = std::max(1, static_cast<int>(std::ceil(2 * W / h)));
        double cw = 2 * W / m;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            Point p = make_point(-W + (i + 0.5) * cw, -W + (j + 0.5) * cw, 0.0);
            push_sample(&S, p + spec.shift, cw * cw);
          }
      }
      break;
    }
    case K::Ball: {
      if (h > 2 * spec.radius / 100)
        throw PreconditionError("h too coarse for this radius");
      if (spec.dim == 2)
        sample_circle(&S, spec.shift, spec.radius, h);
      else
        sample_sphere(&S, spec.shift, spec.radius, h);
      break;
    }
    case K::Square: {
      if (h > spec.side / 25) throw PreconditionError("h too coarse for this side");
      sample_square_boundary(&S, -spec.side / 2, -spec.side / 2, spec.side,
                             spec.shift, h);
      break;
    }
    case K::LipschitzGraph: {
      auto bx = spec.breakpoints;
      auto by = spec.values;
      if (bx.empty()) std::tie(bx, by) = default_graph(spec.slope, spec.window);
      if (h > (bx.back() - bx.front()) / 50)
        throw PreconditionError("h too coarse for the window");
      for (std::size_t i = 1; i < bx.size(); ++i)
        sample_segment(&S, make_point(bx[i - 1], by[i - 1]) + spec.shift,
                       make_point(bx[i], by[i]) + spec.shift, h);
      break;
    }
    case K::CantorComplement: {
      CantorOracle oracle(spec.level, spec.shift);
      std::vector<std::array<double, 3>> sq;
      oracle.squares(&sq);
      for (const auto& q : sq)
        sample_square_boundary(&S, q[0], q[1], q[2], spec.shift, h);
      break;
    }
    case K::Cusp: {
      double W = spec.window;
      if (h > W / 50) throw PreconditionError("h too coarse for the window");
      // arclength parametrization of the wall y = x^alpha on [0, W] via fine
      // subdivision (clustered toward the tip); the other wall is mirrored
      int nf = 1 << 16;
      std::vector<double> cx(nf + 1), cl(nf + 1);
      auto f = [&](double x) { return std::pow(x, spec.alpha); };
      for (int i = 0; i <= nf; ++i) {
        double t = static_cast<double>(i) / nf;
        cx[i] = W * t * t;
      }
      cl[0] = 0;
      for (int i = 1; i <= nf; ++i)
        cl[i] = cl[i - 1] + std::hypot(cx[i] - cx[i - 1], f(cx[i]) - f(cx[i - 1]));
      double total = cl[nf];
      int m = std::max(2, static_cast<int>(std::ceil(total / h)));
      for (int sign : {+1, -1}) {
        int j = 0;
        for (int i = 0; i < m; ++i) {
          double target = total * (i + 0.5) / m;
          while (j < nf && cl[j + 1] < target) ++j;
          double t = (target - cl[j]) / std::max(cl[j + 1] - cl[j], 1e-300);
          double x = cx[j] + t * (cx[j + 1] - cx[j]);
          push_sample(&S, make_point(x, sign * f(x)) + spec.shift, total / m);
        }
      }
      break;
    }
    case K::SlitDisk: {
      if (h > spec.radius / 50) throw PreconditionError("h too coarse");
      sample_circle(&S, spec.shift, spec.radius, h);
      sample_segment(&S, make_point(spec.radius - spec.slit, 0) + spec.shift,
                     make_point(spec.radius, 0) + spec.shift, h);
      break;
    }
  }
  S.build_index();
  return S;
}

}  // namespace qg
