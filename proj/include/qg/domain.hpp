#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qg/cloud.hpp"
#include "qg/geom.hpp"

namespace qg {

enum class Side { Inside, Outside };

// Queryable domain: ground truth for all accessibility searches.
// boundary_distance is 1-Lipschitz and vanishes exactly on the boundary.
class DomainOracle {
 public:
  virtual ~DomainOracle() = default;

  virtual Side side(const Point& X) const = 0;
  virtual double boundary_distance(const Point& X) const = 0;
  virtual std::optional<Point> nearest_boundary(const Point&) const {
    return std::nullopt;
  }
  // Diameter of the boundary; +inf for unbounded generators.
  virtual double boundary_diameter() const = 0;

  bool inside(const Point& X) const { return side(X) == Side::Inside; }
};

struct CorpusSpec {
  enum class Kind {
    HalfSpace,
    Ball,
    Square,
    LipschitzGraph,
    CantorComplement,
    Cusp,
    SlitDisk
  };

  Kind kind = Kind::Ball;
  int dim = 2;
  double radius = 1;       // Ball, SlitDisk
  double side = 1;         // Square
  int level = 1;           // CantorComplement
  double alpha = 2;        // Cusp exponent, > 1
  double slit = 0.5;       // SlitDisk slit length
  double slope = 0.5;      // LipschitzGraph slope bound L
  std::vector<double> breakpoints;  // LipschitzGraph x-breakpoints
  std::vector<double> values;       // graph values at breakpoints
  double window = 1;       // half-width of the analysis window (unbounded kinds)
  Point shift{};           // placement transform (translation)

  std::string name() const;
};

// Spec strings: disk | ball:R | halfspace | line | square[:side] |
// graph[:L[,window]] | cantor:k | cusp[:alpha] | slit[:R,L]
CorpusSpec parse_spec(const std::string& text);

struct Domain {
  CorpusSpec spec;
  std::shared_ptr<const DomainOracle> oracle;
};

Domain make_domain(const CorpusSpec& spec);

// Exact-parametrization h-net of the boundary; weights are the local
// boundary-measure shares and sum to the sampled region's measure.
SampledBoundary sample_boundary(const CorpusSpec& spec, double h);

}  // namespace qg
