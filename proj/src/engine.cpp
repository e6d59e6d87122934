#include "qg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "qg/kernels.hpp"
#include "qg/util.hpp"

namespace qg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using ordered_json = nlohmann::ordered_json;

}  // namespace

SideClassification side_classify(const DomainOracle& oracle,
                                 const SampledBoundary& S, const Point& x,
                                 double r, const Hyperplane& P, double c,
                                 double C, double eps) {
  if (!(c > 0) || !(C > 0) || !(r > 0))
    throw PreconditionError("side_classify: c, C, r must be positive");
  double k = 1.0 / (2 * C + 1);
  if (!(eps > 0) || !(eps < c * k / 4))
    throw PreconditionError("side_classify: need 0 < eps < c*k/4");
  if (S.sample_distance(x) > S.h + 1e-9)
    throw PreconditionError("side_classify: x is not within h of the samples");

  SideClassification out;
  out.x = x;
  out.r = r;
  out.plane = P;
  out.c = c;
  out.C = C;
  out.eps = eps;
  out.k = k;
  Point v = normalized(P.normal);
  out.X_plus = x + v * (k * r / 2);
  out.X_minus = x - v * (k * r / 2);

  // no boundary sample may sit inside either claimed-clear half-ball; this
  // gate runs before the probes so a non-flat window always surfaces as a
  // flatness violation, never as a probe contradiction
  for (std::uint32_t i : S.index.in_ball(x, r)) {
    if (std::abs(dot(S.point(i) - x, v)) > eps * r + S.h + 1e-12)
      throw FlatnessViolationError(
          "side_classify: boundary sample inside a claimed-clear half-ball");
  }

  bool plus_out = oracle.side(out.X_plus) == Side::Outside;
  bool minus_out = oracle.side(out.X_minus) == Side::Outside;
  if (!plus_out && !minus_out)
    throw FlatnessViolationError(
        "side_classify: both probe points interior; the flat-window "
        "precondition did not hold");
  if (plus_out && minus_out)
    throw OracleInconsistencyError(
        "side_classify: both probe points exterior across the window");
  out.exterior_sign = plus_out ? +1 : -1;

  out.exterior_ball =
      inscribed_halfball({x, r}, v * static_cast<double>(out.exterior_sign),
                         eps);
  return out;
}

FlatnessRouteResult exterior_corkscrew_via_flatness(const DomainOracle& oracle,
                                                    const SampledBoundary& S,
                                                    const Point& x, double r,
                                                    double eps, double c,
                                                    double C) {
  double k = 1.0 / (2 * C + 1);
  if (!(eps > 0) || !(eps < c * k / 4))
    throw PreconditionError(
        "exterior_corkscrew_via_flatness: need 0 < eps < c*k/4");

  FlatnessRouteResult res;
  res.window = low_beta_window(S, x, r, eps);
  if (!res.window) {
    res.failed = FlatnessRouteResult::Stage::RhoScan;
    res.detail = "no flat sub-window down to the trusted scale";
    return res;
  }
  const Point& x1 = res.window->x1;
  double r1 = res.window->r1;

  std::vector<double> xs, ys, zs, ws;
  for (std::uint32_t i : S.index.in_ball(x1, r1)) {
    xs.push_back(S.xs[i]);
    ys.push_back(S.ys[i]);
    zs.push_back(S.zs[i]);
    ws.push_back(S.ws[i]);
  }
  Hyperplane P;
  try {
    P = fit_plane_soa(xs.data(), ys.data(), zs.data(), ws.data(), xs.size(),
                      S.dim);
  } catch (const DegenerateFitError& e) {
    res.failed = FlatnessRouteResult::Stage::Classification;
    res.detail = e.what();
    return res;
  }
  try {
    res.classification = side_classify(oracle, S, x1, r1, P, c, C, eps);
  } catch (const FlatnessViolationError& e) {
    res.failed = FlatnessRouteResult::Stage::Classification;
    res.detail = e.what();
    return res;
  } catch (const OracleInconsistencyError& e) {
    res.failed = FlatnessRouteResult::Stage::Classification;
    res.detail = e.what();
    return res;
  }

  CorkscrewCert cert;
  cert.kind = CorkscrewCert::Kind::Exterior;
  cert.x = x;
  cert.r = r;
  cert.X = res.classification->exterior_ball.center;
  cert.radius = res.classification->exterior_ball.radius;
  res.cert = cert;
  return res;
}

std::vector<char> c0_bad_cubes(const DyadicGrid& G, const DomainOracle& oracle,
                               const SampledBoundary& S, double c0,
                               unsigned threads) {
  std::vector<char> bad(G.cubes.size(), 0);
  parallel_for(
      G.cubes.size(),
      [&](std::size_t i) {
        bad[i] = !c0_exterior_test(oracle, S, G.cubes[i], c0, G.cubes[i].r_Q)
                      .has_value();
      },
      threads);
  return bad;
}

double packing_ratio_from_flags(const DyadicGrid& G, const DyadicCube& Q,
                                const std::vector<char>& bad) {
  double m = 0;
  std::vector<int> stack{Q.id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (bad[id]) m += G.cubes[id].sigma;
    for (int ch : G.cubes[id].children) stack.push_back(ch);
  }
  return m / Q.sigma;
}

double packing_ratio(const DyadicGrid& G, const DomainOracle& oracle,
                     const SampledBoundary& S, const DyadicCube& Q,
                     double c0) {
  double m = 0;
  std::vector<int> stack{Q.id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const DyadicCube& cur = G.cubes[id];
    if (!c0_exterior_test(oracle, S, cur, c0, cur.r_Q)) m += cur.sigma;
    for (int ch : cur.children) stack.push_back(ch);
  }
  return m / Q.sigma;
}

double layer_energy(const SampledBoundary& S, const Ball& B, double kappa) {
  if (S.dim != 2 && S.dim != 3)
    throw PreconditionError("layer_energy: ambient dimension must be 2 or 3");
  if (!(kappa >= 3))
    throw PreconditionError("layer_energy: collar width must be >= 3");
  const double r = B.radius;
  const double g = r / 64;
  const int n = S.dim - 1;
  const double coef =
      S.dim == 2 ? 1.0 / (2 * std::numbers::pi) : 1.0 / (4 * std::numbers::pi);
  const double cellvol = S.dim == 2 ? g * g : g * g * g;

  double sum = 0;
  bool any = false;
  int kmax = S.dim == 3 ? 64 : 0;
  for (int i = -64; i <= 64; ++i)
    for (int j = -64; j <= 64; ++j)
      for (int k = -kmax; k <= kmax; ++k) {
        Point X = B.center + Point{i * g, j * g, k * g, S.dim};
        if (dist(X, B.center) >= r) continue;
        double delta = S.sample_distance(X);
        if (delta <= kappa * S.h) continue;
        any = true;
        double frob2 = kernels::layer_hessian_frob2(
            S.xs.data(), S.ys.data(), S.zs.data(), S.ws.data(), S.size(), X.x,
            X.y, X.z, S.dim);
        sum += coef * coef * frob2 * delta * cellvol;
      }
  if (!any)
    throw ResolutionError(
        "layer_energy: collar exclusion left no integration points");
  return sum / std::pow(r, n);
}

AdrEstimate adr_estimate(const SampledBoundary& S,
                         const std::vector<Ball>& windows) {
  AdrEstimate est;
  est.C_low = kInf;
  est.C_high = 0;
  int n = S.dim - 1;
  for (const Ball& w : windows) {
    double sigma = 0;
    for (std::uint32_t i : S.index.in_ball(w.center, w.radius))
      sigma += S.ws[i];
    if (sigma == 0) {
      ++est.empty_windows;
      continue;
    }
    double ratio = sigma / std::pow(w.radius, n);
    est.C_low = std::min(est.C_low, ratio);
    est.C_high = std::max(est.C_high, ratio);
    ++est.used;
  }
  if (est.used == 0) est.C_low = 0;
  return est;
}

namespace {

const char* status_str(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Pass:
      return "pass";
    case Verdict::Status::Fail:
      return "fail";
    default:
      return "untested";
  }
}

}  // namespace

ClassificationReport classify_domain(const CorpusSpec& spec,
                                     const AnalysisConfig& cfg) {
  ClassificationReport R;
  R.spec = spec;
  R.config = cfg;

  Domain dom = make_domain(spec);
  const DomainOracle& oracle = *dom.oracle;
  SampledBoundary S = sample_boundary(spec, cfg.h);
  R.r_min = 10 * S.h;
  R.r_max = std::max(S.diam / 2, R.r_min);
  Rng rng(cfg.seed);

  // window sweep: boundary-centered balls, log-uniform radii
  std::vector<Ball> windows;
  for (int i = 0; i < cfg.n_windows; ++i) {
    Point c = S.point(rng.index(S.size()));
    double r = std::exp(rng.uniform(std::log(R.r_min), std::log(R.r_max)));
    windows.push_back({c, r});
  }
  R.adr = adr_estimate(S, windows);

  R.interior_min = kInf;
  R.exterior_min = kInf;
  Point worst_anchor = windows.front().center;
  double worst_const = kInf;
  for (const Ball& w : windows) {
    double step = w.radius / cfg.corkscrew_step_div;
    auto ic = interior_corkscrew(oracle, w.center, w.radius, step);
    if (!ic) {
      ++R.interior_fail;
      if (worst_const > 0) {
        worst_const = 0;
        worst_anchor = w.center;
      }
    } else {
      R.interior_min = std::min(R.interior_min, ic->constant());
      if (ic->constant() < worst_const) {
        worst_const = ic->constant();
        worst_anchor = w.center;
      }
    }
    auto ec = exterior_corkscrew(oracle, w.center, w.radius, step);
    if (!ec) {
      ++R.exterior_fail;
      R.exterior_fail_scale = std::max(R.exterior_fail_scale, w.radius);
    } else {
      R.exterior_min = std::min(R.exterior_min, ec->constant());
    }
  }
  if (!std::isfinite(R.interior_min)) R.interior_min = 0;
  if (!std::isfinite(R.exterior_min)) R.exterior_min = 0;

  // good-curve pair sweep: shallow anchor + far partner, target separation
  // ratios cycling through 1..64; every 4th pair anchors at the weakest
  // corkscrew window seen above
  static const double lambda_targets[] = {1, 2, 4, 8, 16, 32, 64};
  R.C_max = 0;
  R.c_min = kInf;
  R.lambda_min = kInf;
  R.lambda_max = 0;
  double s0 = std::min(2 * R.r_min, R.r_max);
  for (int i = 0; i < cfg.n_pairs; ++i) {
    double lam = lambda_targets[i % 7];
    Point q = (i % 4 == 3) ? worst_anchor : S.point(rng.index(S.size()));
    auto X = interior_corkscrew(oracle, q, s0, s0 / cfg.corkscrew_step_div);
    if (!X) {
      R.untested_notes.push_back("curve pair skipped: no interior point near "
                                 "a sampled anchor");
      continue;
    }
    double dX = oracle.boundary_distance(X->X);
    double D = std::clamp(lam * dX, R.r_min, 0.9 * R.r_max);
    // far anchor: the sample whose distance from q best matches D
    std::uint32_t q2 = 0;
    double best = kInf;
    for (std::uint32_t s = 0; s < S.size(); ++s) {
      double err = std::abs(dist(S.point(s), q) - D);
      if (err < best) {
        best = err;
        q2 = s;
      }
    }
    double u = std::clamp(D / 2, s0, R.r_max);
    auto Y = interior_corkscrew(oracle, S.point(q2), u,
                                u / cfg.corkscrew_step_div);
    if (!Y) {
      R.untested_notes.push_back("curve pair skipped: no interior point near "
                                 "the far anchor");
      continue;
    }
    double dY = oracle.boundary_distance(Y->X);
    auto res = good_curve(oracle, X->X, Y->X, cfg.rel_step);
    ++R.pairs_run;
    double lam_actual = dist(X->X, Y->X) / std::max(std::min(dX, dY), 1e-12);
    R.lambda_min = std::min(R.lambda_min, lam_actual);
    R.lambda_max = std::max(R.lambda_max, lam_actual);
    if (!res.ok()) {
      ++R.curve_fail;
      R.curve_failures.push_back(res.failure_stage);
    } else {
      R.C_max = std::max(R.C_max, res.curve->C_meas);
      R.c_min = std::min(R.c_min, res.curve->c_meas);
    }
  }
  if (!std::isfinite(R.c_min)) R.c_min = 0;
  if (!std::isfinite(R.lambda_min)) R.lambda_min = 0;

  // multiscale grid stages
  int k_max = static_cast<int>(std::floor(std::log2(1.0 / (10 * S.h))));
  int k_min = static_cast<int>(std::ceil(std::log2(1.0 / S.diam) - 1e-9));
  k_min = std::max(k_min, k_max - 6);
  if (k_min > k_max) {
    R.untested_notes.push_back("grid: no dyadic scale between 10h and diam");
  } else {
    DyadicGrid G = build_grid(S, k_min, k_max);
    for (double eps : cfg.eps_grid) {
      BadSet flags = bad_set(G, S, eps, 2, cfg.threads);
      R.bwgl.emplace_back(eps, carleson_norm(G, flags).norm);
    }
    for (double c0 : cfg.c0_grid) {
      std::vector<char> bad = c0_bad_cubes(G, oracle, S, c0, cfg.threads);
      double sup = 0;
      for (const auto& Q : G.cubes)
        sup = std::max(sup, packing_ratio_from_flags(G, Q, bad));
      R.packing.emplace_back(c0, sup);
    }
  }

  // layer energy at three boundary-centered balls
  R.energy_r = std::clamp(S.diam / 4, R.r_min, R.r_max);
  for (int i = 0; i < 3; ++i) {
    Point c = S.point(rng.index(S.size()));
    try {
      R.energies.push_back(layer_energy(S, {c, R.energy_r}));
    } catch (const ResolutionError& e) {
      R.untested_notes.push_back(std::string("layer_energy: ") + e.what());
    }
  }

  // verdicts, scale-qualified to [r_min, r_max]
  auto note = "at tested scales r in [" + format_double(R.r_min) + ", " +
              format_double(R.r_max) + "]";
  R.v_adr.statistic = R.adr.C_high;
  R.v_adr.note = note;
  R.v_adr.status = (R.adr.used > 0 && R.adr.C_low >= cfg.thr_adr_low &&
                    R.adr.C_high <= cfg.thr_adr_high)
                       ? Verdict::Status::Pass
                       : Verdict::Status::Fail;

  if (R.bwgl.empty()) {
    R.v_ur.status = Verdict::Status::Untested;
    R.v_ur.note = "grid unavailable";
  } else {
    auto mid = std::min_element(R.bwgl.begin(), R.bwgl.end(),
                                [](const auto& a, const auto& b) {
                                  return std::abs(a.first - 0.1) <
                                         std::abs(b.first - 0.1);
                                });
    R.v_ur.statistic = mid->second;
    R.v_ur.note = "Carleson norm at eps=" + format_double(mid->first) + ", " +
                  note;
    R.v_ur.status = mid->second <= cfg.thr_bwgl ? Verdict::Status::Pass
                                                : Verdict::Status::Fail;
  }

  R.v_uniform.statistic = R.c_min;
  R.v_uniform.note = note;
  if (R.pairs_run == 0) {
    R.v_uniform.status = Verdict::Status::Untested;
  } else {
    bool ok = R.interior_fail == 0 && R.interior_min >= cfg.thr_interior &&
              R.curve_fail == 0 && R.c_min >= cfg.thr_c_min &&
              R.C_max <= cfg.thr_c_max;
    R.v_uniform.status = ok ? Verdict::Status::Pass : Verdict::Status::Fail;
  }

  R.v_nta.statistic = R.exterior_min;
  R.v_nta.note = note;
  if (R.v_uniform.status == Verdict::Status::Untested) {
    R.v_nta.status = Verdict::Status::Untested;
  } else {
    bool ok = R.v_uniform.status == Verdict::Status::Pass &&
              R.exterior_fail == 0 && R.exterior_min >= cfg.thr_exterior;
    R.v_nta.status = ok ? Verdict::Status::Pass : Verdict::Status::Fail;
  }

  R.v_chordarc.statistic = R.adr.C_high;
  R.v_chordarc.note = note;
  if (R.v_nta.status == Verdict::Status::Untested) {
    R.v_chordarc.status = Verdict::Status::Untested;
  } else {
    bool ok = R.v_nta.status == Verdict::Status::Pass &&
              R.v_adr.status == Verdict::Status::Pass;
    R.v_chordarc.status = ok ? Verdict::Status::Pass : Verdict::Status::Fail;
  }
  return R;
}

std::string report_to_json(const ClassificationReport& R) {
  ordered_json j;
  j["spec"] = R.spec.name();

  ordered_json cfg;
  cfg["h"] = R.config.h;
  cfg["n_windows"] = R.config.n_windows;
  cfg["n_pairs"] = R.config.n_pairs;
  cfg["eps_grid"] = R.config.eps_grid;
  cfg["c0_grid"] = R.config.c0_grid;
  cfg["rel_step"] = R.config.rel_step;
  cfg["corkscrew_step_div"] = R.config.corkscrew_step_div;
  cfg["threads"] = R.config.threads;
  cfg["thresholds"] = {{"adr_low", R.config.thr_adr_low},
                       {"adr_high", R.config.thr_adr_high},
                       {"interior", R.config.thr_interior},
                       {"exterior", R.config.thr_exterior},
                       {"bwgl", R.config.thr_bwgl},
                       {"c_min", R.config.thr_c_min},
                       {"c_max", R.config.thr_c_max}};
  j["config"] = cfg;

  j["adr"] = {{"r_min", R.r_min},
              {"r_max", R.r_max},
              {"C_low", R.adr.C_low},
              {"C_high", R.adr.C_high},
              {"empty_windows", R.adr.empty_windows},
              {"windows_used", R.adr.used}};
  j["corkscrews"] = {{"interior_min", R.interior_min},
                     {"interior_fail", R.interior_fail},
                     {"exterior_min", R.exterior_min},
                     {"exterior_fail", R.exterior_fail},
                     {"exterior_fail_scale", R.exterior_fail_scale}};
  j["curves"] = {{"pairs", R.pairs_run},
                 {"failures", R.curve_fail},
                 {"failure_stages", R.curve_failures},
                 {"lambda_min", R.lambda_min},
                 {"lambda_max", R.lambda_max},
                 {"C_max", R.C_max},
                 {"c_min", R.c_min}};
  ordered_json bw = ordered_json::array();
  for (auto [eps, norm] : R.bwgl) bw.push_back({{"eps", eps}, {"norm", norm}});
  j["bwgl"] = bw;
  ordered_json pk = ordered_json::array();
  for (auto [c0, ratio] : R.packing)
    pk.push_back({{"c0", c0}, {"ratio", ratio}});
  j["packing"] = pk;
  j["layer_energy"] = {{"r", R.energy_r},
                       {"collar_kappa", 3},
                       {"values", R.energies}};

  ordered_json v;
  auto emit = [&](const char* name, const Verdict& verdict) {
    v[name] = {{"status", status_str(verdict.status)},
               {"statistic", verdict.statistic},
               {"note", verdict.note}};
  };
  emit("ADR", R.v_adr);
  emit("UR", R.v_ur);
  emit("Uniform", R.v_uniform);
  emit("NTA", R.v_nta);
  emit("ChordArc", R.v_chordarc);
  j["verdicts"] = v;
  if (!R.untested_notes.empty()) j["verdicts"]["notes"] = R.untested_notes;

  j["provenance"] = {
      {"seed", R.config.seed},
      {"h", R.config.h},
      {"versions",
       {{"qg", "1.0.0"}, {"avx2", kernels::avx2_active()}}}};
  return j.dump(2) + "\n";
}

std::string report_digest(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text);
  std::ostringstream os;
  os << "domain " << j["spec"].get<std::string>() << "\n";
  os << "  scales  r in [" << j["adr"]["r_min"].dump() << ", "
     << j["adr"]["r_max"].dump() << "]\n";
  os << "  adr     C_low=" << j["adr"]["C_low"].dump()
     << " C_high=" << j["adr"]["C_high"].dump() << "\n";
  os << "  cork    interior>=" << j["corkscrews"]["interior_min"].dump()
     << " exterior>=" << j["corkscrews"]["exterior_min"].dump()
     << " (fail " << j["corkscrews"]["exterior_fail"].dump() << ")\n";
  os << "  curves  C<=" << j["curves"]["C_max"].dump()
     << " c>=" << j["curves"]["c_min"].dump() << " (fail "
     << j["curves"]["failures"].dump() << "/" << j["curves"]["pairs"].dump()
     << ")\n";
  os << "  bwgl   ";
  for (const auto& e : j["bwgl"])
    os << " eps=" << e["eps"].dump() << ":" << e["norm"].dump();
  os << "\n  packing";
  for (const auto& e : j["packing"])
    os << " c0=" << e["c0"].dump() << ":" << e["ratio"].dump();
  os << "\n  verdicts";
  for (auto& [name, verdict] : j["verdicts"].items()) {
    if (name == "notes") continue;
    os << " " << name << "=" << verdict["status"].get<std::string>();
  }
  os << "\n";
  return os.str();
}

}  // namespace qg
