// qg: quantitative-geometry analyses of sampled domain boundaries.
//
// Exit codes: 0 success, 2 precondition/input errors, 3 failed --assert
// verdicts, 64 usage errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qg/access.hpp"
#include "qg/cloud.hpp"
#include "qg/domain.hpp"
#include "qg/dyadic.hpp"
#include "qg/engine.hpp"
#include "qg/flatness.hpp"
#include "qg/geom.hpp"
#include "qg/util.hpp"

namespace {

using qg::Point;
using ordered_json = nlohmann::ordered_json;

struct Common {
  std::string spec;
  std::string cloud;
  double h = 0.005;
  unsigned threads = 1;
  bool json = false;
};

void add_common(CLI::App* cmd, Common* c, bool needs_boundary = true) {
  cmd->set_help_flag("--help", "print help");  // keep --h free
  if (needs_boundary) {
    cmd->add_option("--spec", c->spec, "corpus domain spec, e.g. disk or cantor:4");
    cmd->add_option("--cloud", c->cloud, "boundary cloud file instead of --spec");
    cmd->add_option("--h", c->h, "sampling resolution");
  }
  cmd->add_option("--threads", c->threads, "worker pool cap");
  cmd->add_flag("--json", c->json, "machine output on stdout");
}

qg::SampledBoundary boundary_of(const Common& c) {
  if (!c.cloud.empty()) return qg::load_cloud(c.cloud);
  if (c.spec.empty())
    throw qg::PreconditionError("need --spec or --cloud");
  return qg::sample_boundary(qg::parse_spec(c.spec), c.h);
}

qg::Domain domain_of(const Common& c) {
  if (c.spec.empty())
    throw qg::PreconditionError("this subcommand needs --spec (an oracle)");
  return qg::make_domain(qg::parse_spec(c.spec));
}

Point parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(qg::parse_double(tok));
  if (v.size() == 2) return qg::make_point(v[0], v[1]);
  if (v.size() == 3) return qg::make_point(v[0], v[1], v[2]);
  throw qg::PreconditionError("point must be x,y or x,y,z");
}

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

ordered_json cert_json(const qg::CorkscrewCert& cert) {
  ordered_json j;
  j["kind"] = cert.kind == qg::CorkscrewCert::Kind::Interior ? "interior"
              : cert.kind == qg::CorkscrewCert::Kind::Exterior
                  ? "exterior"
                  : "c0_exterior";
  j["anchor"] = {cert.x.x, cert.x.y, cert.x.z};
  j["r"] = cert.r;
  j["X"] = {cert.X.x, cert.X.y, cert.X.z};
  j["radius"] = cert.radius;
  j["constant"] = cert.constant();
  if (cert.witness)
    j["witness"] = {cert.witness->x, cert.witness->y, cert.witness->z};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantitative geometry of sampled domain boundaries"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file");
  app.allow_config_extras(false);

  Common c;
  std::string out, point_a, point_b, side = "interior", assert_verdict;
  double r = 0.25, step = 0, eps = 0.1, A = 2, c0 = 0.05, kappa = 3;
  double ck_c = 0.5, ck_C = 1.5, rel_step = 1.0 / 64;
  int k_min = 0, k_max = 4;
  std::uint64_t seed = 0;
  std::string report_in;

  auto* gen = app.add_subcommand("generate", "sample a corpus boundary to a cloud file");
  add_common(gen, &c);
  gen->add_option("--out", out, "output path (default stdout)");

  auto* grid = app.add_subcommand("grid", "build and verify the dyadic grid");
  add_common(grid, &c);
  grid->add_option("--kmin", k_min, "coarsest generation");
  grid->add_option("--kmax", k_max, "finest generation");
  grid->add_option("--out", out, "grid export path");

  auto* beta = app.add_subcommand("beta", "bilateral beta numbers per cube");
  add_common(beta, &c);
  beta->add_option("--kmin", k_min);
  beta->add_option("--kmax", k_max);
  beta->add_option("--eps", eps, "flatness threshold");
  beta->add_option("--A", A, "window dilation");
  beta->add_option("--out", out, "CSV path (default stdout)");

  auto* cork = app.add_subcommand("corkscrew", "corkscrew certificate search");
  add_common(cork, &c);
  cork->add_option("--at", point_a, "anchor point x,y[,z]")->required();
  cork->add_option("--r", r, "scale");
  cork->add_option("--step", step, "lattice step (default r/40)");
  cork->add_option("--side", side)->check(CLI::IsMember({"interior", "exterior", "flatness"}));
  cork->add_option("--eps", eps, "flatness route: beta threshold");
  cork->add_option("--c", ck_c, "flatness route: interior corkscrew constant");
  cork->add_option("--C", ck_C, "flatness route: uniform-domain constant");
  cork->add_option("--out", out);

  auto* curve = app.add_subcommand("curve", "good curve between interior points");
  add_common(curve, &c);
  curve->add_option("--from", point_a, "start point x,y[,z]")->required();
  curve->add_option("--to", point_b, "end point x,y[,z]")->required();
  curve->add_option("--rel-step", rel_step, "lattice step relative to scale");
  curve->add_option("--out", out, "polyline path (sidecar at <out>.json)");

  auto* pack = app.add_subcommand("pack", "dyadic exterior-access packing ratios");
  add_common(pack, &c);
  pack->add_option("--kmin", k_min);
  pack->add_option("--kmax", k_max);
  pack->add_option("--c0", c0, "exterior corkscrew constant to test");
  pack->add_option("--out", out);

  auto* energy = app.add_subcommand("energy", "single-layer square-function energy");
  add_common(energy, &c);
  energy->add_option("--at", point_a, "ball center x,y[,z]")->required();
  energy->add_option("--r", r, "ball radius");
  energy->add_option("--kappa", kappa, "collar width in units of h");
  energy->add_option("--out", out);

  auto* classify = app.add_subcommand("classify", "full domain classification report");
  add_common(classify, &c);
  classify->add_option("--seed", seed, "sweep RNG seed");
  classify->add_option("--assert", assert_verdict,
                       "exit 3 unless this verdict passes "
                       "(adr|ur|uniform|nta|chordarc|all)")
      ->expected(0, 1)
      ->default_str("all");
  classify->add_option("--out", out, "report path (default stdout)");

  auto* report = app.add_subcommand("report", "human-readable digest of a report JSON");
  report->add_option("--in", report_in, "report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (gen->parsed()) {
      auto S = boundary_of(c);
      if (out.empty()) {
        qg::save_cloud(S, "/dev/stdout");
      } else {
        qg::save_cloud(S, out);
      }
      return 0;
    }

    if (grid->parsed()) {
      auto S = boundary_of(c);
      auto G = qg::build_grid(S, k_min, k_max);
      if (!out.empty()) write_or_print(out, qg::export_grid(G, S));
      auto rep = qg::verify_grid(G, S);
      ordered_json j;
      j["cubes"] = G.cubes.size();
      j["partition_ok"] = rep.partition_ok;
      j["nesting_ok"] = rep.nesting_ok;
      j["unique_ancestor_ok"] = rep.unique_ancestor_ok;
      j["C1"] = rep.C1;
      j["a0"] = rep.a0;
      j["thin_tau"] = rep.thin_tau;
      j["thin_fraction"] = rep.thin_fraction;
      j["thin_eta"] = rep.thin_eta;
      std::cout << j.dump(2) << "\n";
      return rep.partition_ok && rep.nesting_ok && rep.unique_ancestor_ok ? 0
                                                                          : 2;
    }

    if (beta->parsed()) {
      auto S = boundary_of(c);
      auto G = qg::build_grid(S, k_min, k_max);
      auto flags = qg::bad_set(G, S, eps, A, c.threads);
      write_or_print(out, qg::beta_csv(G, S, flags));
      return 0;
    }

    if (cork->parsed()) {
      auto dom = domain_of(c);
      Point at = parse_point(point_a);
      double st = step > 0 ? step : r / 40;
      ordered_json j;
      if (side == "flatness") {
        auto S = boundary_of(c);
        auto res = qg::exterior_corkscrew_via_flatness(*dom.oracle, S, at, r,
                                                       eps, ck_c, ck_C);
        j["ok"] = res.ok();
        if (res.ok()) {
          j["cert"] = cert_json(*res.cert);
          j["window"] = {{"x1", {res.window->x1.x, res.window->x1.y}},
                         {"r1", res.window->r1}};
        } else {
          j["failed_stage"] =
              res.failed == qg::FlatnessRouteResult::Stage::RhoScan
                  ? "rho_scan"
                  : "classification";
          j["detail"] = res.detail;
        }
      } else {
        auto cert = side == "interior"
                        ? qg::interior_corkscrew(*dom.oracle, at, r, st)
                        : qg::exterior_corkscrew(*dom.oracle, at, r, st);
        j["ok"] = cert.has_value();
        if (cert) j["cert"] = cert_json(*cert);
      }
      write_or_print(out, j.dump(2) + "\n");
      return 0;
    }

    if (curve->parsed()) {
      auto dom = domain_of(c);
      auto res = qg::good_curve(*dom.oracle, parse_point(point_a),
                                parse_point(point_b), rel_step);
      if (!res.ok()) {
        std::cerr << "good curve failed: " << res.failure_stage << "\n";
        return 2;
      }
      if (!out.empty()) qg::save_curve(*res.curve, out);
      ordered_json j;
      j["C_meas"] = res.curve->C_meas;
      j["c_meas"] = res.curve->c_meas;
      j["case_trace"] = res.curve->case_trace;
      j["vertices"] = res.curve->curve.vertices.size();
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (pack->parsed()) {
      auto dom = domain_of(c);
      auto S = boundary_of(c);
      auto G = qg::build_grid(S, k_min, k_max);
      auto bad = qg::c0_bad_cubes(G, *dom.oracle, S, c0, c.threads);
      double sup = 0;
      for (const auto& Q : G.cubes)
        sup = std::max(sup, qg::packing_ratio_from_flags(G, Q, bad));
      ordered_json j;
      j["c0"] = c0;
      j["sup_ratio"] = sup;
      ordered_json per = ordered_json::array();
      for (int id : G.generations.front())
        per.push_back(qg::packing_ratio_from_flags(G, G.cubes[id], bad));
      j["top_cube_ratios"] = per;
      write_or_print(out, j.dump(2) + "\n");
      return 0;
    }

    if (energy->parsed()) {
      auto S = boundary_of(c);
      double e = qg::layer_energy(S, {parse_point(point_a), r}, kappa);
      ordered_json j;
      j["r"] = r;
      j["kappa"] = kappa;
      j["energy"] = e;
      write_or_print(out, j.dump(2) + "\n");
      return 0;
    }

    if (classify->parsed()) {
      qg::AnalysisConfig cfg;
      cfg.h = c.h;
      cfg.threads = c.threads;
      cfg.seed = seed;
      auto rep = qg::classify_domain(qg::parse_spec(c.spec), cfg);
      std::string doc = qg::report_to_json(rep);
      if (!out.empty()) write_or_print(out, doc);
      if (out.empty() || c.json) std::cout << doc;
      if (classify->count("--assert")) {
        auto check = [&](const std::string& name, const qg::Verdict& v) {
          bool wanted = assert_verdict == "all" || assert_verdict.rfind(name, 0) == 0;
          return !wanted || v.status == qg::Verdict::Status::Pass;
        };
        if (assert_verdict.empty()) assert_verdict = "all";
        bool ok = check("adr", rep.v_adr) && check("ur", rep.v_ur) &&
                  check("uniform", rep.v_uniform) && check("nta", rep.v_nta) &&
                  check("chordarc", rep.v_chordarc);
        if (!ok) return 3;
      }
      return 0;
    }

    if (report->parsed()) {
      std::ifstream f(report_in);
      if (!f) throw qg::PreconditionError("cannot read " + report_in);
      std::stringstream ss;
      ss << f.rdbuf();
      std::cout << qg::report_digest(ss.str());
      return 0;
    }
  } catch (const qg::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 64;
}
