// suprad: radial supercritical elliptic ODE toolkit.
//
// Subcommands: classify, shoot, limit-shoot, singular, intersect, bifurcate,
// morse, verify.  Exit codes: 0 ok, 1 usage/parse, 2 numerical
// nonconvergence, 3 regime violation, 4 precondition failure.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "suprad/bifurcation.hpp"
#include "suprad/errors.hpp"
#include "suprad/intersect.hpp"
#include "suprad/morse.hpp"
#include "suprad/nonlinearity.hpp"
#include "suprad/radial_ode.hpp"
#include "suprad/singular.hpp"
#include "suprad/transforms.hpp"
#include "suprad/verification.hpp"

using json = nlohmann::ordered_json;
using namespace suprad;

namespace {

json num_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out_path);
    if (!os) throw ParseError("cannot open output file " + out_path);
    os << j.dump(2) << "\n";
  }
}

void write_file_csv(const std::function<void(std::ostream&)>& writer,
                    const std::string& path) {
  if (path.empty())
    throw ParseError("csv output requires --out <path>");
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open output file " + path);
  writer(os);
}

// Minimal SVG polyline chart.
void write_svg(const std::string& path, const std::vector<double>& xs,
               const std::vector<double>& ys, const std::string& xlabel,
               const std::string& ylabel) {
  if (xs.empty()) throw NumericError("svg: empty data");
  double x0 = xs[0], x1 = xs[0], y0 = ys[0], y1 = ys[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x0 = std::min(x0, xs[i]);
    x1 = std::max(x1, xs[i]);
    y0 = std::min(y0, ys[i]);
    y1 = std::max(y1, ys[i]);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const int W = 800, H = 560, M = 60;
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open output file " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                M, H - M, W - M, H - M);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" "
                "stroke=\"black\"/>\n",
                M, M, M, H - M);
  os << buf;
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
        "points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = M + (W - 2 * M) * (xs[i] - x0) / (x1 - x0);
    const double py = H - M - (H - 2 * M) * (ys[i] - y0) / (y1 - y0);
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
    os << buf;
  }
  os << "\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-size=\"12\">%s: [%.6g, %.6g]"
                "</text>\n",
                M, H - M + 30, xlabel.c_str(), x0, x1);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-size=\"12\">%s: [%.6g, %.6g]"
                "</text>\n",
                M, M - 10, ylabel.c_str(), y0, y1);
  os << buf;
  os << "</svg>\n";
}

double q_for(const Nonlinearity& f, int N, double q_flag) {
  if (q_flag > 0.0) return q_flag;
  return classify(f, N).q;
}

Profile parse_profile(const std::string& spec, const Nonlinearity& f, int N,
                      double q, double b, double tol,
                      std::vector<std::shared_ptr<void>>& keep) {
  auto take_center = [&](const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw ParseError("profile '" + s + "' needs a center value");
    return std::stod(s.substr(colon + 1));
  };
  ShootOpts o;
  o.tol = tol;
  o.r_max = 1.05 * b;
  if (spec.rfind("regular", 0) == 0) {
    auto sol = std::make_shared<RadialSolution>(
        shoot_regular(f, N, take_center(spec), o));
    keep.push_back(sol);
    return Profile::from_solution(sol);
  }
  if (spec.rfind("limit", 0) == 0) {
    auto sol = std::make_shared<RadialSolution>(
        shoot_limit(f, N, q, take_center(spec), o));
    keep.push_back(sol);
    return Profile::from_solution(sol);
  }
  if (spec == "singular") {
    SingularOpts so;
    so.r_max = 1.05 * b;
    auto sol =
        std::make_shared<SingularSolution>(construct_singular(f, N, q, so));
    keep.push_back(sol);
    return Profile::from_singular(sol);
  }
  if (spec == "singular-exact") {
    return Profile::from_function(
        [f, N, q](double s) { return exact_singular_limit(f, N, q, s); },
        1e-12, 1.05 * b, true);
  }
  if (spec.rfind("critical", 0) == 0) {
    const double sigma = take_center(spec);
    return Profile::from_function(
        [f, N, sigma](double s) { return exact_limit_critical(f, N, sigma, s); },
        0.0, 1.05 * b, false);
  }
  throw ParseError("unknown profile '" + spec +
                   "' (regular:<rho>|limit:<sigma>|singular|singular-exact|"
                   "critical:<sigma>)");
}

int run(int argc, char** argv) {
  CLI::App app{"radial supercritical elliptic ODE toolkit"};
  app.require_subcommand(1);

  std::string f_spec, out_path, json_path, svg_path;
  int N = 3;
  double tol = 1e-9;

  // classify
  auto* cmd_classify = app.add_subcommand("classify", "growth exponents and regime");
  cmd_classify->add_option("--f", f_spec, "nonlinearity spec")->required();
  cmd_classify->add_option("--N", N, "space dimension")->required();
  cmd_classify->add_option("--out", out_path, "output path (default stdout)");

  // shoot
  double rho = 1.0, r_max = 1e3;
  bool stop_at_zero = false;
  auto* cmd_shoot = app.add_subcommand("shoot", "integrate the regular problem");
  cmd_shoot->add_option("--f", f_spec)->required();
  cmd_shoot->add_option("--N", N)->required();
  cmd_shoot->add_option("--rho", rho, "center value")->required();
  cmd_shoot->add_option("--r-max", r_max, "integration end");
  cmd_shoot->add_option("--tol", tol, "adaptive tolerance");
  cmd_shoot->add_flag("--stop-at-zero", stop_at_zero, "stop at the first zero");
  cmd_shoot->add_option("--out", out_path, "CSV path (r,u,du)");
  cmd_shoot->add_option("--svg", svg_path, "SVG line chart path");

  // limit-shoot
  double sigma = 1.0, q_flag = 0.0;
  auto* cmd_limit = app.add_subcommand("limit-shoot", "integrate the limit problem");
  cmd_limit->add_option("--f", f_spec)->required();
  cmd_limit->add_option("--N", N)->required();
  cmd_limit->add_option("--sigma", sigma, "center value")->required();
  cmd_limit->add_option("--s-max", r_max, "integration end");
  cmd_limit->add_option("--q", q_flag, "growth conjugate (default: classify)");
  cmd_limit->add_option("--tol", tol);
  cmd_limit->add_option("--out", out_path, "CSV path (r,u,du)");

  // singular
  auto* cmd_sing = app.add_subcommand("singular", "construct the singular solution");
  cmd_sing->add_option("--f", f_spec)->required();
  cmd_sing->add_option("--N", N)->required();
  cmd_sing->add_option("--q", q_flag);
  cmd_sing->add_option("--r-max", r_max);
  cmd_sing->add_option("--tol", tol);
  cmd_sing->add_option("--out", out_path, "CSV path (r,theta,u_star,du_star)");
  cmd_sing->add_option("--json", json_path, "JSON summary path (default stdout)");

  // intersect
  std::string p0_spec, p1_spec;
  double a_lo = 0.0, b_hi = 10.0;
  auto* cmd_int = app.add_subcommand("intersect", "count profile intersections");
  cmd_int->add_option("--f", f_spec)->required();
  cmd_int->add_option("--N", N)->required();
  cmd_int->add_option("--p0", p0_spec, "first profile")->required();
  cmd_int->add_option("--p1", p1_spec, "second profile")->required();
  cmd_int->add_option("--a", a_lo, "interval start");
  cmd_int->add_option("--b", b_hi, "interval end")->required();
  cmd_int->add_option("--q", q_flag);
  cmd_int->add_option("--tol", tol);
  cmd_int->add_option("--out", out_path, "JSON path (default stdout)");

  // bifurcate
  double rho_min = 1e-2, rho_max = 1e3;
  int points = 200, jobs = 1;
  auto* cmd_bif = app.add_subcommand("bifurcate", "sweep the bifurcation diagram");
  cmd_bif->add_option("--f", f_spec)->required();
  cmd_bif->add_option("--N", N)->required();
  cmd_bif->add_option("--rho-min", rho_min);
  cmd_bif->add_option("--rho-max", rho_max);
  cmd_bif->add_option("--points", points);
  cmd_bif->add_option("--jobs", jobs, "worker threads (results identical)");
  cmd_bif->add_option("--tol", tol);
  cmd_bif->add_option("--out", out_path, "CSV path (rho,mu,dmu_drho)");
  cmd_bif->add_option("--json", json_path, "JSON summary path (default stdout)");
  cmd_bif->add_option("--svg", svg_path, "SVG chart path");

  // morse
  auto* cmd_morse = app.add_subcommand("morse", "Morse-index diagnostics");
  cmd_morse->add_option("--f", f_spec)->required();
  cmd_morse->add_option("--N", N)->required();
  cmd_morse->add_option("--out", out_path, "JSON path (default stdout)");

  // verify
  std::string suite = "all";
  auto* cmd_verify = app.add_subcommand("verify", "run the acceptance suite");
  cmd_verify->add_option("--suite", suite, "all | core | <criterion id>");
  cmd_verify->add_option("--jobs", jobs, "worker threads (results identical)");
  cmd_verify->add_option("--out", out_path, "JSON artifact path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (cmd_classify->parsed()) {
    auto f = make_builtin(f_spec);
    const ExponentReport r = classify(f, N);
    json j;
    j["f"] = f_spec;
    j["N"] = r.N;
    j["q"] = r.q;
    j["p"] = num_or_inf(r.p);
    j["q_S"] = r.q_S;
    j["q_JL"] = r.q_JL;
    j["p_S"] = num_or_inf(r.p_S);
    j["p_JL"] = num_or_inf(r.p_JL);
    j["k"] = r.k;
    j["regime"] = regime_name(r.regime);
    j["at_jl_boundary"] = r.at_jl_boundary;
    emit(j, out_path);
    return 0;
  }

  if (cmd_shoot->parsed() || cmd_limit->parsed()) {
    auto f = make_builtin(f_spec);
    ShootOpts o;
    o.tol = tol;
    o.r_max = r_max;
    o.stop_at_first_zero = stop_at_zero;
    RadialSolution sol =
        cmd_shoot->parsed()
            ? shoot_regular(f, N, rho, o)
            : shoot_limit(f, N, q_for(f, N, q_flag), sigma, o);
    if (!out_path.empty())
      write_file_csv([&](std::ostream& os) { write_csv(sol, os); }, out_path);
    if (!svg_path.empty()) write_svg(svg_path, sol.r, sol.u, "r", "u");
    std::printf(
        "%s f=%s N=%d center=%.17g nodes=%zu end=%.6g first_zero=%s tol=%g\n",
        cmd_shoot->parsed() ? "shoot" : "limit-shoot", f_spec.c_str(), N,
        cmd_shoot->parsed() ? rho : sigma, sol.r.size(), sol.back_radius(),
        sol.first_zero ? std::to_string(*sol.first_zero).c_str() : "none",
        tol);
    return 0;
  }

  if (cmd_sing->parsed()) {
    auto f = make_builtin(f_spec);
    const double q = q_for(f, N, q_flag);
    SingularOpts so;
    so.r_max = r_max;
    SingularSolution s = construct_singular(f, N, q, so);
    if (!out_path.empty())
      write_file_csv([&](std::ostream& os) { write_csv(s, os); }, out_path);
    json j;
    j["f"] = f_spec;
    j["N"] = N;
    j["q"] = q;
    j["k"] = s.k;
    j["t_start"] = s.t_start;
    j["t_switch"] = s.t_switch;
    j["r0_star"] = s.r0_star ? json(*s.r0_star) : json(nullptr);
    j["D"] = s.diag.D;
    j["lambda_plus"] = {s.diag.lambda_plus.real(), s.diag.lambda_plus.imag()};
    j["lambda_minus"] = {s.diag.lambda_minus.real(),
                         s.diag.lambda_minus.imag()};
    j["mu_decay"] = s.diag.mu_decay;
    j["phi_gap_at_start"] = s.diag.phi_gap_at_start;
    j["overlap_gap"] = s.diag.overlap_gap;
    j["tol"] = s.tol;
    emit(j, json_path);
    return 0;
  }

  if (cmd_int->parsed()) {
    auto f = make_builtin(f_spec);
    const double q = q_for(f, N, q_flag);
    std::vector<std::shared_ptr<void>> keep;
    Profile P0 = parse_profile(p0_spec, f, N, q, b_hi, tol, keep);
    Profile P1 = parse_profile(p1_spec, f, N, q, b_hi, tol, keep);
    auto rep = count_intersections(P0, P1, a_lo, b_hi);
    json j;
    j["interval"] = {rep.a, rep.b};
    j["count"] = rep.count;
    j["zeros"] = rep.zeros;
    j["near_tangencies"] = rep.near_tangencies;
    j["truncated"] = rep.truncated;
    j["tol"] = tol;
    emit(j, out_path);
    return 0;
  }

  if (cmd_bif->parsed()) {
    auto f = make_builtin(f_spec);
    SweepOpts so;
    so.rho_min = rho_min;
    so.rho_max = rho_max;
    so.points = points;
    so.jobs = jobs;
    so.tol = tol;
    BifurcationCurve c = sweep_curve(f, N, so);
    if (!out_path.empty())
      write_file_csv(
          [&](std::ostream& os) {
            os << "rho,mu,dmu_drho\n";
            char buf[128];
            for (const auto& s : c.samples) {
              if (!s.ok) continue;
              std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.rho,
                            s.mu, s.dmu_drho);
              os << buf;
            }
          },
          out_path);
    if (!svg_path.empty()) {
      std::vector<double> xs, ys;
      for (const auto& s : c.samples)
        if (s.ok) {
          xs.push_back(std::log10(s.rho));
          ys.push_back(s.mu);
        }
      write_svg(svg_path, xs, ys, "log10 rho", "mu");
    }
    json j;
    j["f"] = f_spec;
    j["N"] = N;
    j["extension"] = c.ext_record;
    j["mu_star"] = c.mu_star ? json(*c.mu_star) : json(nullptr);
    j["turning_points"] = c.turning_points;
    j["crossings"] = c.crossings_of_mu_star;
    j["classification"] = c.classification;
    j["tol"] = tol;
    emit(j, json_path);
    return 0;
  }

  if (cmd_morse->parsed()) {
    auto f = make_builtin(f_spec);
    MorseReport m = morse_regime_check(f, N);
    json j;
    j["f"] = f_spec;
    j["N"] = N;
    j["q"] = m.q;
    j["regime"] = regime_name(m.regime);
    j["c_star"] = m.c_star;
    j["hardy"] = m.hardy;
    json zc = json::array();
    for (auto& [eps, n] : m.zero_counts) zc.push_back({{"eps", eps}, {"count", n}});
    j["zero_counts"] = zc;
    j["verdict"] = morse_verdict_name(m.verdict);
    emit(j, out_path);
    return 0;
  }

  if (cmd_verify->parsed()) {
    const bool with_determinism = suite == "all";
    VerifyOpts vo;
    vo.jobs = jobs;
    vo.suite = with_determinism ? "core" : suite;
    auto res = run_acceptance(vo);
    bool all_pass = true;
    json items = json::array();
    for (const auto& r : res) {
      std::printf("%s %2d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.details.c_str());
      all_pass = all_pass && r.pass;
      items.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"details", r.details}});
    }
    if (with_determinism) {
      // criterion 14: repeated runs with different job counts must produce
      // byte-identical artifacts
      const std::string self = argv[0];
      const std::string tag = std::to_string(::getpid());
      const std::string t1 = "/tmp/suprad_verify_" + tag + "_j1.json";
      const std::string t2 = "/tmp/suprad_verify_" + tag + "_j8.json";
      const std::string base =
          "\"" + self + "\" verify --suite core --out ";
      const int rc1 =
          std::system((base + t1 + " --jobs 1 > /dev/null").c_str());
      const int rc2 =
          std::system((base + t2 + " --jobs 8 > /dev/null").c_str());
      bool identical = false;
      if (rc1 != -1 && rc2 != -1) {
        std::ifstream a(t1, std::ios::binary), b(t2, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        identical = a.good() == b.good() && sa.str() == sb.str() &&
                    !sa.str().empty();
      }
      std::remove(t1.c_str());
      std::remove(t2.c_str());
      std::printf("%s 14 determinism: --jobs 1 and --jobs 8 artifacts %s\n",
                  identical ? "PASS" : "FAIL",
                  identical ? "byte-identical" : "differ");
      all_pass = all_pass && identical;
      items.push_back({{"id", 14},
                       {"name", "determinism"},
                       {"pass", identical},
                       {"details", identical ? "artifacts byte-identical"
                                             : "artifacts differ"}});
    }
    json j;
    j["suite"] = suite;
    j["criteria"] = items;
    j["all_pass"] = all_pass;
    if (!out_path.empty()) emit(j, out_path);
    return all_pass ? 0 : 2;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ConstraintError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const RegimeError& e) {
    std::fprintf(stderr, "regime violation: %s\n", e.what());
    return 3;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "precondition failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
