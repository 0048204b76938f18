// selfsim: command-line front end for the self-similar profile library.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "selfsim/asymptotics.hpp"
#include "selfsim/classifier.hpp"
#include "selfsim/critical_search.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/io.hpp"
#include "selfsim/params.hpp"
#include "selfsim/phase.hpp"
#include "selfsim/profile.hpp"

namespace {

using namespace selfsim;
using io::json;

enum Exit { kOk = 0, kNumerical = 1, kConfig = 2, kUnresolved = 3 };

struct Common {
  std::optional<double> m, p, sigma;
  std::optional<int> dim;
  bool allow_sigma0 = false;
  IntegrationControls controls;
  std::string out;
  std::string format = "csv";
  bool no_meta = false;
  int jobs = 1;
};

struct Amplitude {
  std::optional<double> A;
  std::optional<std::string> C;  // text so that "inf" is accepted
};

Problem make_problem(const Common& c) {
  if (!c.m || !c.p || !c.sigma || !c.dim) {
    throw ParameterError("--m, --p, --sigma and --dim are required");
  }
  return Problem({*c.m, *c.p, *c.sigma, *c.dim, c.allow_sigma0});
}

double parse_C(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ParameterError("--C must be a number or 'inf', got '" + s + "'");
  return v;
}

double amplitude_of(const Problem& pb, const Amplitude& a) {
  if (a.A && a.C) throw ParameterError("give either --A or --C, not both");
  if (a.A) return *a.A;
  if (a.C) {
    const double C = parse_C(*a.C);
    if (std::isinf(C)) throw ParameterError("--C inf has no finite amplitude; use the phase command");
    return amplitude_of_shoot(pb.params(), C);
  }
  throw ParameterError("an amplitude is required (--A or --C)");
}

std::string meta_line(const Common& c, const std::string& cmd) {
  if (c.no_meta) return {};
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("generated=") + buf + " command=" + cmd;
}

// Data goes to --out when given, otherwise to stdout; the summary line goes
// to whichever stream the data did not.
struct Output {
  std::ofstream file;
  std::ostream* data = &std::cout;
  std::ostream* summary = &std::cerr;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw ParameterError("cannot open output file '" + path + "'");
    data = &file;
    summary = &std::cout;
  }
};

void emit_table(const Common& c, const io::Table& t, Output& out) {
  if (c.format == "json") {
    *out.data << io::table_to_json(t).dump(2) << '\n';
  } else {
    io::write_csv(*out.data, t);
  }
}

void emit_json(const json& j, Output& out) { *out.data << j.dump(2) << '\n'; }

int replot(const Common& c, const std::string& path, const std::string& cmd) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read '" + path + "'");
  io::Table t = io::read_csv(in);
  t.leading_comments.clear();
  const std::string meta = meta_line(c, cmd + " --replot-from");
  if (!meta.empty()) t.leading_comments.push_back("# " + meta);
  Output out(c.out);
  emit_table(c, t, out);
  *out.summary << "replot " << path << " rows=" << t.rows.size() << '\n';
  return kOk;
}

int cmd_constants(const Common& c) {
  const Problem pb = make_problem(c);
  const auto vp = vss_predicates(pb.params());
  json j = io::to_json(pb.constants());
  j["params"] = io::to_json(pb.params());
  j["tail_integrable"] = vp.tail_integrable;
  Output out(c.out);
  emit_json(j, out);
  return kOk;
}

int cmd_expand(const Common& c, double A, const std::string& order, const std::vector<double>& xs) {
  const Problem pb = make_problem(c);
  SeriesOrder so;
  if (order == "2") so = SeriesOrder::kTwoTerm;
  else if (order == "full") so = SeriesOrder::kFull;
  else throw ParameterError("--order must be 2 or full");
  const OriginExpansion ex = origin_expansion(pb, A, so);
  json j = io::to_json(ex);
  json vals = json::array();
  for (double x : xs) {
    const SeriesValue v = origin_eval(ex, pb, x);
    vals.push_back({{"xi", x}, {"f", v.f}, {"fm_deriv", v.fm_deriv}});
  }
  j["values"] = vals;
  Output out(c.out);
  emit_json(j, out);
  return kOk;
}

int cmd_profile(const Common& c, const Amplitude& amp, int per_decade, double xi_start) {
  const Problem pb = make_problem(c);
  const double A = amplitude_of(pb, amp);
  IntegrationControls ic = c.controls;
  ic.output_per_decade = per_decade;
  ic.xi_start = xi_start;
  const ProfileTrajectory traj = integrate_profile(pb, A, ic);
  Output out(c.out);
  emit_table(c, io::profile_table(pb, traj, meta_line(c, "profile")), out);
  *out.summary << "profile A=" << io::fmt(A) << " event=" << to_string(traj.terminal_event)
               << " xi_end=" << io::fmt(traj.samples.back().xi)
               << " samples=" << traj.samples.size() << '\n';
  return kOk;
}

struct PhaseFlags {
  double delta = 1e-4;
  std::optional<double> x_stop;
  bool no_stop_p2 = false;
  bool through_region = false;
};

int cmd_phase(const Common& c, const Amplitude& amp, const PhaseFlags& f) {
  const Problem pb = make_problem(c);
  PhaseControls pc;
  pc.rel_tol = c.controls.rel_tol;
  pc.eta1_max = std::log(c.controls.xi_max);
  pc.max_steps = c.controls.max_steps;
  pc.stop_at_p2 = !f.no_stop_p2;
  pc.stop_on_region = !f.through_region;
  pc.x_stop = f.x_stop;
  PhaseState2 start;
  if (amp.A && amp.C) throw ParameterError("give either --A or --C, not both");
  if (amp.A) {
    start = shot_start(pb, *amp.A, c.controls);
  } else if (amp.C) {
    start = launch_on_unstable_manifold(pb, parse_C(*amp.C), f.delta);
  } else {
    throw ParameterError("a shoot is required (--A or --C)");
  }
  const PhaseTrajectory traj = integrate_phase(pb, start, pc);
  Output out(c.out);
  emit_table(c, io::phase_table(traj, meta_line(c, "phase")), out);
  *out.summary << "phase omega_tag=" << to_string(traj.omega_tag)
               << " eta1_end=" << io::fmt(traj.samples.back().eta1)
               << " samples=" << traj.samples.size() << '\n';
  return kOk;
}

int cmd_classify(const Common& c, const Amplitude& amp) {
  const Problem pb = make_problem(c);
  const double A = amplitude_of(pb, amp);
  const ProfileClass pc = classify(pb, A, c.controls);
  Output out(c.out);
  emit_json(io::to_json(pc, A, shoot_of_amplitude(pb.params(), A)), out);
  *out.summary << "classify A=" << io::fmt(A) << " kind=" << to_string(pc.kind) << '\n';
  return pc.kind == ProfileKind::kUnresolved ? kUnresolved : kOk;
}

std::vector<double> parse_grid(const std::string& spec) {
  // kind:lo:hi:n with kind in {log, lin}
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin")) {
    throw ParameterError("--grid must look like log:LO:HI:N or lin:LO:HI:N");
  }
  double lo = 0, hi = 0;
  long n = 0;
  try {
    lo = std::stod(parts[1]);
    hi = std::stod(parts[2]);
    n = std::stol(parts[3]);
  } catch (const std::exception&) {
    throw ParameterError("--grid bounds must be numbers");
  }
  if (n < 1) throw ParameterError("--grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) throw ParameterError("--grid needs 0 < LO <= HI");
  if (n > 1 && !(hi > lo)) throw ParameterError("--grid needs LO < HI for more than one point");
  std::vector<double> g;
  for (long i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g.push_back(parts[0] == "log" ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  g.back() = hi;
  return g;
}

int cmd_sweep(const Common& c, const std::string& grid) {
  const Problem pb = make_problem(c);
  const SweepResult res = sweep(pb, parse_grid(grid), c.controls, c.jobs);
  Output out(c.out);
  emit_table(c, io::sweep_table(res, meta_line(c, "sweep")), out);
  std::size_t unresolved = 0;
  for (const auto& e : res.entries) unresolved += e.result.kind == ProfileKind::kUnresolved;
  *out.summary << "sweep points=" << res.entries.size() << " unresolved=" << unresolved
               << " ordering=" << (res.ordering_ok ? "ok" : "VIOLATED") << '\n';
  if (!res.ordering_ok) {
    std::cerr << "consistency alarm: " << res.alarm << " (tolerances too loose?)\n";
    return kNumerical;
  }
  return unresolved == res.entries.size() ? kUnresolved : kOk;
}

int cmd_find_critical(const Common& c, const std::string& target, double tol_A) {
  const Problem pb = make_problem(c);
  SearchControls sc;
  sc.integration = c.controls;
  sc.tol_A = tol_A;
  SearchResult r;
  if (target == "a-star") r = find_a_star_upper(pb, sc);
  else if (target == "a-lower") r = find_a_star_lower(pb, sc);
  else if (target == "a-zero") r = find_a_zero(pb, sc);
  else throw ParameterError("--target must be a-star, a-lower or a-zero");
  Output out(c.out);
  json j = io::to_json(r);
  j["params"] = io::to_json(pb.params());
  emit_json(j, out);
  *out.summary << "find-critical target=" << to_string(r.target) << " midpoint=" << io::fmt(r.midpoint)
               << " bracket=[" << io::fmt(r.lo) << "," << io::fmt(r.hi) << "]"
               << " iterations=" << r.iterations << '\n';
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profiles of u_t = Lap(u^m) - |x|^sigma u^p"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");

  Common c;
  app.add_option("--m", c.m, "diffusion exponent m > 1");
  app.add_option("--p", c.p, "absorption exponent p > m");
  app.add_option("--sigma", c.sigma, "weight exponent sigma > 0");
  app.add_option("--dim", c.dim, "space dimension N >= 1");
  app.add_flag("--allow-sigma0", c.allow_sigma0, "admit sigma = 0 (constant-solution regression only)");
  app.add_option("--rel-tol", c.controls.rel_tol, "relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", c.controls.abs_tol, "absolute tolerance")->capture_default_str();
  app.add_option("--xi-max", c.controls.xi_max, "largest radius")->capture_default_str();
  app.add_option("--f-floor", c.controls.f_floor, "vanish threshold for f")->capture_default_str();
  app.add_option("--max-steps", c.controls.max_steps, "step budget")->capture_default_str();
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--no-meta", c.no_meta, "omit the generated= comment line");
  app.add_option("--jobs", c.jobs, "concurrent classifications in sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* constants = app.add_subcommand("constants", "derived constants as JSON");

  auto* expand = app.add_subcommand("expand", "origin series coefficients as JSON");
  double exp_A = 1.0;
  std::string exp_order = "full";
  std::vector<double> exp_xi;
  expand->add_option("--A", exp_A, "amplitude f(0)")->capture_default_str();
  expand->add_option("--order", exp_order, "2 or full")->capture_default_str();
  expand->add_option("--xi", exp_xi, "radii at which to evaluate the series");

  Amplitude amp;
  std::string replot_from;
  auto* profile = app.add_subcommand("profile", "integrate one profile, CSV xi,f,fm_prime,X,Y,Z");
  int per_decade = 0;
  double xi_start = 0.0;
  profile->add_option("--A", amp.A, "amplitude f(0)");
  profile->add_option("--C", amp.C, "shoot parameter");
  profile->add_option("--per-decade", per_decade, "samples kept per decade (0 keeps all)");
  profile->add_option("--xi-start", xi_start, "launch radius (0 picks one)");
  profile->add_option("--replot-from", replot_from, "re-emit a CSV written earlier");

  auto* phase = app.add_subcommand("phase", "integrate in phase space, CSV eta1,x,y,z,X,Y,Z");
  PhaseFlags pf;
  phase->add_option("--A", amp.A, "amplitude f(0), launched from the origin series");
  phase->add_option("--C", amp.C, "shoot parameter on the Q1 unstable manifold (inf allowed)");
  phase->add_option("--delta", pf.delta, "launch offset on the manifold")->capture_default_str();
  phase->add_option("--x-stop", pf.x_stop, "stop once x reaches this value");
  phase->add_flag("--no-stop-p2", pf.no_stop_p2, "keep integrating through the P2 band");
  phase->add_flag("--through-region", pf.through_region, "keep integrating inside y > 0, z > x");
  phase->add_option("--replot-from", replot_from, "re-emit a CSV written earlier");

  auto* cls = app.add_subcommand("classify", "classify one amplitude, JSON report");
  cls->add_option("--A", amp.A, "amplitude f(0)");
  cls->add_option("--C", amp.C, "shoot parameter");

  auto* sw = app.add_subcommand("sweep", "classify a grid, CSV A,C,kind,...");
  std::string grid;
  sw->add_option("--grid", grid, "log:LO:HI:N or lin:LO:HI:N");
  sw->add_option("--replot-from", replot_from, "re-emit a CSV written earlier");

  auto* fc = app.add_subcommand("find-critical", "bisection for A^*, A_* or A_0, JSON");
  std::string target;
  double tol_A = 1e-10;
  fc->add_option("--target", target, "a-star, a-lower or a-zero")->required();
  fc->add_option("--tol-A", tol_A, "relative bracket width")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (!replot_from.empty()) {
      const std::string cmd = profile->parsed() ? "profile" : phase->parsed() ? "phase" : "sweep";
      return replot(c, replot_from, cmd);
    }
    if (constants->parsed()) return cmd_constants(c);
    if (expand->parsed()) return cmd_expand(c, exp_A, exp_order, exp_xi);
    if (profile->parsed()) return cmd_profile(c, amp, per_decade, xi_start);
    if (phase->parsed()) return cmd_phase(c, amp, pf);
    if (cls->parsed()) return cmd_classify(c, amp);
    if (sw->parsed()) {
      if (grid.empty()) throw ParameterError("--grid is required");
      return cmd_sweep(c, grid);
    }
    if (fc->parsed()) return cmd_find_critical(c, target, tol_A);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n  last state: " << e.last_state() << '\n';
    return kNumerical;
  } catch (const InsufficientSamplesError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const SeriesValidityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
