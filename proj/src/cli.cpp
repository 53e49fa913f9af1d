#include "bathcool/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bathcool/analytic.hpp"
#include "bathcool/core.hpp"
#include "bathcool/ladder.hpp"
#include "bathcool/lindblad.hpp"
#include "bathcool/verify.hpp"

namespace bathcool::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const std::map<std::string, LawKind> kAnalyticLaws{
    {"newton", LawKind::Newton}, {"markov", LawKind::Markov}, {"modified", LawKind::Modified}};

const std::map<std::string, RateKind> kRateModels{
    {"markov", RateKind::Markov}, {"eq27", RateKind::FeedbackLiteral}, {"eq28", RateKind::FeedbackScaled}};

struct SimulateOptions {
  std::string law;
  std::string model = "eq28";
  std::optional<double> t0, tr, n0, nr;
  std::optional<double> gamma;
  double theta0 = 1.0;
  std::optional<std::string> map;
  std::optional<std::string> initial;
  double t_end = 3.0;
  double dt = 0.01;
  std::optional<long> dim;
  int record_every = 1;
  std::string out;
  std::string format = "csv";
};

struct HalftimeOptions {
  std::string law;
  std::optional<double> gamma;
};

struct CooltimeOptions {
  std::string law = "newton";
  bool compare = false;
  std::optional<double> t0, tr, target, gamma;
};

struct VerifyOptions {
  std::string suite = "all";
};

/// Writes to --out when given, otherwise to the command's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw UsageError("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required flag ") + flag);
  return *v;
}

// Resolved initial/reservoir values for one simulate run.
struct Endpoints {
  double x0;
  double xR;
  bool occupation_space;
};

Endpoints resolve_endpoints(const SimulateOptions& o, const PhysicalScales<double>& scales, bool need_occupation) {
  const bool temperature_mode = o.t0 || o.tr;
  const bool occupation_mode = o.n0 || o.nr;
  if (temperature_mode == occupation_mode)
    throw UsageError("give exactly one of --t0/--tr (temperature mode) or --n0/--nr (occupation mode)");
  if (occupation_mode) {
    if (o.map) throw UsageError("--map only applies to temperature-mode runs");
    return {require(o.n0, "--n0"), require(o.nr, "--nr"), true};
  }
  const double T0 = require(o.t0, "--t0"), TR = require(o.tr, "--tr");
  if (!o.map) {
    if (need_occupation)
      throw UsageError("integrators need occupations: pass --n0/--nr, or --map exact|linear with --t0/--tr");
    return {T0, TR, false};
  }
  TemperatureMap map;
  if (*o.map == "exact") map = TemperatureMap::Exact;
  else if (*o.map == "linear") map = TemperatureMap::Linear;
  else throw UsageError("--map must be exact or linear");
  return {map_to_occupation(map, Temperature<double>(T0), scales).n_bar,
          map_to_occupation(map, Temperature<double>(TR), scales).n_bar, true};
}

void write_header(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& params) {
  for (const auto& [key, value] : params) os << "# " << key << "=" << value << "\n";
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  if (o.format != "csv") throw UsageError("only --format csv is supported");
  const double gamma = require(o.gamma, "--gamma");
  const PhysicalScales<double> scales(o.theta0, gamma);

  IntegratorConfig<double> cfg;
  cfg.dt = o.dt;
  cfg.t_end = o.t_end;
  cfg.record_every = o.record_every;
  cfg.validate();
  const long steps = cfg.steps();
  const double h = cfg.step_size();
  auto valid_flag = [&](double t) { return t < 1.0 / gamma ? "1" : "0"; };

  std::vector<std::pair<std::string, std::string>> params{
      {"command", "simulate"}, {"law", o.law}, {"gamma", num(gamma)}, {"theta0", num(o.theta0)}};
  if (o.t0) params.emplace_back("t0", num(*o.t0));
  if (o.tr) params.emplace_back("tr", num(*o.tr));
  if (o.n0) params.emplace_back("n0", num(*o.n0));
  if (o.nr) params.emplace_back("nr", num(*o.nr));
  params.emplace_back("map", o.map.value_or("none"));
  params.emplace_back("t_end", num(o.t_end));
  params.emplace_back("dt", num(o.dt));
  params.emplace_back("steps", std::to_string(steps));
  params.emplace_back("record_every", std::to_string(o.record_every));
  params.emplace_back("format", o.format);

  if (auto law = kAnalyticLaws.find(o.law); law != kAnalyticLaws.end()) {
    const Endpoints ends = resolve_endpoints(o, scales, false);
    const CoolingParams<double> cp(ends.x0, ends.xR, gamma);
    params.emplace_back("value", ends.occupation_space ? "occupation" : "temperature");
    Sink sink(o.out, out);
    std::ostream& os = sink.get();
    write_header(os, params);
    os << "t,value,valid\n";
    for (long k = 0; k <= steps; ++k) {
      if (k % o.record_every != 0 && k != steps) continue;
      const double t = static_cast<double>(k) * h;
      os << num(t) << "," << num(evaluate_law(law->second, cp, t)) << "," << valid_flag(t) << "\n";
    }
    return kSuccess;
  }

  if (o.law != "lindblad" && o.law != "ladder")
    throw UsageError("--law must be one of newton, markov, modified, lindblad, ladder");
  const auto model_kind = kRateModels.find(o.model);
  if (model_kind == kRateModels.end()) throw UsageError("--model must be one of markov, eq27, eq28");

  const Endpoints ends = resolve_endpoints(o, scales, true);
  if (!(ends.x0 >= 0) || !(ends.xR >= 0)) throw UsageError("occupations must be >= 0");
  const RateModel<double> model(model_kind->second, gamma, ends.xR);
  const bool integral = std::abs(ends.x0 - std::round(ends.x0)) < 1e-12;
  const std::string initial = o.initial.value_or(integral ? "number" : "thermal");
  if (initial != "number" && initial != "thermal") throw UsageError("--initial must be number or thermal");
  const long dim = o.dim.value_or(recommended_truncation(ends.x0, ends.xR, initial == "thermal"));
  if (dim < 2) throw UsageError("--dim must be at least 2");
  if (initial == "number" && !integral) throw UsageError("a number state needs an integer --n0");
  if (initial == "number" && ends.x0 >= static_cast<double>(dim)) throw UsageError("--n0 exceeds the truncation");

  params.emplace_back("model", o.model);
  params.emplace_back("dim", std::to_string(dim));
  params.emplace_back("initial", initial);
  params.emplace_back("leak_tol", num(cfg.leak_tol));
  params.emplace_back("pos_tol", num(cfg.pos_tol));

  Trajectory<double> traj;
  if (o.law == "lindblad") {
    const auto rho0 = initial == "number" ? number_state(static_cast<Eigen::Index>(std::lround(ends.x0)), dim)
                                          : thermal_state(Occupation<double>(ends.x0), dim);
    traj = integrate(rho0, model, cfg);
  } else {
    const auto p0 = initial == "number"
                        ? PopulationVector<double>::point_mass(static_cast<Eigen::Index>(std::lround(ends.x0)), dim)
                        : PopulationVector<double>(thermal_populations(Occupation<double>(ends.x0), dim));
    traj = evolve_populations(p0, model, cfg);
  }
  params.emplace_back("max_substeps", std::to_string(traj.max_substeps));
  params.emplace_back("negative_rate_seen", traj.negative_rate_seen ? "1" : "0");
  params.emplace_back("feedback_guideline_ok", traj.guideline_satisfied ? "1" : "0");

  Sink sink(o.out, out);
  std::ostream& os = sink.get();
  write_header(os, params);
  os << "t,n_bar,trace,purity,valid,neg_rate_flag\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    os << num(t) << "," << num(traj.n_bar[k]) << "," << num(traj.trace[k]) << "," << num(traj.purity[k]) << ","
       << valid_flag(t) << "," << int(traj.negative_rate[k]) << "\n";
  }
  return kSuccess;
}

int cmd_halftime(const HalftimeOptions& o, std::ostream& out) {
  const auto law = kAnalyticLaws.find(o.law);
  if (law == kAnalyticLaws.end()) throw UsageError("--law must be newton, markov or modified");
  const double gamma = require(o.gamma, "--gamma");
  if (!(gamma > 0)) throw UsageError("--gamma must be positive");
  const char* formula = law->second == LawKind::Modified ? "(sqrt(1+2*ln(2))-1)/gamma" : "ln(2)/gamma";
  out << "law=" << o.law << "\n"
      << "formula=" << formula << "\n"
      << "gamma=" << num(gamma) << "\n"
      << "t_half=" << num(half_thermalization_time(law->second, gamma)) << "\n";
  return kSuccess;
}

int cmd_cooltime(const CooltimeOptions& o, std::ostream& out) {
  const CoolingParams<double> cp(require(o.t0, "--t0"), require(o.tr, "--tr"), require(o.gamma, "--gamma"));
  const double target = require(o.target, "--target");
  if (o.compare) {
    const double newton = time_to_value(LawKind::Newton, cp, target);
    const double modified = time_to_value(LawKind::Modified, cp, target);
    out << "newton=" << num(newton) << "\n"
        << "modified=" << num(modified) << "\n"
        << "ratio=" << num(modified / newton) << "\n";
    return kSuccess;
  }
  const auto law = kAnalyticLaws.find(o.law);
  if (law == kAnalyticLaws.end()) throw UsageError("--law must be newton, markov or modified");
  out << o.law << "=" << num(time_to_value(law->second, cp, target)) << "\n";
  return kSuccess;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  verify::Report report;
  const bool all = o.suite == "all";
  if (!all && o.suite != "wick" && o.suite != "ladder-equiv" && o.suite != "w25")
    throw UsageError("--suite must be wick, ladder-equiv, w25 or all");
  if (all || o.suite == "wick") report.append(verify::wick_suite());
  if (all || o.suite == "ladder-equiv") report.append(verify::ladder_equivalence_suite());
  if (all || o.suite == "w25") report.append(verify::w25_suite());
  verify::print(report, out);
  out << (report.passed() ? "all checks passed" : "verification failed") << "\n";
  return report.passed() ? kSuccess : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooling of a damped oscillator: analytic laws, master-equation integrators and checks", "bathcool"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a cooling trajectory as CSV");
  simulate->add_option("--law", sim.law, "newton | markov | modified | lindblad | ladder")->required();
  simulate->add_option("--model", sim.model, "rate law for lindblad/ladder: markov | eq27 | eq28");
  simulate->add_option("--t0", sim.t0, "initial temperature (temperature mode)");
  simulate->add_option("--tr", sim.tr, "reservoir temperature (temperature mode)");
  simulate->add_option("--n0", sim.n0, "initial occupation (occupation mode)");
  simulate->add_option("--nr", sim.nr, "reservoir occupation (occupation mode)");
  simulate->add_option("--gamma", sim.gamma, "decay constant");
  simulate->add_option("--theta0", sim.theta0, "hbar*omega0/k in temperature units");
  simulate->add_option("--map", sim.map, "temperature -> occupation map: exact | linear");
  simulate->add_option("--initial", sim.initial, "initial state for integrators: number | thermal");
  simulate->add_option("--t-end", sim.t_end, "time horizon");
  simulate->add_option("--dt", sim.dt, "step size");
  simulate->add_option("--dim", sim.dim, "Fock truncation");
  simulate->add_option("--record-every", sim.record_every, "output every k-th step");
  simulate->add_option("--out", sim.out, "output path (default: stdout)");
  simulate->add_option("--format", sim.format, "output format (csv)");

  HalftimeOptions half;
  auto* halftime = app.add_subcommand("halftime", "Half-thermalization time");
  halftime->add_option("--law", half.law, "newton | markov | modified")->required();
  halftime->add_option("--gamma", half.gamma, "decay constant");

  CooltimeOptions cool;
  auto* cooltime = app.add_subcommand("cooltime", "Time to cool from --t0 to --target");
  cooltime->add_option("--law", cool.law, "newton | markov | modified");
  cooltime->add_flag("--compare", cool.compare, "report newton, modified and their ratio");
  cooltime->add_option("--t0", cool.t0, "initial temperature");
  cooltime->add_option("--tr", cool.tr, "reservoir temperature");
  cooltime->add_option("--target", cool.target, "target temperature");
  cooltime->add_option("--gamma", cool.gamma, "decay constant");

  VerifyOptions ver;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("--suite", ver.suite, "wick | ladder-equiv | w25 | all");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArguments;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (halftime->parsed()) return cmd_halftime(half, out);
    if (cooltime->parsed()) return cmd_cooltime(cool, out);
    if (verify_cmd->parsed()) return cmd_verify(ver, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArguments;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArguments;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArguments;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << " at t=" << num(e.time()) << " (trace " << num(e.trace()) << ", min "
        << num(e.min_value()) << ")\n";
    return kToleranceFailure;
  }
  return kInvalidArguments;
}

}  // namespace bathcool::cli
