#include "bathcool/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "bathcool/correlators.hpp"
#include "bathcool/ladder.hpp"
#include "bathcool/lindblad.hpp"

namespace bathcool::verify {

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void Report::add(std::string name, bool ok, double measured, double tolerance, std::string detail) {
  checks.push_back({std::move(name), ok, measured, tolerance, std::move(detail)});
}

void Report::append(const Report& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

namespace {

std::string ordering_name(const FourOps& ops) {
  std::string s;
  for (LadderOp op : ops) s += op == LadderOp::Raise ? 'R' : 'L';
  return s;
}

std::string format_n(double n) {
  std::ostringstream os;
  os << n;
  return os.str();
}

}  // namespace

Report wick_suite() {
  Report report;
  constexpr Eigen::Index dim = 200;
  for (double n_bar : {0.5, 1.0, 3.0}) {
    const Occupation<double> n(n_bar);
    double worst_balanced = 0, worst_unbalanced = 0;
    for (int mask = 0; mask < 16; ++mask) {
      FourOps ops{};
      int raises = 0;
      for (int k = 0; k < 4; ++k) {
        ops[k] = (mask >> k) & 1 ? LadderOp::Raise : LadderOp::Lower;
        raises += (mask >> k) & 1;
      }
      const auto wick = wick_four_point(ops, n);
      const auto brute = brute_force_four_point(ops, n, dim);
      if (raises == 2) {
        const double rel = std::abs(wick - brute) / std::max(std::abs(brute), 1e-300);
        worst_balanced = std::max(worst_balanced, rel);
        report.add("wick " + ordering_name(ops) + " n=" + format_n(n_bar), rel < 1e-8, rel, 1e-8);
      } else {
        worst_unbalanced = std::max({worst_unbalanced, std::abs(wick), std::abs(brute)});
      }
    }
    report.add("wick unbalanced orderings vanish n=" + format_n(n_bar), worst_unbalanced < 1e-12,
               worst_unbalanced, 1e-12);

    // <n^2> = 2 n^2 + n for a thermal state.
    const FourOps number_squared{LadderOp::Raise, LadderOp::Lower, LadderOp::Raise, LadderOp::Lower};
    const double expected = 2 * n_bar * n_bar + n_bar;
    const double rel = std::abs(brute_force_four_point(number_squared, n, dim) - expected) / expected;
    report.add("thermal <n^2> = 2n^2 + n, n=" + format_n(n_bar), rel < 1e-8, rel, 1e-8);
  }

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> occ(0.0, 50.0), q(-10.0, 10.0);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double n_r = occ(rng), n_s = occ(rng);
    const std::complex<double> q12(q(rng), q(rng)), q21(q(rng), q(rng));
    const auto direct = assemble_a2_bracket(n_r, n_s, q12, q21);
    const auto paired = a2_pairing_sum(n_r, n_s, q12, q21);
    worst = std::max(worst, std::abs(direct + paired) / std::max(1.0, std::abs(direct)));
  }
  report.add("pairing sum reduces to the bracket (1000 random draws)", worst < 1e-12, worst, 1e-12);
  return report;
}

Report ladder_equivalence_suite() {
  Report report;
  constexpr Eigen::Index dim = 40;
  IntegratorConfig<double> cfg;
  cfg.dt = 0.005;
  cfg.t_end = 3.0;

  for (RateKind kind : {RateKind::Markov, RateKind::FeedbackLiteral, RateKind::FeedbackScaled}) {
    const RateModel<double> model(kind, 1.0, 2.0);
    const std::string name = "ladder vs master equation populations, model " + std::string(to_string(kind));
    try {
      const auto full = integrate(number_state(8, dim), model, cfg);
      const auto diag = evolve_populations(PopulationVector<double>::point_mass(8, dim), model, cfg);
      double worst = 0;
      for (std::size_t k = 0; k < full.size(); ++k)
        worst = std::max(worst, (full.populations[k] - diag.populations[k]).cwiseAbs().maxCoeff());
      report.add(name, worst < 1e-8, worst, 1e-8);
    } catch (const IntegrationError& e) {
      report.add(name, false, std::nan(""), 1e-8, e.what());
    }
  }
  return report;
}

std::vector<double> w25_time_grid(const W25Options& o) {
  std::vector<double> ts;
  const long count = std::lround((o.t_last - o.t_first) / o.t_step);
  for (long k = 0; k <= count; ++k) ts.push_back((o.t_first + static_cast<double>(k) * o.t_step) / o.gamma);
  return ts;
}

Report w25_suite(const W25Options& o) {
  Report report;
  const double level = o.gamma / (2 * std::numbers::pi);
  const auto grid = ModeGrid<double>::flat_band(o.omega0, o.half_width * o.gamma, o.modes, level);
  const PhysicalScales<double> scales(o.theta0, o.gamma);
  const Temperature<double> T_R(o.reservoir_temperature);
  const double n_R = occupation_from_temperature(T_R, scales).n_bar;
  const double gamma = gamma_from_grid(grid, o.omega0);
  const double scale = w_hat_reference_slope(gamma, 1.0);

  const auto kernel = w_hat_kernel(grid, o.omega0, T_R, scales, w25_time_grid(o));
  auto slope_at = [&](double delta_n) { return numeric_w_hat(kernel, Occupation<double>(n_R + delta_n)).slope; };

  report.add("grid decay constant matches gamma", std::abs(gamma - o.gamma) < 1e-12 * o.gamma,
             std::abs(gamma - o.gamma), 1e-12 * o.gamma);

  const double slope5 = slope_at(5.0);
  const double reference = w_hat_reference_slope(gamma, 5.0);
  const double rel = std::abs(slope5 - reference) / reference;
  report.add("Re W slope vs linear-in-t reference at delta n = 5", rel < 0.10, rel, 0.10,
             "fitted " + format_n(slope5) + ", reference " + format_n(reference));

  const double null_slope = slope_at(0.0);
  report.add("Re W slope vanishes at equilibrium (fraction of gamma^2/2)", std::abs(null_slope) < 0.01 * scale,
             std::abs(null_slope) / scale, 0.01, "fitted " + format_n(null_slope));

  const double s2 = slope_at(2.0), s4 = slope_at(4.0);
  const double ratio_err = std::abs(s4 / s2 - 2.0) / 2.0;
  report.add("Re W slope linear in delta n (4 vs 2)", ratio_err < 0.03, ratio_err, 0.03,
             "slopes " + format_n(s2) + ", " + format_n(s4));
  return report;
}

void print(const Report& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "measured=%.3e tol=%.3e", c.measured, c.tolerance);
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << buf;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
}

}  // namespace bathcool::verify
