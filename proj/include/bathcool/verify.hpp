#pragma once

// Self-contained verification suites run by `bathcool verify` and the acceptance tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace bathcool::verify {

struct Check {
  std::string name;
  bool passed{false};
  double measured{0};
  double tolerance{0};
  std::string detail;
};

struct Report {
  std::vector<Check> checks;

  bool passed() const;
  void add(std::string name, bool passed, double measured, double tolerance, std::string detail = {});
  void append(const Report& other);
};

/// Pairing decomposition against the brute-force trace for all 16 orderings of four
/// ladder operators, n in {0.5, 1, 3}, dim 200; plus the bracket assembly identity.
Report wick_suite();

/// Population ladder vs the diagonal of the density-matrix integrator for every rate law
/// (number state 8, nR = 2, gamma = 1, dim 40, dt 0.005, t_end 3).
Report ladder_equivalence_suite();

struct W25Options {
  double gamma = 1.0;
  double omega0 = 50.0;
  double half_width = 20.0;  ///< in units of gamma
  long modes = 801;
  double theta0 = 1.0;
  double reservoir_temperature = 2.0;
  double t_first = 0.25;
  double t_last = 2.0;
  double t_step = 0.05;
};

/// Evolved reservoir spectral density on a flat band vs the linear-in-t reference:
/// slope within 10% at delta n = 5, null at equilibrium (< 1% of gamma^2/2), and slope
/// ratio 2 within 3% between delta n = 4 and 2.
Report w25_suite(const W25Options& options = {});

std::vector<double> w25_time_grid(const W25Options& options);

void print(const Report& report, std::ostream& out);

}  // namespace bathcool::verify
