#pragma once

// Rate laws, integrator settings and the trajectory record shared by the
// density-matrix integrator and the population ladder.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bathcool/errors.hpp"

namespace bathcool {

/// Which dissipator rate law drives the dynamics.
///
///   Markov           g1 = g (1 + nR),                     g2 = g nR
///   FeedbackLiteral  g1 = g (1 + nR) + g^2 (nS - nR) t,   g2 = g nR + g^2 (nS - nR) t
///   FeedbackScaled   g1 = g (1 + g t)(1 + nR),            g2 = g (1 + g t) nR
///
/// FeedbackLiteral reads nS from the instantaneous state and gives
/// dn/dt = -g (n - nR) + g^2 (n - nR) t. FeedbackScaled gives
/// dn/dt = -g (n - nR)(1 + g t), whose solution is the Modified law.
enum class RateKind { Markov, FeedbackLiteral, FeedbackScaled };

inline std::string_view to_string(RateKind kind) {
  switch (kind) {
    case RateKind::Markov: return "markov";
    case RateKind::FeedbackLiteral: return "eq27";
    case RateKind::FeedbackScaled: return "eq28";
  }
  return "?";
}

/// Downward (emission, g1) and upward (absorption, g2) rate constants.
template <typename Scalar = double>
struct DecayRates {
  Scalar emission{};
  Scalar absorption{};

  bool negative() const { return emission < 0 || absorption < 0; }
};

template <typename Scalar = double>
struct RateModel {
  RateKind kind{RateKind::Markov};
  Scalar gamma{1};
  Scalar n_bar_R{0};

  RateModel() = default;
  RateModel(RateKind kind_, Scalar gamma_, Scalar n_bar_R_)
      : kind(kind_), gamma(gamma_), n_bar_R(n_bar_R_) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
    if (!(n_bar_R >= 0) || !std::isfinite(n_bar_R)) throw DomainError("reservoir occupation must be >= 0");
  }

  bool state_dependent() const { return kind == RateKind::FeedbackLiteral; }

  /// Rates at time t. n_bar_S is only read by the state-dependent law.
  DecayRates<Scalar> rates(Scalar t, Scalar n_bar_S) const {
    switch (kind) {
      case RateKind::Markov:
        return {gamma * (1 + n_bar_R), gamma * n_bar_R};
      case RateKind::FeedbackLiteral: {
        const Scalar feedback = gamma * gamma * (n_bar_S - n_bar_R) * t;
        return {gamma * (1 + n_bar_R) + feedback, gamma * n_bar_R + feedback};
      }
      case RateKind::FeedbackScaled: {
        const Scalar scale = gamma * (1 + gamma * t);
        return {scale * (1 + n_bar_R), scale * n_bar_R};
      }
    }
    return {};
  }

  /// First-order feedback guideline (nS - nR) g t <= nR. Always true for Markov.
  bool within_feedback_guideline(Scalar t, Scalar n_bar_S) const {
    if (kind == RateKind::Markov) return true;
    return (n_bar_S - n_bar_R) * gamma * t <= n_bar_R;
  }
};

template <typename Scalar = double>
struct IntegratorConfig {
  Scalar dt{0.005};
  Scalar t_end{1};
  int record_every{1};
  Scalar leak_tol{1e-6};
  Scalar pos_tol{1e-8};
  int check_every{100};  ///< steps between eigenvalue / min-population checkpoints

  void validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
    if (!(t_end >= 0) || !std::isfinite(t_end)) throw DomainError("t_end must be >= 0");
    if (record_every < 1) throw DomainError("record_every must be >= 1");
    if (check_every < 1) throw DomainError("check_every must be >= 1");
    if (!(leak_tol >= 0) || !(pos_tol >= 0)) throw DomainError("tolerances must be >= 0");
  }

  /// Number of uniform steps covering [0, t_end]; dt is shrunk if it does not divide t_end.
  long steps() const {
    if (t_end == 0) return 0;
    return std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-9)));
  }
  Scalar step_size() const { return steps() == 0 ? dt : t_end / static_cast<Scalar>(steps()); }
};

/// Truncation that keeps number-state and Poissonian tails small for occupations up to n_max.
inline long default_truncation(double n_max) {
  return static_cast<long>(std::ceil(n_max + 12.0 * std::sqrt(n_max + 1.0))) + 4;
}

/// Levels needed for a thermal distribution at n to leave less than `tail` mass above the cut.
inline long geometric_truncation(double n, double tail = 1e-9) {
  if (!(n > 0)) return 1;
  return static_cast<long>(std::ceil(std::log(tail) / std::log(n / (1.0 + n))));
}

/// Truncation for a run from n_initial towards a reservoir at n_reservoir. The stationary
/// state is thermal at n_reservoir; the initial state may be thermal too.
inline long recommended_truncation(double n_initial, double n_reservoir, bool thermal_initial) {
  const double geometric_n = thermal_initial ? std::max(n_initial, n_reservoir) : n_reservoir;
  return std::max(default_truncation(std::max(n_initial, n_reservoir)), geometric_truncation(geometric_n));
}

template <typename Scalar = double>
struct Trajectory {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Checkpoint {
    Scalar time;
    Scalar value;  ///< smallest eigenvalue (density matrix) or smallest population (ladder)
  };

  std::vector<Scalar> times;
  std::vector<Scalar> n_bar;
  std::vector<Vector> populations;
  std::vector<Scalar> trace;
  std::vector<Scalar> purity;
  std::vector<Scalar> hermiticity_error;  ///< max |rho - rho^dagger|
  std::vector<Scalar> max_coherence;      ///< max |rho_mn|, m != n
  std::vector<std::uint8_t> negative_rate;
  std::vector<Checkpoint> checkpoints;

  bool negative_rate_seen{false};
  bool guideline_satisfied{true};
  long max_substeps{1};  ///< largest number of RK4 substeps taken inside one output step

  std::size_t size() const { return times.size(); }
};

/// Gershgorin bound on the spectral radius of the truncated generator (populations and
/// coherences alike) for the given rates.
template <typename Scalar>
Scalar generator_bound(const DecayRates<Scalar>& r, long dim) {
  const Scalar top = static_cast<Scalar>(dim);
  return 2 * (std::abs(r.emission) * (top - 1) + std::abs(r.absorption) * top);
}

/// Equal substeps needed so each RK4 step stays inside the real-axis stability interval
/// (|h lambda| < 2.78) with some margin. High Fock levels make the generator stiff.
template <typename Scalar>
long stable_substeps(Scalar h, Scalar bound) {
  constexpr double kStableProduct = 2.5;
  return std::max(1L, static_cast<long>(std::ceil(h * bound / kStableProduct)));
}

/// One classical fourth-order Runge-Kutta step for dy/dt = f(t, y).
template <typename State, typename Scalar, typename Rhs>
State rk4_step(const Rhs& f, Scalar t, const State& y, Scalar h) {
  const State k1 = f(t, y);
  const State k2 = f(t + h / 2, State(y + (h / 2) * k1));
  const State k3 = f(t + h / 2, State(y + (h / 2) * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4));
}

}  // namespace bathcool
