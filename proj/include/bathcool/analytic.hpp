#pragma once

// Closed-form relaxation laws. These are the reference oracles for the numerical
// integrators, and what the CLI uses for the analytic curves.
//
//   Newton / Markov:  x(t) = xR + (x0 - xR) exp(-g t)
//   Modified:         x(t) = xR + (x0 - xR) exp(-g t (1 + g t / 2))
//
// Newton and Markov share one formula; they differ only in whether x is a
// temperature or an occupation, which the caller decides.

#include <algorithm>
#include <cmath>
#include <string_view>

#include "bathcool/errors.hpp"

namespace bathcool {

enum class LawKind { Newton, Markov, Modified };

inline std::string_view to_string(LawKind kind) {
  switch (kind) {
    case LawKind::Newton: return "newton";
    case LawKind::Markov: return "markov";
    case LawKind::Modified: return "modified";
  }
  return "?";
}

template <typename Scalar = double>
struct CoolingParams {
  Scalar x0{};
  Scalar xR{};
  Scalar gamma{1};

  CoolingParams() = default;
  CoolingParams(Scalar x0_, Scalar xR_, Scalar gamma_) : x0(x0_), xR(xR_), gamma(gamma_) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive and finite");
    if (!std::isfinite(x0) || !std::isfinite(xR)) throw DomainError("x0 and xR must be finite");
  }
};

/// Decay exponent g*t (Newton/Markov) or g*t*(1 + g*t/2) (Modified).
template <typename Scalar>
Scalar decay_exponent(LawKind kind, Scalar gamma, Scalar t) {
  const Scalar gt = gamma * t;
  return kind == LawKind::Modified ? gt * (1 + gt / 2) : gt;
}

template <typename Scalar>
Scalar evaluate_law(LawKind kind, const CoolingParams<Scalar>& p, Scalar t) {
  if (!(t >= 0)) throw DomainError("time must be >= 0");
  using std::exp;
  return p.xR + (p.x0 - p.xR) * exp(-decay_exponent(kind, p.gamma, t));
}

/// dx/dt for the law. The Modified rate carries the extra factor (1 + g t).
template <typename Scalar>
Scalar rate_rhs(LawKind kind, const CoolingParams<Scalar>& p, Scalar x, Scalar t) {
  if (!(t >= 0)) throw DomainError("time must be >= 0");
  const Scalar base = -p.gamma * (x - p.xR);
  return kind == LawKind::Modified ? base * (1 + p.gamma * t) : base;
}

namespace detail {
// Positive root of u^2/2 + u = L, written to avoid cancellation for small L.
template <typename Scalar>
Scalar modified_root(Scalar L) {
  using std::sqrt;
  return 2 * L / (sqrt(1 + 2 * L) + 1);
}
}  // namespace detail

/// Time for the deviation from xR to halve. Independent of x0 and xR.
template <typename Scalar>
Scalar half_thermalization_time(LawKind kind, Scalar gamma) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
  using std::log;
  const Scalar L = log(Scalar(2));
  return kind == LawKind::Modified ? detail::modified_root(L) / gamma : L / gamma;
}

/// Time at which the law reaches x_target; the target must lie strictly between xR and x0.
template <typename Scalar>
Scalar time_to_value(LawKind kind, const CoolingParams<Scalar>& p, Scalar x_target) {
  const Scalar lo = std::min(p.x0, p.xR);
  const Scalar hi = std::max(p.x0, p.xR);
  if (!(x_target > lo && x_target < hi))
    throw DomainError("target is not strictly between the reservoir and initial values");
  using std::log;
  const Scalar L = log((p.x0 - p.xR) / (x_target - p.xR));
  return kind == LawKind::Modified ? detail::modified_root(L) / p.gamma : L / p.gamma;
}

}  // namespace bathcool
