#pragma once

// Thermal reservoir correlators: two-point functions of a single bosonic mode,
// the pairing (Wick) decomposition of four-point functions, a brute-force trace
// oracle for it, and the evolved spectral density of the reservoir driven by a
// hot system mode.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bathcool/core.hpp"
#include "bathcool/divided_difference.hpp"
#include "bathcool/errors.hpp"
#include "bathcool/lindblad.hpp"

namespace bathcool {

enum class LadderOp { Lower, Raise };

using FourOps = std::array<LadderOp, 4>;

/// <b^+ b> = n, <b b^+> = 1 + n, and zero for <b b>, <b^+ b^+>.
template <typename Scalar>
std::complex<Scalar> thermal_two_point(LadderOp left, LadderOp right, const Occupation<Scalar>& n) {
  if (left == LadderOp::Raise && right == LadderOp::Lower) return n.n_bar;
  if (left == LadderOp::Lower && right == LadderOp::Raise) return 1 + n.n_bar;
  return 0;
}

/// <abcd> = <ab><cd> + <ac><bd> + <ad><bc>.
template <typename Scalar>
std::complex<Scalar> wick_four_point(const FourOps& ops, const Occupation<Scalar>& n) {
  auto pair = [&](int i, int j) { return thermal_two_point(ops[i], ops[j], n); };
  return pair(0, 1) * pair(2, 3) + pair(0, 2) * pair(1, 3) + pair(0, 3) * pair(1, 2);
}

/// Tr[O_a O_b O_c O_d rho_thermal] by explicit matrix products in a dim-level Fock basis.
template <typename Scalar>
std::complex<Scalar> brute_force_four_point(const FourOps& ops, const Occupation<Scalar>& n,
                                            Eigen::Index dim) {
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  if (dim < 2) throw DomainError("truncation must keep at least two Fock levels");
  if (1 - thermal_captured_mass(n.n_bar, dim) > Scalar(1e-10))
    throw TruncationError("thermal tail beyond the truncation exceeds 1e-10");

  Matrix lower = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 1; k < dim; ++k) lower(k - 1, k) = std::sqrt(static_cast<Scalar>(k));
  const Matrix raise = lower.adjoint();

  Matrix product = Matrix::Identity(dim, dim);
  for (LadderOp op : ops) product = product * (op == LadderOp::Lower ? lower : raise);

  const auto p = thermal_populations(n, dim);
  Complex trace = 0;
  for (Eigen::Index i = 0; i < dim; ++i) trace += product(i, i) * p(i);
  return trace;
}

/// (2 + n_r + n_s) q12 - (n_r + n_s) q21, the coefficient left after the reservoir
/// four-point functions are reduced to pairs. q12 = <Q1 Q2>_S, q21 = <Q2 Q1>_S.
template <typename Scalar>
std::complex<Scalar> assemble_a2_bracket(Scalar n_r, Scalar n_s, std::complex<Scalar> q12,
                                         std::complex<Scalar> q21) {
  return (2 + n_r + n_s) * q12 - (n_r + n_s) * q21;
}

/// The same coefficient built term by term from the thermal pair functions, with
/// F1 ~ b (lower) and F2 ~ b^+ (raise) and phases stripped. Equals minus
/// assemble_a2_bracket.
template <typename Scalar>
std::complex<Scalar> a2_pairing_sum(Scalar n_r, Scalar n_s, std::complex<Scalar> q12, std::complex<Scalar> q21) {
  const Occupation<Scalar> mode_r(n_r), mode_s(n_s);
  const auto F1 = LadderOp::Lower, F2 = LadderOp::Raise;
  // Mode r carries the (t1, t') pair, mode s the (t2, t) pair.
  const auto r12 = thermal_two_point(F1, F2, mode_r), r21 = thermal_two_point(F2, F1, mode_r);
  const auto s12 = thermal_two_point(F1, F2, mode_s), s21 = thermal_two_point(F2, F1, mode_s);
  const auto first = r12 * (s21 - s12) + s12 * (r21 - r12);
  const auto second = r21 * (s12 - s21) + s21 * (r12 - r21);
  return first * q12 + second * q21;
}

/// Discretized reservoir: mode frequencies, |kappa|^2, density of states and
/// quadrature weights turning mode sums into frequency integrals.
template <typename Scalar = double>
struct ModeGrid {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Array frequencies;
  Array coupling;
  Array density;
  Array weights;

  ModeGrid(Array frequencies_, Array coupling_, Array density_, Array weights_)
      : frequencies(std::move(frequencies_)),
        coupling(std::move(coupling_)),
        density(std::move(density_)),
        weights(std::move(weights_)) {
    const auto n = frequencies.size();
    if (n < 2) throw DomainError("mode grid needs at least two modes");
    if (coupling.size() != n || density.size() != n || weights.size() != n)
      throw DomainError("mode grid arrays differ in length");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(frequencies(k) > 0)) throw DomainError("mode frequencies must be positive");
      if (k > 0 && !(frequencies(k) > frequencies(k - 1)))
        throw DomainError("mode frequencies must be strictly increasing");
    }
    if ((coupling < 0).any() || (density < 0).any() || (weights < 0).any())
      throw DomainError("couplings, densities and weights must be non-negative");
  }

  Eigen::Index size() const { return frequencies.size(); }
  Scalar half_width() const { return (frequencies(size() - 1) - frequencies(0)) / 2; }

  /// D |kappa|^2 dw for each mode.
  Array spectral_weight() const { return coupling * density * weights; }

  /// Flat band: `modes` equally spaced frequencies on [omega0 - half_width, omega0 + half_width]
  /// with D |kappa|^2 = level and trapezoid weights.
  static ModeGrid flat_band(Scalar omega0, Scalar half_width, Eigen::Index modes, Scalar level) {
    if (modes < 2) throw DomainError("mode grid needs at least two modes");
    if (!(half_width > 0) || !(omega0 - half_width > 0))
      throw DomainError("band must be non-empty and lie at positive frequencies");
    Array w = Array::LinSpaced(modes, omega0 - half_width, omega0 + half_width);
    const Scalar dw = 2 * half_width / static_cast<Scalar>(modes - 1);
    Array weights = Array::Constant(modes, dw);
    weights(0) = weights(modes - 1) = dw / 2;
    return ModeGrid(std::move(w), Array::Constant(modes, level), Array::Ones(modes), std::move(weights));
  }
};

/// gamma = 2 pi D(omega0) |kappa(omega0)|^2, with D |kappa|^2 linearly interpolated.
template <typename Scalar>
Scalar gamma_from_grid(const ModeGrid<Scalar>& grid, Scalar omega0) {
  const auto& w = grid.frequencies;
  const Eigen::Index n = grid.size();
  if (!(omega0 >= w(0) && omega0 <= w(n - 1))) throw DomainError("omega0 lies outside the mode grid");
  const auto profile = (grid.density * grid.coupling).eval();
  Eigen::Index k = 0;
  while (k + 2 < n && w(k + 1) < omega0) ++k;
  const Scalar frac = (omega0 - w(k)) / (w(k + 1) - w(k));
  return 2 * std::numbers::pi_v<Scalar> * ((1 - frac) * profile(k) + frac * profile(k + 1));
}

/// Nested time integral for one (r, s) mode pair, including the e^{i(w_r - w_s)t} phase:
///
///   e^{i(x-y)t} int_0^t dtau e^{-i x tau} int_0^{t-tau} dt1 e^{-i x t1} int_0^{t1} dt2 e^{i y t2}
///
/// with x = w_r - omega0, y = w_s - omega0. Equal to e^{i(x-y)t} t^3 exp[0, p, q, q] with
/// p = i(y-x)t and q = -ixt.
template <typename Scalar>
std::complex<Scalar> w_hat_pair_integral(Scalar x, Scalar y, Scalar t) {
  using Complex = std::complex<Scalar>;
  const Complex i(0, 1);
  const std::array<Complex, 4> nodes{Complex(0), i * (y - x) * t, -i * x * t, -i * x * t};
  return std::exp(i * (x - y) * t) * (t * t * t) * exp_divided_difference(nodes);
}

namespace detail {
// exp[0, p, q, q] given e^p and e^q. Explicit when the nodes are well separated,
// otherwise the general divided difference.
template <typename Scalar>
std::complex<Scalar> exp_dd_0pqq(std::complex<Scalar> p, std::complex<Scalar> q, std::complex<Scalar> ep,
                                 std::complex<Scalar> eq) {
  constexpr Scalar min_gap_sq = Scalar(0.01);
  const std::complex<Scalar> d = q - p;
  if (std::norm(p) < min_gap_sq || std::norm(q) < min_gap_sq || std::norm(d) < min_gap_sq)
    return exp_divided_difference(std::array<std::complex<Scalar>, 4>{{0, p, q, q}});
  const auto f0qq = (eq * (q - Scalar(1)) + Scalar(1)) / (q * q);
  const auto fpqq = (eq * (d - Scalar(1)) + ep) / (d * d);
  return (fpqq - f0qq) / p;
}
}  // namespace detail

template <typename Scalar = double>
struct WHatResult {
  std::vector<Scalar> t_values;
  std::vector<std::complex<Scalar>> w;  ///< real part: rate correction; imaginary part: frequency shift
  Scalar slope{};                       ///< least-squares slope of Re W over the fit window
  Scalar intercept{};
  Scalar fit_start{};                   ///< earlier times are discarded as transient
  Scalar fit_residual_rms{};
  bool accuracy_warning{false};
};

/// Mode-pair sums of the evolved spectral density, split by which system average they
/// multiply: W(t) = s12(t) <Q1 Q2>_S + s21(t) <Q2 Q1>_S. Independent of the system state,
/// so one kernel serves every n_S.
template <typename Scalar = double>
struct WHatKernel {
  std::vector<Scalar> t_values;
  std::vector<std::complex<Scalar>> s12;
  std::vector<std::complex<Scalar>> s21;
  Scalar band_half_width{};
};

template <typename Scalar>
WHatKernel<Scalar> w_hat_kernel(const ModeGrid<Scalar>& grid, Scalar omega0, const Temperature<Scalar>& T_R,
                                const PhysicalScales<Scalar>& scales, const std::vector<Scalar>& t_values) {
  using Complex = std::complex<Scalar>;
  if (!(omega0 > 0)) throw DomainError("omega0 must be positive");
  const Eigen::Index n = grid.size();
  const auto weight = grid.spectral_weight().eval();

  // Reservoir occupation at each mode frequency: theta(w) = theta0 * w / omega0.
  Eigen::Array<Scalar, Eigen::Dynamic, 1> occupation(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const PhysicalScales<Scalar> mode_scale(scales.theta0 * grid.frequencies(k) / omega0, scales.gamma);
    occupation(k) = occupation_from_temperature(T_R, mode_scale).n_bar;
  }

  WHatKernel<Scalar> kernel;
  kernel.t_values = t_values;
  kernel.band_half_width = grid.half_width();
  const Complex i(0, 1);
  std::vector<Complex> lower_phase(n), upper_phase(n);
  for (Scalar t : t_values) {
    if (!(t >= 0)) throw DomainError("time must be >= 0");
    const Scalar t3 = t * t * t;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Scalar x = grid.frequencies(k) - omega0;
      lower_phase[k] = std::polar(Scalar(1), -x * t);  // e^{-ixt}
      upper_phase[k] = std::conj(lower_phase[k]);      // e^{ixt}
    }
    Complex s12 = 0, s21 = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const Scalar x = grid.frequencies(r) - omega0;
      const Complex q = -i * x * t;
      Complex row12 = 0, row21 = 0;
      for (Eigen::Index s = 0; s < n; ++s) {
        const Scalar y = grid.frequencies(s) - omega0;
        const Complex ep = upper_phase[s] * lower_phase[r];  // e^{i(y-x)t}
        const Complex nested = std::conj(ep) * t3 * detail::exp_dd_0pqq(i * (y - x) * t, q, ep, lower_phase[r]);
        const Complex pair = weight(s) * nested;
        row12 += pair * assemble_a2_bracket(occupation(r), occupation(s), Complex(1), Complex(0));
        row21 += pair * assemble_a2_bracket(occupation(r), occupation(s), Complex(0), Complex(1));
      }
      s12 += weight(r) * row12;
      s21 += weight(r) * row21;
    }
    kernel.s12.push_back(s12);
    kernel.s21.push_back(s21);
  }
  return kernel;
}

/// Evaluates the kernel for a system mode with <a^+ a> = n_S (q12 = n_S, q21 = n_S + 1) and
/// fits Re W(t) = slope * t + intercept over t >= 5 / band_half_width.
template <typename Scalar>
WHatResult<Scalar> numeric_w_hat(const WHatKernel<Scalar>& kernel, const Occupation<Scalar>& n_S) {
  using Complex = std::complex<Scalar>;
  WHatResult<Scalar> out;
  out.t_values = kernel.t_values;
  const Complex q12(n_S.n_bar), q21(n_S.n_bar + 1);
  for (std::size_t k = 0; k < kernel.t_values.size(); ++k) out.w.push_back(kernel.s12[k] * q12 + kernel.s21[k] * q21);

  out.fit_start = 5 / kernel.band_half_width;
  std::vector<Scalar> ts, ys;
  for (std::size_t k = 0; k < out.t_values.size(); ++k)
    if (out.t_values[k] >= out.fit_start) {
      ts.push_back(out.t_values[k]);
      ys.push_back(out.w[k].real());
    }
  if (ts.size() < 2) throw DomainError("fewer than two times lie past the transient");

  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(ts.size(), 2);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    design(k, 0) = ts[k];
    design(k, 1) = 1;
    rhs(k) = ys[k];
  }
  const Eigen::Matrix<Scalar, 2, 1> coef = design.colPivHouseholderQr().solve(rhs);
  out.slope = coef(0);
  out.intercept = coef(1);
  out.fit_residual_rms = std::sqrt((design * coef - rhs).squaredNorm() / static_cast<Scalar>(ts.size()));

  // Either the band is too narrow for the time window or Re W is not linear in t.
  const Scalar span = ts.back() - ts.front();
  const bool narrow = kernel.band_half_width * ts.back() < 10;
  const bool nonlinear = out.fit_residual_rms > Scalar(0.05) * std::abs(out.slope) * span;
  out.accuracy_warning = narrow || nonlinear;
  return out;
}

template <typename Scalar>
WHatResult<Scalar> numeric_w_hat(const ModeGrid<Scalar>& grid, Scalar omega0, const Occupation<Scalar>& n_S,
                                 const Temperature<Scalar>& T_R, const PhysicalScales<Scalar>& scales,
                                 const std::vector<Scalar>& t_values) {
  return numeric_w_hat(w_hat_kernel(grid, omega0, T_R, scales, t_values), n_S);
}

/// Linear-in-t reference 2 pi^2 D^2 |kappa|^4 (n_S - n_R) t, expressed through gamma: gamma^2 / 2 per unit.
template <typename Scalar>
Scalar w_hat_reference_slope(Scalar gamma, Scalar delta_n) {
  return gamma * gamma / 2 * delta_n;
}

}  // namespace bathcool
