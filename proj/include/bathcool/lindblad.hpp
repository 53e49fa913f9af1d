#pragma once

// Truncated Fock-space master equation for a damped oscillator in the
// interaction picture:
//
//   dS/dt = - g1/2 (a^+a S - 2 a S a^+ + S a^+a) - g2/2 (a a^+ S - 2 a^+ S a + S a a^+)
//
// a and a^+ are the truncated N x N matrices, so a a^+ = diag(1, ..., N-1, 0) and
// the top level reflects. The generator stays exactly trace preserving and
// completely positive; probability that would leave the ladder piles up at the
// top instead, which the trace/positivity checks and the truncation helpers watch.

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <utility>

#include <Eigen/Dense>

#include "bathcool/core.hpp"
#include "bathcool/dissipation.hpp"
#include "bathcool/errors.hpp"

namespace bathcool {

template <typename Scalar = double>
class FockDensityMatrix {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit FockDensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) throw DomainError("density matrix must be square");
    if (rho_.rows() < 2) throw DomainError("truncation must keep at least two Fock levels");
    if (!rho_.allFinite()) throw DomainError("density matrix has non-finite entries");
    if (hermiticity_error() > Scalar(1e-12)) throw DomainError("density matrix is not Hermitian");
  }

  Eigen::Index dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }
  Complex operator()(Eigen::Index m, Eigen::Index n) const { return rho_(m, n); }

  Scalar trace() const { return rho_.trace().real(); }
  Scalar purity() const { return (rho_ * rho_).trace().real(); }
  RealVector populations() const { return rho_.diagonal().real(); }

  Scalar hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  Scalar max_coherence() const {
    Scalar worst = 0;
    for (Eigen::Index n = 0; n < dim(); ++n)
      for (Eigen::Index m = 0; m < dim(); ++m)
        if (m != n) worst = std::max(worst, std::abs(rho_(m, n)));
    return worst;
  }

  Scalar min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

 private:
  Matrix rho_;
};

/// Probability mass of a thermal distribution with mean n that lies below level dim.
template <typename Scalar>
Scalar thermal_captured_mass(Scalar n_bar, Eigen::Index dim) {
  if (n_bar == 0) return 1;
  using std::pow;
  return 1 - pow(n_bar / (1 + n_bar), static_cast<Scalar>(dim));
}

/// Geometric (thermal) populations p_i ~ (n/(1+n))^i, renormalized over the truncation.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> thermal_populations(const Occupation<Scalar>& n,
                                                           Eigen::Index dim) {
  if (dim < 2) throw DomainError("truncation must keep at least two Fock levels");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> p = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim);
  const Scalar ratio = n.n_bar / (1 + n.n_bar);
  Scalar w = 1;
  for (Eigen::Index i = 0; i < dim; ++i) {
    p(i) = w;
    w *= ratio;
  }
  p /= p.sum();
  return p;
}

template <typename Scalar>
FockDensityMatrix<Scalar> thermal_state(const Occupation<Scalar>& n, Eigen::Index dim) {
  const auto p = thermal_populations(n, dim);
  const Scalar captured = thermal_captured_mass(n.n_bar, dim);
  if (captured < Scalar(0.999))
    std::cerr << "warning: truncation at " << dim << " levels keeps only " << captured
              << " of the thermal mass for n=" << n.n_bar << "\n";
  using Matrix = typename FockDensityMatrix<Scalar>::Matrix;
  Matrix rho = Matrix::Zero(dim, dim);
  rho.diagonal() = p.template cast<std::complex<Scalar>>();
  return FockDensityMatrix<Scalar>(std::move(rho));
}

template <typename Scalar = double>
FockDensityMatrix<Scalar> number_state(Eigen::Index level, Eigen::Index dim) {
  if (dim < 2) throw DomainError("truncation must keep at least two Fock levels");
  if (level < 0 || level >= dim) throw DomainError("Fock level outside the truncation");
  using Matrix = typename FockDensityMatrix<Scalar>::Matrix;
  Matrix rho = Matrix::Zero(dim, dim);
  rho(level, level) = 1;
  return FockDensityMatrix<Scalar>(std::move(rho));
}

namespace detail {
template <typename Derived>
typename Derived::RealScalar mean_occupation(const Eigen::MatrixBase<Derived>& rho) {
  using Real = typename Derived::RealScalar;
  Real n = 0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) n += static_cast<Real>(i) * std::real(rho(i, i));
  return n;
}
}  // namespace detail

template <typename Scalar>
Occupation<Scalar> mean_occupation(const FockDensityMatrix<Scalar>& rho) {
  return Occupation<Scalar>(std::max(Scalar(0), detail::mean_occupation(rho.matrix())));
}

/// Damping superoperator for fixed (g1, g2) on an N-level truncation.
template <typename Scalar = double>
class Dissipator {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  explicit Dissipator(Eigen::Index dim) : dim_(dim), ladder_(dim - 1), number_sum_(dim, dim), raised_sum_(dim, dim) {
    if (dim < 2) throw DomainError("truncation must keep at least two Fock levels");
    for (Eigen::Index k = 0; k + 1 < dim; ++k) ladder_(k) = Complex(std::sqrt(static_cast<Scalar>(k + 1)));
    // a^+a = diag(k), truncated a a^+ = diag(k + 1) except the top level.
    auto number = [](Eigen::Index k) { return static_cast<Scalar>(k); };
    auto raised = [dim](Eigen::Index k) { return k + 1 < dim ? static_cast<Scalar>(k + 1) : Scalar(0); };
    for (Eigen::Index n = 0; n < dim; ++n)
      for (Eigen::Index m = 0; m < dim; ++m) {
        number_sum_(m, n) = number(m) + number(n);
        raised_sum_(m, n) = raised(m) + raised(n);
      }
  }

  Eigen::Index dim() const { return dim_; }

  template <typename Derived>
  Matrix apply(const Eigen::MatrixBase<Derived>& rho, const DecayRates<Scalar>& rates) const {
    const Eigen::Index inner = dim_ - 1;
    Matrix out = (-rates.emission / 2) * number_sum_.cwiseProduct(rho) -
                 (rates.absorption / 2) * raised_sum_.cwiseProduct(rho);
    const auto s = ladder_.asDiagonal();
    // a rho a^+ feeds level m from m+1; a^+ rho a feeds level m from m-1.
    out.topLeftCorner(inner, inner).noalias() +=
        rates.emission * (s * rho.bottomRightCorner(inner, inner) * s);
    out.bottomRightCorner(inner, inner).noalias() +=
        rates.absorption * (s * rho.topLeftCorner(inner, inner) * s);
    return out;
  }

 private:
  Eigen::Index dim_;
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> ladder_;
  Matrix number_sum_;
  Matrix raised_sum_;
};

/// Right-hand side of the master equation at time t. The state-dependent law reads
/// nS = Tr[a^+a rho] from rho itself.
template <typename Scalar>
typename FockDensityMatrix<Scalar>::Matrix lindblad_rhs(const FockDensityMatrix<Scalar>& rho, Scalar t,
                                                       const RateModel<Scalar>& model) {
  if (!(t >= 0)) throw DomainError("time must be >= 0");
  const Scalar n_s = detail::mean_occupation(rho.matrix());
  return Dissipator<Scalar>(rho.dim()).apply(rho.matrix(), model.rates(t, n_s));
}

/// Fixed-step RK4 integration of the master equation from rho0 over [0, cfg.t_end]. Each
/// output step is split into equal substeps when the truncated generator would otherwise
/// be outside the RK4 stability region.
/// Throws IntegrationError if the trace leaves [1 - leak_tol, 1 + 1e-9] or the smallest
/// eigenvalue drops below -pos_tol at a checkpoint.
template <typename Scalar>
Trajectory<Scalar> integrate(const FockDensityMatrix<Scalar>& rho0, const RateModel<Scalar>& model,
                             const IntegratorConfig<Scalar>& cfg) {
  using Matrix = typename FockDensityMatrix<Scalar>::Matrix;
  cfg.validate();
  const long steps = cfg.steps();
  const Scalar h = cfg.step_size();
  const Dissipator<Scalar> dissipator(rho0.dim());

  auto rhs = [&](Scalar t, const Matrix& rho) -> Matrix {
    const Scalar n_s = model.state_dependent() ? detail::mean_occupation(rho) : Scalar(0);
    return dissipator.apply(rho, model.rates(t, n_s));
  };

  Trajectory<Scalar> traj;
  auto checkpoint = [&](Scalar t, const FockDensityMatrix<Scalar>& state) {
    const Scalar lowest = state.min_eigenvalue();
    traj.checkpoints.push_back({t, lowest});
    if (lowest < -cfg.pos_tol)
      throw IntegrationError("density matrix lost positivity", t, state.trace(), lowest);
  };
  auto record = [&](Scalar t, const FockDensityMatrix<Scalar>& state) {
    const Scalar n_s = detail::mean_occupation(state.matrix());
    const bool negative = model.rates(t, n_s).negative();
    traj.times.push_back(t);
    traj.n_bar.push_back(n_s);
    traj.populations.push_back(state.populations());
    traj.trace.push_back(state.trace());
    traj.purity.push_back(state.purity());
    traj.hermiticity_error.push_back(state.hermiticity_error());
    traj.max_coherence.push_back(state.max_coherence());
    traj.negative_rate.push_back(negative ? 1 : 0);
    traj.negative_rate_seen = traj.negative_rate_seen || negative;
    traj.guideline_satisfied = traj.guideline_satisfied && model.within_feedback_guideline(t, n_s);
  };

  checkpoint(0, rho0);
  record(0, rho0);

  Matrix rho = rho0.matrix();
  for (long k = 1; k <= steps; ++k) {
    const Scalar t = static_cast<Scalar>(k - 1) * h;
    const Scalar t_next = static_cast<Scalar>(k) * h;
    const Scalar n_s = model.state_dependent() ? detail::mean_occupation(rho) : Scalar(0);
    const Scalar bound = std::max(generator_bound(model.rates(t, n_s), rho0.dim()),
                                  generator_bound(model.rates(t_next, n_s), rho0.dim()));
    const long substeps = stable_substeps(h, bound);
    traj.max_substeps = std::max(traj.max_substeps, substeps);
    const Scalar sub_h = h / static_cast<Scalar>(substeps);
    for (long j = 0; j < substeps; ++j) {
      rho = rk4_step(rhs, t + static_cast<Scalar>(j) * sub_h, rho, sub_h);
      rho = ((rho + rho.adjoint()) / Scalar(2)).eval();
    }

    const Scalar tr = rho.trace().real();
    if (!rho.allFinite() || tr < 1 - cfg.leak_tol || tr > 1 + Scalar(1e-9))
      throw IntegrationError("trace left its tolerance band", t_next, tr, 0);

    const bool at_checkpoint = k % cfg.check_every == 0 || k == steps;
    const bool at_record = k % cfg.record_every == 0 || k == steps;
    if (!at_checkpoint && !at_record) continue;
    const FockDensityMatrix<Scalar> state(rho);
    if (at_checkpoint) checkpoint(t_next, state);
    if (at_record) record(t_next, state);
  }
  return traj;
}

}  // namespace bathcool
