#pragma once

// Loss-gain master equation for the level populations. Level i decays to i-1 at
// rate i*g1 and is excited to i+1 at rate (i+1)*g2, which is exactly the diagonal
// restriction of the density-matrix generator in lindblad.hpp (same reflecting
// top level).

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "bathcool/dissipation.hpp"
#include "bathcool/errors.hpp"

namespace bathcool {

template <typename Scalar = double>
class PopulationVector {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit PopulationVector(Vector p) : p_(std::move(p)) {
    if (p_.size() < 2) throw DomainError("ladder must keep at least two levels");
    if (!p_.allFinite()) throw DomainError("populations must be finite");
    if (p_.minCoeff() < Scalar(-1e-12)) throw DomainError("populations must be non-negative");
    if (std::abs(p_.sum() - 1) > Scalar(1e-9)) throw DomainError("populations must sum to one");
  }

  Eigen::Index dim() const { return p_.size(); }
  const Vector& values() const { return p_; }
  Scalar operator[](Eigen::Index i) const { return p_(i); }

  Scalar mean() const {
    return (Vector::LinSpaced(dim(), 0, static_cast<Scalar>(dim() - 1)).array() * p_.array()).sum();
  }

  static PopulationVector point_mass(Eigen::Index level, Eigen::Index dim) {
    if (level < 0 || level >= dim) throw DomainError("level outside the ladder");
    Vector p = Vector::Zero(dim);
    p(level) = 1;
    return PopulationVector(std::move(p));
  }

 private:
  Vector p_;
};

/// Neighbour transition rates at one instant.
template <typename Scalar = double>
struct LadderRates {
  DecayRates<Scalar> base;

  /// i -> i-1
  Scalar down_rate(Eigen::Index i) const { return static_cast<Scalar>(i) * base.emission; }
  /// i -> i+1
  Scalar up_rate(Eigen::Index i) const { return static_cast<Scalar>(i + 1) * base.absorption; }
};

template <typename Scalar>
LadderRates<Scalar> ladder_rates(const RateModel<Scalar>& model, Scalar n_bar_S, Scalar t) {
  if (!(t >= 0)) throw DomainError("time must be >= 0");
  return {model.rates(t, n_bar_S)};
}

/// dp/dt of the loss-gain equation; the top level has no upward channel.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> ladder_rhs(
    const Eigen::MatrixBase<Derived>& p, const LadderRates<typename Derived::Scalar>& rates) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = p.size();
  const Vector level = Vector::LinSpaced(n, 0, static_cast<Scalar>(n - 1));
  const Vector down = rates.base.emission * level;
  Vector up = rates.base.absorption * (level.array() + 1).matrix();
  up(n - 1) = 0;

  Vector dp = -(down + up).cwiseProduct(p);
  dp.head(n - 1) += down.tail(n - 1).cwiseProduct(p.tail(n - 1));
  dp.tail(n - 1) += up.head(n - 1).cwiseProduct(p.head(n - 1));
  return dp;
}

/// RK4 integration of the ladder, substepped exactly like the density-matrix integrator. Returns the same record as the density-matrix integrator
/// (trace = sum p, purity = sum p^2, checkpoints hold the smallest population).
template <typename Scalar>
Trajectory<Scalar> evolve_populations(const PopulationVector<Scalar>& p0, const RateModel<Scalar>& model,
                                      const IntegratorConfig<Scalar>& cfg) {
  using Vector = typename PopulationVector<Scalar>::Vector;
  cfg.validate();
  const long steps = cfg.steps();
  const Scalar h = cfg.step_size();
  const Eigen::Index dim = p0.dim();
  const Vector level = Vector::LinSpaced(dim, 0, static_cast<Scalar>(dim - 1));
  auto mean = [&](const Vector& p) { return level.dot(p); };

  auto rhs = [&](Scalar t, const Vector& p) -> Vector {
    return ladder_rhs(p, ladder_rates(model, mean(p), t));
  };

  Trajectory<Scalar> traj;
  auto checkpoint = [&](Scalar t, const Vector& p) {
    const Scalar lowest = p.minCoeff();
    traj.checkpoints.push_back({t, lowest});
    if (lowest < -cfg.pos_tol) throw IntegrationError("population went negative", t, p.sum(), lowest);
  };
  auto record = [&](Scalar t, const Vector& p) {
    const Scalar n_s = mean(p);
    const bool negative = model.rates(t, n_s).negative();
    traj.times.push_back(t);
    traj.n_bar.push_back(n_s);
    traj.populations.push_back(p);
    traj.trace.push_back(p.sum());
    traj.purity.push_back(p.squaredNorm());
    traj.hermiticity_error.push_back(0);
    traj.max_coherence.push_back(0);
    traj.negative_rate.push_back(negative ? 1 : 0);
    traj.negative_rate_seen = traj.negative_rate_seen || negative;
    traj.guideline_satisfied = traj.guideline_satisfied && model.within_feedback_guideline(t, n_s);
  };

  Vector p = p0.values();
  checkpoint(0, p);
  record(0, p);
  for (long k = 1; k <= steps; ++k) {
    const Scalar t = static_cast<Scalar>(k - 1) * h;
    const Scalar t_next = static_cast<Scalar>(k) * h;
    const Scalar n_s = mean(p);
    const Scalar bound = std::max(generator_bound(model.rates(t, n_s), dim),
                                  generator_bound(model.rates(t_next, n_s), dim));
    const long substeps = stable_substeps(h, bound);
    traj.max_substeps = std::max(traj.max_substeps, substeps);
    const Scalar sub_h = h / static_cast<Scalar>(substeps);
    for (long j = 0; j < substeps; ++j) p = rk4_step(rhs, t + static_cast<Scalar>(j) * sub_h, p, sub_h);

    const Scalar total = p.sum();
    if (!p.allFinite() || total < 1 - cfg.leak_tol || total > 1 + Scalar(1e-9))
      throw IntegrationError("probability left its tolerance band", t_next, total, p.minCoeff());
    if (k % cfg.check_every == 0 || k == steps) checkpoint(t_next, p);
    if (k % cfg.record_every == 0 || k == steps) record(t_next, p);
  }
  return traj;
}

}  // namespace bathcool
