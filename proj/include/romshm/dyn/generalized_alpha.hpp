#pragma once

#include <cmath>
#include <string>

#include "romshm/common.hpp"

namespace romshm::dyn {

/// One-parameter generalized-alpha family, parametrized by the spectral
/// radius at infinite frequency. rho_inf = 1 gives the non-dissipative
/// midpoint scheme; rho_inf = 0 gives maximal high-frequency damping.
struct GenAlphaParams {
  double rho_inf = 1.0;

  void validate() const {
    if (!(rho_inf >= 0.0 && rho_inf <= 1.0))
      throw ConfigError("generalized-alpha: rho_inf must be in [0, 1]");
  }

  double alpha_m() const { return (2.0 * rho_inf - 1.0) / (rho_inf + 1.0); }
  double alpha_f() const { return rho_inf / (rho_inf + 1.0); }
  double gamma() const { return 0.5 - alpha_m() + alpha_f(); }
  double beta() const {
    const double s = 1.0 - alpha_m() + alpha_f();
    return 0.25 * s * s;
  }
};

/// Sampled trajectory at t_l = l dt, l = 1..L.
struct StateHistory {
  Mat displacement;  // n x L
  Mat velocity;      // n x L
  Mat acceleration;  // n x L
  double dt = 0.0;

  int sample_count() const { return static_cast<int>(displacement.cols()); }
  int dof_count() const { return static_cast<int>(displacement.rows()); }
};

namespace detail {

inline void check_pivots(const Vec& d, const std::string& what) {
  const double top = d.cwiseAbs().maxCoeff();
  if (top == 0.0 || d.cwiseAbs().minCoeff() < 1e-14 * top)
    throw NumericalError("integrate: " + what + " is singular");
}

template <typename MatrixT>
struct DirectSolver;

template <>
struct DirectSolver<Mat> {
  Eigen::LDLT<Mat> solver;
  void factor(const Mat& a, const std::string& what) {
    solver.compute(a);
    if (solver.info() != Eigen::Success)
      throw NumericalError("integrate: failed to factor " + what);
    check_pivots(solver.vectorD(), what);
  }
  Vec solve(const Vec& b) const { return solver.solve(b); }
};

template <>
struct DirectSolver<SpMat> {
  Eigen::SimplicialLDLT<SpMat> solver;
  void factor(const SpMat& a, const std::string& what) {
    solver.compute(a);
    if (solver.info() != Eigen::Success)
      throw NumericalError("integrate: failed to factor " + what);
    check_pivots(solver.vectorD(), what);
  }
  Vec solve(const Vec& b) const { return solver.solve(b); }
};

}  // namespace detail

/// Integrate M v'' + K v = f(t) from (v0, v0_dot) and return the sampled
/// state at t_l = l dt, l = 1..L. The constant effective matrix is factored
/// once and reused for every step.
template <typename MatrixT, typename LoadFn>
StateHistory integrate(const MatrixT& mass, const MatrixT& stiffness, LoadFn&& load,
                       const Vec& v0, const Vec& v0_dot, double dt, int sample_count,
                       const GenAlphaParams& params = {}) {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("integrate: dt must be > 0");
  if (sample_count < 1) throw ConfigError("integrate: sample count must be >= 1");
  const int n = static_cast<int>(mass.rows());
  if (stiffness.rows() != n || v0.size() != n || v0_dot.size() != n)
    throw ConfigError("integrate: dimension mismatch");

  const double am = params.alpha_m();
  const double af = params.alpha_f();
  const double gamma = params.gamma();
  const double beta = params.beta();

  detail::DirectSolver<MatrixT> mass_solver;
  mass_solver.factor(mass, "mass matrix");
  detail::DirectSolver<MatrixT> eff_solver;
  {
    MatrixT eff = (1.0 - am) * mass;
    eff += ((1.0 - af) * beta * dt * dt) * stiffness;
    eff_solver.factor(eff, "effective matrix");
  }

  Vec d = v0;
  Vec v = v0_dot;
  Vec a = mass_solver.solve(load(0.0) - stiffness * d);

  StateHistory history;
  history.dt = dt;
  history.displacement.resize(n, sample_count);
  history.velocity.resize(n, sample_count);
  history.acceleration.resize(n, sample_count);

  for (int l = 0; l < sample_count; ++l) {
    const double t_old = l * dt;
    const double t_new = (l + 1) * dt;
    const double t_alpha = (1.0 - af) * t_new + af * t_old;

    const Vec d_pred = d + dt * v + (dt * dt * (0.5 - beta)) * a;
    const Vec v_pred = v + (dt * (1.0 - gamma)) * a;

    Vec rhs = load(t_alpha);
    rhs.noalias() -= am * (mass * a);
    rhs.noalias() -= stiffness * (af * d + (1.0 - af) * d_pred);

    const Vec a_new = eff_solver.solve(rhs);
    d = d_pred + (beta * dt * dt) * a_new;
    v = v_pred + (gamma * dt) * a_new;
    a = a_new;

    if (!d.allFinite())
      throw NumericalError("integrate: non-finite state at step " + std::to_string(l + 1) +
                           " (t = " + std::to_string(t_new) + " s)");

    history.displacement.col(l) = d;
    history.velocity.col(l) = v;
    history.acceleration.col(l) = a;
  }
  return history;
}

/// Accelerations recovered by second differences of the displacement samples
/// (second-order one-sided stencils at the ends). Used when a trajectory
/// carries no stored accelerations.
inline Mat difference_accelerations(const Mat& displacement, double dt) {
  const int l = static_cast<int>(displacement.cols());
  if (l < 3) throw ConfigError("difference_accelerations: need at least 3 samples");
  Mat acc(displacement.rows(), l);
  const double inv = 1.0 / (dt * dt);
  for (int j = 1; j + 1 < l; ++j)
    acc.col(j) = (displacement.col(j - 1) - 2.0 * displacement.col(j) + displacement.col(j + 1)) * inv;
  if (l >= 4) {
    acc.col(0) = (2.0 * displacement.col(0) - 5.0 * displacement.col(1) +
                  4.0 * displacement.col(2) - displacement.col(3)) * inv;
    acc.col(l - 1) = (2.0 * displacement.col(l - 1) - 5.0 * displacement.col(l - 2) +
                      4.0 * displacement.col(l - 3) - displacement.col(l - 4)) * inv;
  } else {
    acc.col(0) = acc.col(1);
    acc.col(l - 1) = acc.col(1);
  }
  return acc;
}

/// Per-dof acceleration series aligned with the displacement samples: stored
/// accelerations when available, second differences otherwise.
inline Mat sensor_accelerations(const StateHistory& history) {
  if (history.acceleration.size() > 0) return history.acceleration;
  return difference_accelerations(history.displacement, history.dt);
}

}  // namespace romshm::dyn
