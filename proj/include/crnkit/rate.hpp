#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crnkit/error.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crn {

/// dx/dt = Σ_τ r(τ) (t(τ) − s(τ)) x^{s(τ)}.
inline std::vector<double> rate_vector_field(const Network& net, std::span<const double> x) {
  check_state(net, x);
  std::vector<double> dx(net.num_species(), 0.0);
  for (const auto& t : net.transitions()) {
    const double flux = t.rate * mass_action_monomial(x, t.input);
    if (flux == 0.0) continue;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const auto change = t.output[i] - t.input[i];
      if (change != 0) dx[i] += static_cast<double>(change) * flux;
    }
  }
  return dx;
}

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Central-difference Jacobian of the rate field, row-major k × k.
inline Eigen::MatrixXd rate_jacobian_fd(const Network& net, std::span<const double> x) {
  const std::size_t k = net.num_species();
  Eigen::MatrixXd jac(k, k);
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (std::size_t j = 0; j < k; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const auto fp = rate_vector_field(net, xp);
    const auto fm = rate_vector_field(net, xm);
    for (std::size_t i = 0; i < k; ++i) jac(i, j) = (fp[i] - fm[i]) / (2 * h);
    xp[j] = xm[j] = x[j];
  }
  return jac;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<ClassicalState> states;
};

enum class RateMethod { Rk4Fixed, Rk45Adaptive };

struct RateOptions {
  RateMethod method = RateMethod::Rk4Fixed;
  double step = 0.0;             // RK4 step; 0 selects the default from a Lipschitz estimate
  double output_interval = 0.0;  // 0 records every accepted step
  double rtol = 1e-10;           // RK45 only
  double atol = 1e-12;           // RK45 only
  std::size_t max_steps = 50'000'000;
};

inline constexpr double kNegativeClampThreshold = 1e-12;

/// h = min(0.01, 0.1 / L) with L the ∞-norm of the Jacobian at x0.
inline double default_rk4_step(const Network& net, std::span<const double> x0) {
  if (net.num_species() == 0) return 0.01;
  const double lip = rate_jacobian_fd(net, x0).cwiseAbs().rowwise().sum().maxCoeff();
  return lip > 0.0 ? std::min(0.01, 0.1 / lip) : 0.01;
}

namespace detail {

inline void clamp_or_throw(std::vector<double>& x, double t) {
  for (auto& v : x) {
    if (v >= 0.0) continue;
    if (v >= -kNegativeClampThreshold) {
      v = 0.0;
    } else {
      throw Error(ErrorCode::Neg, "state entry " + std::to_string(v) + " at t=" + std::to_string(t) +
                                      "; reduce the step size");
    }
  }
}

inline std::vector<double> axpy(std::span<const double> x, double a, std::span<const double> y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

inline std::vector<double> rk4_step(const Network& net, std::span<const double> x, double h) {
  const auto k1 = rate_vector_field(net, x);
  const auto k2 = rate_vector_field(net, axpy(x, h / 2, k1));
  const auto k3 = rate_vector_field(net, axpy(x, h / 2, k2));
  const auto k4 = rate_vector_field(net, axpy(x, h, k3));
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

// Dormand–Prince 5(4) tableau.
struct DormandPrince {
  static constexpr std::array<double, 7> c{0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static constexpr std::array<double, 7> b5{35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static constexpr std::array<double, 7> b4{5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                                            -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

}  // namespace detail

/// Integrates the rate equation from x0 over (0, t_end].
inline Trajectory integrate_rate(const Network& net, const ClassicalState& x0, double t_end,
                                 const RateOptions& opts = {}) {
  check_state(net, x0);
  if (!(t_end > 0.0)) throw Error(ErrorCode::Dim, "t_end must be positive");
  for (double v : x0)
    if (v < 0.0 || !std::isfinite(v)) throw Error(ErrorCode::Neg, "initial state has a negative entry");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  double next_output = opts.output_interval;
  auto record = [&](double t, const std::vector<double>& x, bool last) {
    if (opts.output_interval <= 0.0 || last || t >= next_output * (1 - 1e-12)) {
      traj.times.push_back(t);
      traj.states.push_back(x);
      while (opts.output_interval > 0.0 && next_output <= t * (1 + 1e-12)) next_output += opts.output_interval;
    }
  };

  std::vector<double> x = x0;
  double t = 0.0;
  std::size_t steps = 0;

  if (opts.method == RateMethod::Rk4Fixed) {
    const double h0 = opts.step > 0.0 ? opts.step : default_rk4_step(net, x0);
    const auto n = static_cast<std::size_t>(std::ceil(t_end / h0 - 1e-9));
    for (std::size_t s = 1; s <= n; ++s) {
      const double t_next = s == n ? t_end : static_cast<double>(s) * h0;
      x = detail::rk4_step(net, x, t_next - t);
      t = t_next;
      detail::clamp_or_throw(x, t);
      record(t, x, s == n);
      if (++steps > opts.max_steps) throw Error(ErrorCode::Step, "step budget exhausted");
    }
    return traj;
  }

  using DP = detail::DormandPrince;
  const std::size_t k = x.size();
  double h = opts.step > 0.0 ? opts.step : std::min(0.01, t_end);
  std::array<std::vector<double>, 7> stage;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, t)) throw Error(ErrorCode::Step, "adaptive step underflow at t=" + std::to_string(t));
    for (std::size_t s = 0; s < 7; ++s) {
      std::vector<double> xs = x;
      for (std::size_t j = 0; j < s; ++j)
        for (std::size_t i = 0; i < k; ++i) xs[i] += h * DP::a[s][j] * stage[j][i];
      stage[s] = rate_vector_field(net, xs);
    }
    std::vector<double> x5(k), x4(k);
    double err = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double s5 = 0.0, s4 = 0.0;
      for (std::size_t s = 0; s < 7; ++s) {
        s5 += DP::b5[s] * stage[s][i];
        s4 += DP::b4[s] * stage[s][i];
      }
      x5[i] = x[i] + h * s5;
      x4[i] = x[i] + h * s4;
      const double scale = opts.atol + opts.rtol * std::max(std::abs(x[i]), std::abs(x5[i]));
      err = std::max(err, std::abs(x5[i] - x4[i]) / scale);
    }
    if (err <= 1.0) {
      t += h;
      x = std::move(x5);
      detail::clamp_or_throw(x, t);
      record(t, x, t >= t_end);
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (++steps > opts.max_steps) throw Error(ErrorCode::Step, "step budget exhausted");
  }
  return traj;
}

struct EquilibriumOptions {
  double max_time = 1e5;
  std::size_t max_newton = 100;
};

/// Relaxes x0 under the rate equation until the field is small, then polishes
/// with damped Gauss–Newton confined to x0 + span(stoichiometric columns).
inline ClassicalState find_equilibrium(const Network& net, const ClassicalState& x0, double tol,
                                       const EquilibriumOptions& opts = {}) {
  check_state(net, x0);
  if (!(tol > 0.0)) throw Error(ErrorCode::Dim, "tolerance must be positive");
  auto residual = [&](const std::vector<double>& x) { return inf_norm(rate_vector_field(net, x)); };
  auto converged = [&](const std::vector<double>& x) { return residual(x) <= tol * (1.0 + inf_norm(x)); };

  std::vector<double> x = x0;
  if (converged(x)) return x;

  RateOptions ro;
  ro.method = RateMethod::Rk45Adaptive;
  ro.output_interval = 0.0;
  ro.rtol = 1e-8;
  ro.atol = 1e-12;
  double elapsed = 0.0, chunk = 1.0;
  while (!converged(x) && elapsed < opts.max_time) {
    const double span = std::min(chunk, opts.max_time - elapsed);
    x = integrate_rate(net, x, span, ro).states.back();
    elapsed += span;
    chunk *= 2;
    // Close enough for Newton to take over.
    if (residual(x) <= 1e-4 * (1.0 + inf_norm(x))) break;
  }

  // Basis for the stoichiometric subspace: independent columns of Γ.
  const auto gamma = stoichiometric_matrix(net);
  const auto echelon = reduced_row_echelon(transpose(gamma));
  const std::size_t k = net.num_species();
  const std::size_t r = echelon.rank();
  if (r > 0) {
    Eigen::MatrixXd basis(k, r);
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t i = 0; i < k; ++i) basis(i, c) = echelon.rows[c][i].convert_to<double>();

    double f_norm = residual(x);
    for (std::size_t it = 0; it < opts.max_newton; ++it) {
      const auto f = rate_vector_field(net, x);
      const Eigen::MatrixXd js = rate_jacobian_fd(net, x) * basis;
      const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(k));
      const Eigen::VectorXd dy = js.colPivHouseholderQr().solve(rhs);
      const Eigen::VectorXd dx = basis * dy;
      double lambda = 1.0;
      bool improved = false;
      while (lambda > 1e-6) {
        std::vector<double> trial(k);
        bool nonneg = true;
        for (std::size_t i = 0; i < k; ++i) {
          trial[i] = x[i] + lambda * dx(static_cast<Eigen::Index>(i));
          if (trial[i] < 0.0) nonneg = false;
        }
        if (nonneg) {
          const double trial_norm = residual(trial);
          if (trial_norm < f_norm) {
            x = std::move(trial);
            f_norm = trial_norm;
            improved = true;
            break;
          }
        }
        lambda /= 2;
      }
      if (!improved || f_norm == 0.0) break;
    }
  }

  if (!converged(x))
    throw Error(ErrorCode::NoConv, "rate field norm " + std::to_string(residual(x)) + " above tolerance");
  return x;
}

}  // namespace crn
