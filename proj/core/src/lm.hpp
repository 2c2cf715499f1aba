#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace pickplace::detail {

// Dense Levenberg-Marquardt over a manifold state. `plus` applies a tangent
// increment; the Jacobian is taken by central differences along each tangent
// direction with the per-coordinate `steps`.
template <typename State>
struct LmProblem {
  std::function<Eigen::VectorXd(const State&)> residuals;
  std::function<State(const State&, const Eigen::VectorXd&)> plus;
  Eigen::VectorXd steps;
};

struct LmSettings {
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-10;
  int max_consecutive_rejections = 10;
  double residual_rms_floor = 1e-9;  // below this rms the fit is exact to rounding
};

enum class LmStatus { Converged, IterationLimit, Diverged };

template <typename State>
struct LmOutcome {
  State state;
  double initial_cost = 0.0;  // 0.5 * |r|^2
  double cost = 0.0;
  int iterations = 0;
  LmStatus status = LmStatus::Converged;
};

template <typename State>
Eigen::MatrixXd numeric_jacobian(const LmProblem<State>& problem, const State& x, Eigen::Index rows) {
  const Eigen::Index n = problem.steps.size();
  Eigen::MatrixXd jac(rows, n);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = problem.steps[i];
    delta[i] = h;
    const Eigen::VectorXd up = problem.residuals(problem.plus(x, delta));
    delta[i] = -h;
    const Eigen::VectorXd down = problem.residuals(problem.plus(x, delta));
    delta[i] = 0.0;
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

template <typename State>
LmOutcome<State> levenberg_marquardt(const LmProblem<State>& problem, State x, const LmSettings& settings) {
  Eigen::VectorXd r = problem.residuals(x);
  double cost = 0.5 * r.squaredNorm();
  LmOutcome<State> out{x, cost, cost, 0, LmStatus::IterationLimit};
  double lambda = 1e-3;

  for (int it = 0; it < settings.max_iterations; ++it) {
    if (cost <= 0.5 * static_cast<double>(r.size()) * settings.residual_rms_floor * settings.residual_rms_floor) {
      out.status = LmStatus::Converged;
      break;
    }
    const Eigen::MatrixXd jac = numeric_jacobian(problem, x, r.size());
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    bool stalled = false;
    for (int rejections = 0; rejections < settings.max_consecutive_rejections; ++rejections) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const double predicted = -(g.dot(step) + 0.5 * step.dot(jtj * step));
      const State candidate = problem.plus(x, step);
      const Eigen::VectorXd rc = problem.residuals(candidate);
      const double cand_cost = 0.5 * rc.squaredNorm();
      if (std::isfinite(cand_cost) && cand_cost < cost) {
        const double rel = (cost - cand_cost) / cost;
        x = candidate;
        r = rc;
        cost = cand_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        stalled = rel < settings.relative_cost_tolerance;
        break;
      }
      // A model that predicts no meaningful decrease means we sit at the minimum.
      if (!(predicted > settings.relative_cost_tolerance * 1e-2 * cost)) {
        stalled = true;
        break;
      }
      lambda *= 10.0;
    }

    out.iterations = it + 1;
    if (stalled) {
      out.status = LmStatus::Converged;
      break;
    }
    if (!accepted) {
      const double floor_cost =
          0.5 * static_cast<double>(r.size()) * settings.residual_rms_floor * settings.residual_rms_floor;
      out.status = cost <= 1e3 * floor_cost ? LmStatus::Converged : LmStatus::Diverged;
      break;
    }
  }
  out.state = x;
  out.cost = cost;
  return out;
}

}  // namespace pickplace::detail
