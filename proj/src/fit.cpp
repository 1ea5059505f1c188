#include "twocopy/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace twocopy::fit {

LmResult levenberg_marquardt(const NormalEquationsFn& evaluate, Params start, std::size_t n_params,
                             const LmOptions& options, const ProjectFn& project) {
  LmResult res;
  res.params = start;
  res.last = evaluate(res.params);
  res.rss = res.last.rss;
  double lambda = 1e-3;

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    const auto& ne = res.last;
    Eigen::MatrixXd a(n_params, n_params);
    Eigen::VectorXd g(n_params);
    for (std::size_t i = 0; i < n_params; ++i) {
      g(i) = ne.jtr[i];
      for (std::size_t j = 0; j < n_params; ++j) a(i, j) = ne.at(i, j);
    }
    const double diag_floor = 1e-12 * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd damped = a;
      for (std::size_t i = 0; i < n_params; ++i) {
        damped(i, i) += lambda * std::max(a(i, i), diag_floor);
      }
      Eigen::VectorXd step = damped.ldlt().solve(g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Params trial = res.params;
      for (std::size_t i = 0; i < n_params; ++i) trial[i] += step(i);
      if (project) project(trial);
      auto trial_ne = evaluate(trial);
      if (std::isfinite(trial_ne.rss) && trial_ne.rss <= res.rss) {
        double step_norm = 0.0;
        double param_norm = 0.0;
        for (std::size_t i = 0; i < n_params; ++i) {
          step_norm += (trial[i] - res.params[i]) * (trial[i] - res.params[i]);
          param_norm += res.params[i] * res.params[i];
        }
        const double decrease = res.rss - trial_ne.rss;
        res.params = trial;
        res.rss = trial_ne.rss;
        res.last = trial_ne;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (std::sqrt(step_norm) <= options.step_tolerance * (std::sqrt(param_norm) + options.step_tolerance) ||
            decrease <= options.rss_tolerance * res.rss || res.rss == 0.0) {
          res.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at any damping: a stationary point.
      res.converged = true;
    }
    if (res.converged) {
      ++res.iterations;
      break;
    }
  }
  return res;
}

}  // namespace twocopy::fit
