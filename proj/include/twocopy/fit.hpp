#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "twocopy/kernels.hpp"

namespace twocopy::fit {

using Params = std::array<double, kernels::kMaxParams>;

struct LmOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative parameter step
  double rss_tolerance = 1e-15;   // relative rss decrease
};

struct LmResult {
  Params params{};
  double rss = 0.0;
  int iterations = 0;
  bool converged = false;
  kernels::NormalEquations last{};
};

using NormalEquationsFn = std::function<kernels::NormalEquations(const Params&)>;
// Maps a trial point back into the feasible set (e.g. sigma > 0).
using ProjectFn = std::function<void(Params&)>;

/// Damped Gauss-Newton (Levenberg-Marquardt) over n_params <= 4 parameters.
LmResult levenberg_marquardt(const NormalEquationsFn& evaluate, Params start, std::size_t n_params,
                             const LmOptions& options = {}, const ProjectFn& project = {});

}  // namespace twocopy::fit
