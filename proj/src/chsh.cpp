#include "twocopy/chsh.hpp"

#include <cmath>
#include <numbers>

#include "twocopy/error.hpp"

namespace twocopy::chsh {
namespace {

using std::numbers::pi;

void require_closed_form(PostSelectionMode mode) {
  if (mode == PostSelectionMode::DiscardDoubles) {
    throw ValidationError("no closed form for discard-doubles; evaluate chsh_value instead");
  }
}

// Signed bracket of the closed form and its derivative (v = 1).
double signed_form(double theta, PostSelectionMode mode) {
  if (mode == PostSelectionMode::CrossLabOnly) {
    return 3.0 * std::cos(2.0 * theta) - std::cos(6.0 * theta);
  }
  const double c1 = std::cos(theta);
  const double c3 = std::cos(3.0 * theta);
  return 3.0 * c1 * c1 - c3 * c3;
}

double signed_form_derivative(double theta, PostSelectionMode mode) {
  const double k = mode == PostSelectionMode::CrossLabOnly ? 6.0 : 3.0;
  return k * (std::sin(6.0 * theta) - std::sin(2.0 * theta));
}

}  // namespace

BasisAssignment BasisAssignment::from_theta(double theta) {
  return BasisAssignment{theta, -3.0 * theta, theta, -3.0 * theta};
}

BasisAssignment BasisAssignment::standard() { return from_theta(pi / 8.0); }

double combine(const std::array<std::array<double, 2>, 2>& c) {
  return std::abs(c[0][0] + c[0][1] + c[1][0] - c[1][1]);
}

double correlation(const GroupProbabilities& g) { return g.p_pp + g.p_mm - g.p_pm - g.p_mp; }

ChshResult chsh_value(const BasisAssignment& basis, double v, PostSelectionMode mode) {
  ChshResult r;
  r.mode = mode;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      r.correlations[x][y] = correlation(protocol::group_probabilities(basis.settings(x, y), v, mode));
    }
  }
  r.value = combine(r.correlations);
  return r;
}

double closed_form_chsh(double theta, double v, PostSelectionMode mode) {
  require_closed_form(mode);
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("overlap v must lie in [0, 1]");
  return v * std::abs(signed_form(theta, mode));
}

Optimum optimize_theta(double v, PostSelectionMode mode) {
  require_closed_form(mode);
  const double lo = 0.0;
  const double hi = pi / 2.0;
  const double step = 5e-4;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  const double h = (hi - lo) / static_cast<double>(n - 1);

  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double value = std::abs(signed_form(lo + h * static_cast<double>(i), mode));
    // Strictly better by more than rounding: earlier grid points win ties.
    if (value > best_value + 1e-12) {
      best_value = value;
      best = i;
    }
  }

  const double theta_grid = lo + h * static_cast<double>(best);
  const double sign = signed_form(theta_grid, mode) >= 0.0 ? 1.0 : -1.0;
  auto slope = [&](double t) { return sign * signed_form_derivative(t, mode); };

  double a = std::max(lo, theta_grid - h);
  double b = std::min(hi, theta_grid + h);
  double theta = theta_grid;
  if (slope(a) > 0.0 && slope(b) < 0.0) {
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      if (slope(m) > 0.0) {
        a = m;
      } else {
        b = m;
      }
    }
    theta = 0.5 * (a + b);
  } else {
    // Maximum on the boundary of the bracket.
    for (double t : {a, b}) {
      if (std::abs(signed_form(t, mode)) > std::abs(signed_form(theta, mode))) theta = t;
    }
  }
  return Optimum{theta, closed_form_chsh(theta, v, mode)};
}

double violation_threshold(PostSelectionMode mode) {
  require_closed_form(mode);
  auto violates = [mode](double v) { return optimize_theta(v, mode).value > 2.0; };
  if (!violates(1.0)) throw EstimationError("no violation attainable in this mode");
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (violates(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<std::pair<double, double>> theory_curve(PostSelectionMode mode,
                                                    std::span<const double> v_grid) {
  require_closed_form(mode);
  std::vector<std::pair<double, double>> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("theory grid value outside [0, 1]");
    out.emplace_back(v, optimize_theta(v, mode).value);
  }
  return out;
}

}  // namespace twocopy::chsh
