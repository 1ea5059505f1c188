#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "twocopy/protocol.hpp"

namespace twocopy::chsh {

struct BasisAssignment {
  double phi_x0 = 0.0;
  double phi_x1 = 0.0;
  double phi_y0 = 0.0;
  double phi_y1 = 0.0;

  PhaseSettings settings(int x, int y) const {
    return PhaseSettings{x == 0 ? phi_x0 : phi_x1, y == 0 ? phi_y0 : phi_y1};
  }
  /// phi_x0 = phi_y0 = theta, phi_x1 = phi_y1 = -3 theta.
  static BasisAssignment from_theta(double theta);
  /// (pi/8, -3pi/8, pi/8, -3pi/8)
  static BasisAssignment standard();
};

/// |C00 + C01 + C10 - C11| for correlations indexed [x][y].
double combine(const std::array<std::array<double, 2>, 2>& c);

struct ChshResult {
  double value = 0.0;
  std::array<std::array<double, 2>, 2> correlations{};  // signed, [x][y]
  PostSelectionMode mode = PostSelectionMode::CrossLabOnly;
  std::optional<double> theta;
};

double correlation(const GroupProbabilities& g);

ChshResult chsh_value(const BasisAssignment& basis, double v, PostSelectionMode mode);

/// Closed form on the theta-parameterized bases. DiscardDoubles is rejected.
double closed_form_chsh(double theta, double v, PostSelectionMode mode);

struct Optimum {
  double theta = 0.0;
  double value = 0.0;
};

/// Grid scan on [0, pi/2] then derivative bisection; ties go to the smallest theta.
Optimum optimize_theta(double v, PostSelectionMode mode);

/// Smallest v whose optimal CHSH exceeds 2, found by bisection.
double violation_threshold(PostSelectionMode mode);

std::vector<std::pair<double, double>> theory_curve(PostSelectionMode mode,
                                                    std::span<const double> v_grid);

}  // namespace twocopy::chsh
