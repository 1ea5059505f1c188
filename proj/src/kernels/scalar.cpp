#include <cmath>

#include "kernels_internal.hpp"

namespace twocopy::kernels {
namespace {

void sincos_scalar(std::span<const double> x, std::span<double> s, std::span<double> c) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void exp_scalar(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

}  // namespace

namespace detail {

void accumulate(NormalEquations& ne, const double* grad, std::size_t n_params, double r, double w) {
  for (std::size_t i = 0; i < n_params; ++i) {
    ne.jtr[i] += w * grad[i] * r;
    for (std::size_t j = 0; j <= i; ++j) ne.at(i, j) += w * grad[i] * grad[j];
  }
  ne.rss += w * r * r;
}

void symmetrize(NormalEquations& ne, std::size_t n_params) {
  for (std::size_t i = 0; i < n_params; ++i) {
    for (std::size_t j = i + 1; j < n_params; ++j) ne.at(i, j) = ne.at(j, i);
  }
}

void dip_point(const DipParams& p, double t, double y, double w, NormalEquations& ne) {
  const double inv_s = 1.0 / p.sigma;
  const double d = t - p.center;
  const double z = d * inv_s;
  const double g = std::exp(-0.5 * z * z);
  const double bag = p.baseline * p.depth * g;
  const double model = p.baseline - bag;
  const double grad[4] = {1.0 - p.depth * g, -p.baseline * g, -bag * d * inv_s * inv_s,
                          -bag * z * z * inv_s};
  accumulate(ne, grad, 4, y - model, w);
}

void fringe_point(const FringeParams& p, double phi, double y, double w, NormalEquations& ne) {
  const double arg = phi + p.phase;
  const double c = std::cos(arg);
  const double s = std::sin(arg);
  const double model = p.offset - p.amplitude * (p.shape_a + p.shape_b * c);
  const double grad[3] = {-(p.shape_a + p.shape_b * c), p.amplitude * p.shape_b * s, 1.0};
  accumulate(ne, grad, 3, y - model, w);
}

}  // namespace detail

namespace {

NormalEquations dip_scalar(const DipParams& p, std::span<const double> t, std::span<const double> y,
                           std::span<const double> w) {
  NormalEquations ne;
  for (std::size_t i = 0; i < t.size(); ++i) detail::dip_point(p, t[i], y[i], w[i], ne);
  detail::symmetrize(ne, 4);
  return ne;
}

NormalEquations fringe_scalar(const FringeParams& p, std::span<const double> phi,
                              std::span<const double> y, std::span<const double> w) {
  NormalEquations ne;
  for (std::size_t i = 0; i < phi.size(); ++i) detail::fringe_point(p, phi[i], y[i], w[i], ne);
  detail::symmetrize(ne, 3);
  return ne;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", sincos_scalar, exp_scalar, dip_scalar, fringe_scalar};
  return table;
}

}  // namespace twocopy::kernels
