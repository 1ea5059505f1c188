#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The active table is chosen once at first use from CPU features; setting
// TWOCOPY_SIMD=scalar in the environment forces the reference path.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace twocopy::kernels {

inline constexpr std::size_t kMaxParams = 4;

// Gauss-Newton normal equations for residuals r = y - model, J = d model / d p.
struct NormalEquations {
  std::array<double, kMaxParams * kMaxParams> jtj{};
  std::array<double, kMaxParams> jtr{};
  double rss = 0.0;

  double& at(std::size_t i, std::size_t j) { return jtj[i * kMaxParams + j]; }
  double at(std::size_t i, std::size_t j) const { return jtj[i * kMaxParams + j]; }
};

// counts(t) = baseline * (1 - depth * exp(-(t - center)^2 / (2 sigma^2)))
struct DipParams {
  double baseline;
  double depth;
  double center;
  double sigma;
};

// corr(phi) = offset - amplitude * (shape_a + shape_b * cos(phi + phase))
struct FringeParams {
  double amplitude;
  double phase;
  double offset;
  double shape_a;
  double shape_b;
};

struct KernelTable {
  std::string_view name;

  void (*sincos)(std::span<const double> x, std::span<double> sin_out, std::span<double> cos_out);
  void (*exp)(std::span<const double> x, std::span<double> out);

  // Parameter order: baseline, depth, center, sigma.
  NormalEquations (*dip_normal_equations)(const DipParams& p, std::span<const double> t,
                                          std::span<const double> y, std::span<const double> w);
  // Parameter order: amplitude, phase, offset.
  NormalEquations (*fringe_normal_equations)(const FringeParams& p, std::span<const double> phi,
                                             std::span<const double> y, std::span<const double> w);
};

const KernelTable& scalar_table();
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();
const KernelTable& active();

}  // namespace twocopy::kernels
