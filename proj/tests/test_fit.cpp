#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "twocopy/fit.hpp"
#include "twocopy/kernels.hpp"

using namespace twocopy;
using namespace twocopy::fit;

namespace {

struct DipData {
  std::vector<double> t, y, w;
};

DipData noiseless_dip(const kernels::DipParams& p) {
  DipData d;
  for (int i = 0; i < 41; ++i) {
    const double t = -3.0 + 0.15 * i;
    const double z = (t - p.center) / p.sigma;
    d.t.push_back(t);
    d.y.push_back(p.baseline * (1 - p.depth * std::exp(-0.5 * z * z)));
    d.w.push_back(1.0);
  }
  return d;
}

NormalEquationsFn dip_fn(const DipData& d) {
  return [&d](const Params& q) {
    return kernels::active().dip_normal_equations({q[0], q[1], q[2], q[3]}, d.t, d.y, d.w);
  };
}

}  // namespace

TEST(LevenbergMarquardt, RecoversNoiselessDip) {
  const kernels::DipParams truth{1000.0, 0.952, 0.2, 0.8};
  const auto d = noiseless_dip(truth);
  const auto r = levenberg_marquardt(dip_fn(d), {900.0, 0.5, 0.0, 1.2}, 4, {},
                                     [](Params& q) { q[3] = std::max(q[3], 1e-3); });
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 200);
  EXPECT_NEAR(r.params[0], truth.baseline, 1e-6);
  EXPECT_NEAR(r.params[1], truth.depth, 1e-9);
  EXPECT_NEAR(r.params[2], truth.center, 1e-9);
  EXPECT_NEAR(r.params[3], truth.sigma, 1e-9);
  EXPECT_LT(r.rss, 1e-12 * truth.baseline * truth.baseline);
}

TEST(LevenbergMarquardt, RecoversNoiselessFringe) {
  std::vector<double> phi, y, w;
  for (int i = 0; i < 36; ++i) {
    phi.push_back(i * 2 * M_PI / 36);
    y.push_back(0.05 - 0.9 * std::cos(phi.back() + 0.7));
    w.push_back(1.0);
  }
  auto fn = [&](const Params& q) {
    return kernels::active().fringe_normal_equations({q[0], q[1], q[2], 0.0, 1.0}, phi, y, w);
  };
  const auto r = levenberg_marquardt(fn, {0.5, 0.3, 0.0, 0.0}, 3);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.params[0], 0.9, 1e-9);
  EXPECT_NEAR(std::remainder(r.params[1] - 0.7, 2 * M_PI), 0.0, 1e-9);
  EXPECT_NEAR(r.params[2], 0.05, 1e-9);
}

TEST(LevenbergMarquardt, IterationBudgetIsRespected) {
  const auto d = noiseless_dip({1000.0, 0.952, 0.2, 0.8});
  LmOptions opts;
  opts.max_iterations = 1;
  const auto r = levenberg_marquardt(dip_fn(d), {100.0, 0.1, -1.0, 2.5}, 4, opts);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_FALSE(r.converged);
}

TEST(LevenbergMarquardt, ProjectionKeepsFeasibility) {
  const auto d = noiseless_dip({500.0, 0.5, 0.0, 0.05});
  int calls = 0;
  const auto r = levenberg_marquardt(dip_fn(d), {500.0, 0.5, 0.0, 2.0}, 4, {}, [&](Params& q) {
    ++calls;
    q[3] = std::clamp(q[3], 0.01, 6.0);
  });
  EXPECT_GT(calls, 0);
  EXPECT_GE(r.params[3], 0.01);
  EXPECT_LE(r.params[3], 6.0);
}
