#pragma once

#include "twocopy/kernels.hpp"

namespace twocopy::kernels::detail {

// Lower-triangle accumulation of one weighted residual.
void accumulate(NormalEquations& ne, const double* grad, std::size_t n_params, double r, double w);
void symmetrize(NormalEquations& ne, std::size_t n_params);

// Scalar per-point updates; the AVX2 kernels use them for tails.
void dip_point(const DipParams& p, double t, double y, double w, NormalEquations& ne);
void fringe_point(const FringeParams& p, double phi, double y, double w, NormalEquations& ne);

#if defined(TWOCOPY_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

}  // namespace twocopy::kernels::detail
