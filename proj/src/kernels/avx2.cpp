// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace twocopy::kernels {
namespace {

// Cephes double-precision sin/cos: reduction by pi/4 in three parts.
constexpr double kFourOverPi = 1.27323954473516268615;
constexpr double kDP1 = 7.85398125648498535156e-1;
constexpr double kDP2 = 3.77489470793079817668e-8;
constexpr double kDP3 = 2.69515142907905952645e-15;
constexpr double kReductionLimit = 1.0e8;

constexpr double kSinCof[] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                              2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                              8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCosCof[] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                              -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                              -1.38888888888730564116e-3,  4.16666666666665929218e-2};

// Cephes exp: Pade form on the reduced argument.
constexpr double kLog2e = 1.4426950408889634073599;
constexpr double kC1 = 6.93145751953125e-1;
constexpr double kC2 = 1.42860682030941723212e-6;
constexpr double kMaxLog = 7.09782712893383996843e2;
constexpr double kMinLog = -7.08396418532264106224e2;
constexpr double kExpP[] = {1.26177193074810590878e-4, 3.02994407707441961300e-2,
                            9.99999999999999999910e-1};
constexpr double kExpQ[] = {3.00198505138664455042e-6, 2.52448340349684104192e-3,
                            2.27265548208155028766e-1, 2.00000000000000000009e0};

inline __m256d poly(__m256d x, const double* c, int n) {
  __m256d acc = _mm256_set1_pd(c[0]);
  for (int i = 1; i < n; ++i) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(c[i]));
  return acc;
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline bool reducible(__m256d x) {
  __m256d over = _mm256_cmp_pd(abs_pd(x), _mm256_set1_pd(kReductionLimit), _CMP_GT_OQ);
  return _mm256_movemask_pd(over) == 0;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d x_sign = _mm256_and_pd(x, sign_bit);
  const __m256d ax = abs_pd(x);

  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(kFourOverPi)));
  // Round odd octants up to even.
  const __m256d half_y = _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5)));
  y = _mm256_add_pd(y, _mm256_sub_pd(y, _mm256_add_pd(half_y, half_y)));
  // Octant modulo 8, one of {0, 2, 4, 6}.
  const __m256d eighth = _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)));
  const __m256d j = _mm256_fnmadd_pd(eighth, _mm256_set1_pd(8.0), y);

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP2), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP3), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), poly(zz, kSinCof, 6), z);
  __m256d pc = _mm256_mul_pd(_mm256_mul_pd(zz, zz), poly(zz, kCosCof, 6));
  pc = _mm256_add_pd(_mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)), pc);

  const __m256d j2 = _mm256_cmp_pd(j, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d j4 = _mm256_cmp_pd(j, _mm256_set1_pd(4.0), _CMP_EQ_OQ);
  const __m256d j6 = _mm256_cmp_pd(j, _mm256_set1_pd(6.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(j2, j6);

  __m256d s = _mm256_blendv_pd(ps, pc, swap);
  __m256d c = _mm256_blendv_pd(pc, ps, swap);
  const __m256d s_neg = _mm256_or_pd(j4, j6);
  const __m256d c_neg = _mm256_or_pd(j2, j4);
  s = _mm256_xor_pd(s, _mm256_and_pd(s_neg, sign_bit));
  c = _mm256_xor_pd(c, _mm256_and_pd(c_neg, sign_bit));
  s_out = _mm256_xor_pd(s, x_sign);
  c_out = c;
}

inline __m256d exp4(__m256d x) {
  const __m256d too_small = _mm256_cmp_pd(x, _mm256_set1_pd(kMinLog), _CMP_LT_OQ);
  const __m256d too_large = _mm256_cmp_pd(x, _mm256_set1_pd(kMaxLog), _CMP_GT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, _mm256_set1_pd(kMaxLog)), _mm256_set1_pd(kMinLog));

  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, _mm256_set1_pd(kLog2e), _mm256_set1_pd(0.5)));
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC1), x);
  x = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC2), x);
  const __m256d xx = _mm256_mul_pd(x, x);
  const __m256d px = _mm256_mul_pd(x, poly(xx, kExpP, 3));
  const __m256d q = _mm256_sub_pd(poly(xx, kExpQ, 4), px);
  __m256d r = _mm256_div_pd(px, q);
  r = _mm256_fmadd_pd(r, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // r * 2^n via the exponent field; n stays within the normal range after clamping.
  __m256i ni = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(ni));

  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), too_small);
  r = _mm256_blendv_pd(r, _mm256_set1_pd(HUGE_VAL), too_large);
  return r;
}

void sincos_avx2(std::span<const double> x, std::span<double> s, std::span<double> c) {
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    if (!reducible(v)) {
      for (std::size_t k = i; k < i + 4; ++k) {
        s[k] = std::sin(x[k]);
        c[k] = std::cos(x[k]);
      }
      continue;
    }
    __m256d vs;
    __m256d vc;
    sincos4(v, vs, vc);
    _mm256_storeu_pd(s.data() + i, vs);
    _mm256_storeu_pd(c.data() + i, vc);
  }
  for (; i < x.size(); ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

void exp_avx2(std::span<const double> x, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    _mm256_storeu_pd(out.data() + i, exp4(_mm256_loadu_pd(x.data() + i)));
  }
  for (; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

NormalEquations dip_avx2(const DipParams& p, std::span<const double> t, std::span<const double> y,
                         std::span<const double> w) {
  const __m256d baseline = _mm256_set1_pd(p.baseline);
  const __m256d depth = _mm256_set1_pd(p.depth);
  const __m256d center = _mm256_set1_pd(p.center);
  const __m256d inv_s = _mm256_set1_pd(1.0 / p.sigma);
  const __m256d one = _mm256_set1_pd(1.0);

  __m256d h[10];
  __m256d g[4];
  for (auto& v : h) v = _mm256_setzero_pd();
  for (auto& v : g) v = _mm256_setzero_pd();
  __m256d rss = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= t.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(t.data() + i), center);
    const __m256d z = _mm256_mul_pd(d, inv_s);
    const __m256d zz = _mm256_mul_pd(z, z);
    const __m256d e = exp4(_mm256_mul_pd(_mm256_set1_pd(-0.5), zz));
    const __m256d bag = _mm256_mul_pd(_mm256_mul_pd(baseline, depth), e);
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), _mm256_sub_pd(baseline, bag));
    const __m256d wv = _mm256_loadu_pd(w.data() + i);

    __m256d j[4];
    j[0] = _mm256_fnmadd_pd(depth, e, one);
    j[1] = _mm256_xor_pd(_mm256_mul_pd(baseline, e), _mm256_set1_pd(-0.0));
    j[2] = _mm256_xor_pd(_mm256_mul_pd(_mm256_mul_pd(bag, d), _mm256_mul_pd(inv_s, inv_s)),
                         _mm256_set1_pd(-0.0));
    j[3] = _mm256_xor_pd(_mm256_mul_pd(_mm256_mul_pd(bag, zz), inv_s), _mm256_set1_pd(-0.0));

    const __m256d wr = _mm256_mul_pd(wv, r);
    rss = _mm256_fmadd_pd(wr, r, rss);
    int k = 0;
    for (int a = 0; a < 4; ++a) {
      g[a] = _mm256_fmadd_pd(j[a], wr, g[a]);
      const __m256d wj = _mm256_mul_pd(wv, j[a]);
      for (int b = 0; b <= a; ++b, ++k) h[k] = _mm256_fmadd_pd(wj, j[b], h[k]);
    }
  }

  NormalEquations ne;
  int k = 0;
  for (std::size_t a = 0; a < 4; ++a) {
    ne.jtr[a] = hsum(g[a]);
    for (std::size_t b = 0; b <= a; ++b, ++k) ne.at(a, b) = hsum(h[k]);
  }
  ne.rss = hsum(rss);
  for (; i < t.size(); ++i) detail::dip_point(p, t[i], y[i], w[i], ne);
  detail::symmetrize(ne, 4);
  return ne;
}

NormalEquations fringe_avx2(const FringeParams& p, std::span<const double> phi,
                            std::span<const double> y, std::span<const double> w) {
  const __m256d amp = _mm256_set1_pd(p.amplitude);
  const __m256d phase = _mm256_set1_pd(p.phase);
  const __m256d offset = _mm256_set1_pd(p.offset);
  const __m256d sa = _mm256_set1_pd(p.shape_a);
  const __m256d sb = _mm256_set1_pd(p.shape_b);
  const __m256d amp_sb = _mm256_set1_pd(p.amplitude * p.shape_b);

  __m256d h[6];
  __m256d g[3];
  for (auto& v : h) v = _mm256_setzero_pd();
  for (auto& v : g) v = _mm256_setzero_pd();
  __m256d rss = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= phi.size(); i += 4) {
    const __m256d arg = _mm256_add_pd(_mm256_loadu_pd(phi.data() + i), phase);
    if (!reducible(arg)) break;
    __m256d s;
    __m256d c;
    sincos4(arg, s, c);
    const __m256d shape = _mm256_fmadd_pd(sb, c, sa);
    const __m256d model = _mm256_fnmadd_pd(amp, shape, offset);
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), model);
    const __m256d wv = _mm256_loadu_pd(w.data() + i);

    __m256d j[3];
    j[0] = _mm256_xor_pd(shape, _mm256_set1_pd(-0.0));
    j[1] = _mm256_mul_pd(amp_sb, s);
    j[2] = _mm256_set1_pd(1.0);

    const __m256d wr = _mm256_mul_pd(wv, r);
    rss = _mm256_fmadd_pd(wr, r, rss);
    int k = 0;
    for (int a = 0; a < 3; ++a) {
      g[a] = _mm256_fmadd_pd(j[a], wr, g[a]);
      const __m256d wj = _mm256_mul_pd(wv, j[a]);
      for (int b = 0; b <= a; ++b, ++k) h[k] = _mm256_fmadd_pd(wj, j[b], h[k]);
    }
  }

  NormalEquations ne;
  int k = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    ne.jtr[a] = hsum(g[a]);
    for (std::size_t b = 0; b <= a; ++b, ++k) ne.at(a, b) = hsum(h[k]);
  }
  ne.rss = hsum(rss);
  for (; i < phi.size(); ++i) detail::fringe_point(p, phi[i], y[i], w[i], ne);
  detail::symmetrize(ne, 3);
  return ne;
}

}  // namespace

namespace detail {

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", sincos_avx2, exp_avx2, dip_avx2, fringe_avx2};
  return table;
}

}  // namespace detail
}  // namespace twocopy::kernels
