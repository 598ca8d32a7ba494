// AVX2+FMA kernels, 4-wide doubles. Only reachable through the dispatch
// table after a cpuid check; tails use VMASKMOV loads so no read ever
// crosses the end of a tensor allocation.

#include "mcad/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

namespace mcad::kern {
namespace {

inline __m256i tail_mask4(int n) {
    alignas(32) static const long long kMask[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kMask + 4 - n));
}

// Two output channels share every input load; NOC is 1 only for the odd
// trailing channel.
template <int NOC>
void conv_fwd_block(const double* in, const double* w, const double* bias, double* out, int oc,
                    const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    const std::size_t wstride = static_cast<std::size_t>(s.in_c) * s.k_h * s.k_w;
    const std::size_t ostride = static_cast<std::size_t>(oh) * ow;
    constexpr int kXTile = 16;

    const double* wbase[NOC];
    double* obase[NOC];
    __m256d bv[NOC];
    for (int c = 0; c < NOC; ++c) {
        wbase[c] = w + (oc + c) * wstride;
        obase[c] = out + (oc + c) * ostride;
        bv[c] = _mm256_set1_pd(bias ? bias[oc + c] : 0.0);
    }

    for (int y = 0; y < oh; ++y) {
        for (int x0 = 0; x0 < ow; x0 += kXTile) {
            const int nx = std::min(kXTile, ow - x0);
            const int nv = (nx + 3) / 4;
            const __m256i tmask = tail_mask4(nx - 4 * (nv - 1));

            __m256d acc[NOC][4];
            for (int c = 0; c < NOC; ++c) {
                for (int v = 0; v < nv; ++v) acc[c][v] = bv[c];
            }

            for (int ic = 0; ic < s.in_c; ++ic) {
                const double* in_plane = in + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
                for (int ky = 0; ky < s.k_h; ++ky) {
                    const double* row = in_plane + static_cast<std::size_t>(y + ky) * s.in_w + x0;
                    const std::size_t woff = (static_cast<std::size_t>(ic) * s.k_h + ky) * s.k_w;
                    for (int kx = 0; kx < s.k_w; ++kx) {
                        __m256d wv[NOC];
                        for (int c = 0; c < NOC; ++c) wv[c] = _mm256_set1_pd(wbase[c][woff + kx]);
                        for (int v = 0; v < nv - 1; ++v) {
                            const __m256d iv = _mm256_loadu_pd(row + kx + 4 * v);
                            for (int c = 0; c < NOC; ++c) {
                                acc[c][v] = _mm256_fmadd_pd(iv, wv[c], acc[c][v]);
                            }
                        }
                        const __m256d iv = _mm256_maskload_pd(row + kx + 4 * (nv - 1), tmask);
                        for (int c = 0; c < NOC; ++c) {
                            acc[c][nv - 1] = _mm256_fmadd_pd(iv, wv[c], acc[c][nv - 1]);
                        }
                    }
                }
            }

            for (int c = 0; c < NOC; ++c) {
                double* orow = obase[c] + static_cast<std::size_t>(y) * ow + x0;
                for (int v = 0; v < nv - 1; ++v) _mm256_storeu_pd(orow + 4 * v, acc[c][v]);
                _mm256_maskstore_pd(orow + 4 * (nv - 1), tmask, acc[c][nv - 1]);
            }
        }
    }
}

void conv_forward_avx2(const double* in, const double* w, const double* bias, double* out,
                       const ConvShape& s) {
    int oc = 0;
    for (; oc + 1 < s.out_c; oc += 2) conv_fwd_block<2>(in, w, bias, out, oc, s);
    if (oc < s.out_c) conv_fwd_block<1>(in, w, bias, out, oc, s);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void conv_grad_weights_avx2(const double* in, const double* g, double* dw, const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    // One row of kernel taps at a time keeps the accumulators in registers
    // (AVX2 has 16 ymm; a full 5x5 tap set does not fit).
    constexpr int kMaxKw = 8;
    for (int oc = 0; oc < s.out_c; ++oc) {
        const double* g_plane = g + static_cast<std::size_t>(oc) * oh * ow;
        for (int ic = 0; ic < s.in_c; ++ic) {
            const double* in_plane = in + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
            double* dwk = dw + (static_cast<std::size_t>(oc) * s.in_c + ic) *
                                   (static_cast<std::size_t>(s.k_h) * s.k_w);
            for (int ky = 0; ky < s.k_h; ++ky) {
                for (int kx0 = 0; kx0 < s.k_w; kx0 += kMaxKw) {
                    const int nk = std::min(kMaxKw, s.k_w - kx0);
                    __m256d acc[kMaxKw];
                    for (int k = 0; k < nk; ++k) acc[k] = _mm256_setzero_pd();
                    for (int y = 0; y < oh; ++y) {
                        const double* grow = g_plane + static_cast<std::size_t>(y) * ow;
                        const double* irow =
                            in_plane + static_cast<std::size_t>(y + ky) * s.in_w + kx0;
                        int x = 0;
                        for (; x + 4 <= ow; x += 4) {
                            const __m256d gv = _mm256_loadu_pd(grow + x);
                            for (int k = 0; k < nk; ++k) {
                                acc[k] = _mm256_fmadd_pd(_mm256_loadu_pd(irow + x + k), gv, acc[k]);
                            }
                        }
                        if (x < ow) {
                            const __m256i tmask = tail_mask4(ow - x);
                            const __m256d gv = _mm256_maskload_pd(grow + x, tmask);
                            for (int k = 0; k < nk; ++k) {
                                acc[k] = _mm256_fmadd_pd(_mm256_maskload_pd(irow + x + k, tmask),
                                                         gv, acc[k]);
                            }
                        }
                    }
                    for (int k = 0; k < nk; ++k) dwk[ky * s.k_w + kx0 + k] = hsum(acc[k]);
                }
            }
        }
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void relu_forward_avx2(const double* x, double* y, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_avx2(const double* x, const double* g, double* dx, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(g + i)));
    }
    for (; i < n; ++i) dx[i] = x[i] > 0.0 ? g[i] : 0.0;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

}  // namespace

extern const KernelTable kAvx2Kernels;
const KernelTable kAvx2Kernels = {
    "avx2",
    conv_forward_avx2,
    conv_grad_weights_avx2,
    axpy_avx2,
    relu_forward_avx2,
    relu_backward_avx2,
    dot_avx2,
};

}  // namespace mcad::kern

#endif  // x86_64
