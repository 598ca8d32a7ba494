// AVX-512F kernels, 8-wide doubles with native masking. Tail loads use
// maskz forms, which suppress faults on masked lanes, so chunked rows never
// read past the end of an allocation.
//
// The tile helpers are templated on vector count / tail-ness / kernel width
// so every inner loop has compile-time bounds; that keeps the accumulators
// in zmm registers instead of spilled stack slots.

#include "mcad/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

namespace mcad::kern {
namespace {

inline __mmask8 tail_mask8(int n) { return static_cast<__mmask8>((1u << n) - 1u); }

// ---------------------------------------------------------------------------
// conv_forward
// ---------------------------------------------------------------------------

// One (2 output channels) x (NV vectors of 8 outputs) tile of one output row.
// KW > 0 unrolls the kernel-width loop.
template <int NV, bool TAIL, int KW>
inline void fwd_tile2(const double* in, std::size_t plane_stride, const double* w0,
                      const double* w1, double b0, double b1, double* o0, double* o1,
                      const ConvShape& s, int y, int x0, __mmask8 tmask) {
    __m512d acc0[NV], acc1[NV];
    for (int v = 0; v < NV; ++v) {
        acc0[v] = _mm512_set1_pd(b0);
        acc1[v] = _mm512_set1_pd(b1);
    }
    const int kw = KW > 0 ? KW : s.k_w;
    for (int ic = 0; ic < s.in_c; ++ic) {
        const double* plane = in + ic * plane_stride;
        const double* wk0 = w0 + static_cast<std::size_t>(ic) * s.k_h * s.k_w;
        const double* wk1 = w1 + static_cast<std::size_t>(ic) * s.k_h * s.k_w;
        for (int ky = 0; ky < s.k_h; ++ky) {
            const double* row = plane + static_cast<std::size_t>(y + ky) * s.in_w + x0;
            for (int kx = 0; kx < kw; ++kx) {
                const __m512d wv0 = _mm512_set1_pd(wk0[ky * s.k_w + kx]);
                const __m512d wv1 = _mm512_set1_pd(wk1[ky * s.k_w + kx]);
                for (int v = 0; v < NV; ++v) {
                    const __m512d iv = (TAIL && v == NV - 1)
                                           ? _mm512_maskz_loadu_pd(tmask, row + kx + 8 * v)
                                           : _mm512_loadu_pd(row + kx + 8 * v);
                    acc0[v] = _mm512_fmadd_pd(iv, wv0, acc0[v]);
                    acc1[v] = _mm512_fmadd_pd(iv, wv1, acc1[v]);
                }
            }
        }
    }
    for (int v = 0; v < NV; ++v) {
        if (TAIL && v == NV - 1) {
            _mm512_mask_storeu_pd(o0 + x0 + 8 * v, tmask, acc0[v]);
            _mm512_mask_storeu_pd(o1 + x0 + 8 * v, tmask, acc1[v]);
        } else {
            _mm512_storeu_pd(o0 + x0 + 8 * v, acc0[v]);
            _mm512_storeu_pd(o1 + x0 + 8 * v, acc1[v]);
        }
    }
}

// Same tile for a single (odd trailing) output channel.
template <int NV, bool TAIL, int KW>
inline void fwd_tile1(const double* in, std::size_t plane_stride, const double* w0, double b0,
                      double* o0, const ConvShape& s, int y, int x0, __mmask8 tmask) {
    __m512d acc0[NV];
    for (int v = 0; v < NV; ++v) acc0[v] = _mm512_set1_pd(b0);
    const int kw = KW > 0 ? KW : s.k_w;
    for (int ic = 0; ic < s.in_c; ++ic) {
        const double* plane = in + ic * plane_stride;
        const double* wk0 = w0 + static_cast<std::size_t>(ic) * s.k_h * s.k_w;
        for (int ky = 0; ky < s.k_h; ++ky) {
            const double* row = plane + static_cast<std::size_t>(y + ky) * s.in_w + x0;
            for (int kx = 0; kx < kw; ++kx) {
                const __m512d wv0 = _mm512_set1_pd(wk0[ky * s.k_w + kx]);
                for (int v = 0; v < NV; ++v) {
                    const __m512d iv = (TAIL && v == NV - 1)
                                           ? _mm512_maskz_loadu_pd(tmask, row + kx + 8 * v)
                                           : _mm512_loadu_pd(row + kx + 8 * v);
                    acc0[v] = _mm512_fmadd_pd(iv, wv0, acc0[v]);
                }
            }
        }
    }
    for (int v = 0; v < NV; ++v) {
        if (TAIL && v == NV - 1) {
            _mm512_mask_storeu_pd(o0 + x0 + 8 * v, tmask, acc0[v]);
        } else {
            _mm512_storeu_pd(o0 + x0 + 8 * v, acc0[v]);
        }
    }
}

template <int KW>
void conv_forward_k(const double* in, const double* w, const double* bias, double* out,
                    const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    const std::size_t plane_stride = static_cast<std::size_t>(s.in_h) * s.in_w;
    const std::size_t wstride = static_cast<std::size_t>(s.in_c) * s.k_h * s.k_w;
    const std::size_t ostride = static_cast<std::size_t>(oh) * ow;

    const int full_tiles = ow / 32;
    const int rem = ow % 32;
    const int tail_nv = (rem + 7) / 8;
    const __mmask8 tmask = tail_mask8(rem - 8 * (tail_nv - 1) == 0 ? 8 : rem - 8 * (tail_nv - 1));

    int oc = 0;
    for (; oc + 1 < s.out_c; oc += 2) {
        const double* w0 = w + oc * wstride;
        const double* w1 = w0 + wstride;
        const double b0 = bias ? bias[oc] : 0.0;
        const double b1 = bias ? bias[oc + 1] : 0.0;
        double* o0 = out + oc * ostride;
        double* o1 = o0 + ostride;
        for (int y = 0; y < oh; ++y) {
            double* r0 = o0 + static_cast<std::size_t>(y) * ow;
            double* r1 = o1 + static_cast<std::size_t>(y) * ow;
            int x0 = 0;
            for (int t = 0; t < full_tiles; ++t, x0 += 32) {
                fwd_tile2<4, false, KW>(in, plane_stride, w0, w1, b0, b1, r0, r1, s, y, x0, 0xff);
            }
            switch (tail_nv) {
                case 1: fwd_tile2<1, true, KW>(in, plane_stride, w0, w1, b0, b1, r0, r1, s, y, x0, tmask); break;
                case 2: fwd_tile2<2, true, KW>(in, plane_stride, w0, w1, b0, b1, r0, r1, s, y, x0, tmask); break;
                case 3: fwd_tile2<3, true, KW>(in, plane_stride, w0, w1, b0, b1, r0, r1, s, y, x0, tmask); break;
                case 4: fwd_tile2<4, true, KW>(in, plane_stride, w0, w1, b0, b1, r0, r1, s, y, x0, tmask); break;
                default: break;
            }
        }
    }
    if (oc < s.out_c) {
        const double* w0 = w + oc * wstride;
        const double b0 = bias ? bias[oc] : 0.0;
        double* o0 = out + oc * ostride;
        for (int y = 0; y < oh; ++y) {
            double* r0 = o0 + static_cast<std::size_t>(y) * ow;
            int x0 = 0;
            for (int t = 0; t < full_tiles; ++t, x0 += 32) {
                fwd_tile1<4, false, KW>(in, plane_stride, w0, b0, r0, s, y, x0, 0xff);
            }
            switch (tail_nv) {
                case 1: fwd_tile1<1, true, KW>(in, plane_stride, w0, b0, r0, s, y, x0, tmask); break;
                case 2: fwd_tile1<2, true, KW>(in, plane_stride, w0, b0, r0, s, y, x0, tmask); break;
                case 3: fwd_tile1<3, true, KW>(in, plane_stride, w0, b0, r0, s, y, x0, tmask); break;
                case 4: fwd_tile1<4, true, KW>(in, plane_stride, w0, b0, r0, s, y, x0, tmask); break;
                default: break;
            }
        }
    }
}

void conv_forward_avx512(const double* in, const double* w, const double* bias, double* out,
                         const ConvShape& s) {
    switch (s.k_w) {
        case 5: conv_forward_k<5>(in, w, bias, out, s); break;
        case 3: conv_forward_k<3>(in, w, bias, out, s); break;
        case 1: conv_forward_k<1>(in, w, bias, out, s); break;
        default: conv_forward_k<0>(in, w, bias, out, s); break;
    }
}

// ---------------------------------------------------------------------------
// conv_grad_weights
// ---------------------------------------------------------------------------

// One kernel row of taps at a time: KW accumulators stay in registers, the
// upstream row is reloaded per ky (it is L1-resident).
template <int KW>
void conv_gw_k(const double* in, const double* g, double* dw, const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    const int full = ow / 8 * 8;
    const __mmask8 tmask = tail_mask8(ow - full);

    for (int oc = 0; oc < s.out_c; ++oc) {
        const double* g_plane = g + static_cast<std::size_t>(oc) * oh * ow;
        for (int ic = 0; ic < s.in_c; ++ic) {
            const double* in_plane = in + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
            double* dwk = dw + (static_cast<std::size_t>(oc) * s.in_c + ic) *
                                   (static_cast<std::size_t>(s.k_h) * s.k_w);
            for (int ky = 0; ky < s.k_h; ++ky) {
                __m512d acc[KW];
                for (int k = 0; k < KW; ++k) acc[k] = _mm512_setzero_pd();
                for (int y = 0; y < oh; ++y) {
                    const double* grow = g_plane + static_cast<std::size_t>(y) * ow;
                    const double* irow = in_plane + static_cast<std::size_t>(y + ky) * s.in_w;
                    int x = 0;
                    for (; x < full; x += 8) {
                        const __m512d gv = _mm512_loadu_pd(grow + x);
                        for (int k = 0; k < KW; ++k) {
                            acc[k] = _mm512_fmadd_pd(_mm512_loadu_pd(irow + x + k), gv, acc[k]);
                        }
                    }
                    if (x < ow) {
                        const __m512d gv = _mm512_maskz_loadu_pd(tmask, grow + x);
                        for (int k = 0; k < KW; ++k) {
                            acc[k] = _mm512_fmadd_pd(_mm512_maskz_loadu_pd(tmask, irow + x + k),
                                                     gv, acc[k]);
                        }
                    }
                }
                for (int k = 0; k < KW; ++k) dwk[ky * s.k_w + k] = _mm512_reduce_add_pd(acc[k]);
            }
        }
    }
}

// Generic kernel widths: one tap column chunk at a time.
void conv_gw_generic(const double* in, const double* g, double* dw, const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    const int full = ow / 8 * 8;
    const __mmask8 tmask = tail_mask8(ow - full);
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
                    __m512d acc[kMaxKw];
                    for (int k = 0; k < nk; ++k) acc[k] = _mm512_setzero_pd();
                    for (int y = 0; y < oh; ++y) {
                        const double* grow = g_plane + static_cast<std::size_t>(y) * ow;
                        const double* irow =
                            in_plane + static_cast<std::size_t>(y + ky) * s.in_w + kx0;
                        int x = 0;
                        for (; x < full; x += 8) {
                            const __m512d gv = _mm512_loadu_pd(grow + x);
                            for (int k = 0; k < nk; ++k) {
                                acc[k] =
                                    _mm512_fmadd_pd(_mm512_loadu_pd(irow + x + k), gv, acc[k]);
                            }
                        }
                        if (x < ow) {
                            const __m512d gv = _mm512_maskz_loadu_pd(tmask, grow + x);
                            for (int k = 0; k < nk; ++k) {
                                acc[k] = _mm512_fmadd_pd(
                                    _mm512_maskz_loadu_pd(tmask, irow + x + k), gv, acc[k]);
                            }
                        }
                    }
                    for (int k = 0; k < nk; ++k) {
                        dwk[ky * s.k_w + kx0 + k] = _mm512_reduce_add_pd(acc[k]);
                    }
                }
            }
        }
    }
}

void conv_grad_weights_avx512(const double* in, const double* g, double* dw, const ConvShape& s) {
    switch (s.k_w) {
        case 5: conv_gw_k<5>(in, g, dw, s); break;
        case 3: conv_gw_k<3>(in, g, dw, s); break;
        case 1: conv_gw_k<1>(in, g, dw, s); break;
        default: conv_gw_generic(in, g, dw, s); break;
    }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

void axpy_avx512(double a, const double* x, double* y, std::size_t n) {
    const __m512d av = _mm512_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm512_storeu_pd(y + i, _mm512_fmadd_pd(av, _mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i)));
    }
    if (i < n) {
        const __mmask8 m = tail_mask8(static_cast<int>(n - i));
        const __m512d xv = _mm512_maskz_loadu_pd(m, x + i);
        const __m512d yv = _mm512_maskz_loadu_pd(m, y + i);
        _mm512_mask_storeu_pd(y + i, m, _mm512_fmadd_pd(av, xv, yv));
    }
}

void relu_forward_avx512(const double* x, double* y, std::size_t n) {
    const __m512d zero = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm512_storeu_pd(y + i, _mm512_max_pd(_mm512_loadu_pd(x + i), zero));
    }
    if (i < n) {
        const __mmask8 m = tail_mask8(static_cast<int>(n - i));
        _mm512_mask_storeu_pd(y + i, m, _mm512_max_pd(_mm512_maskz_loadu_pd(m, x + i), zero));
    }
}

void relu_backward_avx512(const double* x, const double* g, double* dx, std::size_t n) {
    const __m512d zero = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __mmask8 pos = _mm512_cmp_pd_mask(_mm512_loadu_pd(x + i), zero, _CMP_GT_OQ);
        _mm512_storeu_pd(dx + i, _mm512_maskz_mov_pd(pos, _mm512_loadu_pd(g + i)));
    }
    if (i < n) {
        const __mmask8 m = tail_mask8(static_cast<int>(n - i));
        const __mmask8 pos = _mm512_cmp_pd_mask(_mm512_maskz_loadu_pd(m, x + i), zero, _CMP_GT_OQ);
        _mm512_mask_storeu_pd(dx + i, m,
                              _mm512_maskz_mov_pd(pos, _mm512_maskz_loadu_pd(m, g + i)));
    }
}

double dot_avx512(const double* a, const double* b, std::size_t n) {
    __m512d acc0 = _mm512_setzero_pd();
    __m512d acc1 = _mm512_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), acc0);
        acc1 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i + 8), _mm512_loadu_pd(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm512_fmadd_pd(_mm512_loadu_pd(a + i), _mm512_loadu_pd(b + i), acc0);
    }
    if (i < n) {
        const __mmask8 m = tail_mask8(static_cast<int>(n - i));
        acc1 = _mm512_fmadd_pd(_mm512_maskz_loadu_pd(m, a + i), _mm512_maskz_loadu_pd(m, b + i),
                               acc1);
    }
    return _mm512_reduce_add_pd(_mm512_add_pd(acc0, acc1));
}

}  // namespace

extern const KernelTable kAvx512Kernels;
const KernelTable kAvx512Kernels = {
    "avx512",
    conv_forward_avx512,
    conv_grad_weights_avx512,
    axpy_avx512,
    relu_forward_avx512,
    relu_backward_avx512,
    dot_avx512,
};

}  // namespace mcad::kern

#endif  // x86_64
