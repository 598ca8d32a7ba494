// Scalar reference kernels. These are the semantic ground truth the SIMD
// variants are equivalence-tested against; keep them boring.

#include "mcad/kernels.hpp"

namespace mcad::kern {
namespace {

void conv_forward_scalar(const double* in, const double* w, const double* bias, double* out,
                         const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    for (int oc = 0; oc < s.out_c; ++oc) {
        const double b = bias ? bias[oc] : 0.0;
        double* out_plane = out + static_cast<std::size_t>(oc) * oh * ow;
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                double acc = b;
                for (int ic = 0; ic < s.in_c; ++ic) {
                    const double* in_plane = in + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
                    const double* wk =
                        w + ((static_cast<std::size_t>(oc) * s.in_c + ic) * s.k_h) * s.k_w;
                    for (int ky = 0; ky < s.k_h; ++ky) {
                        const double* row = in_plane + static_cast<std::size_t>(y + ky) * s.in_w + x;
                        for (int kx = 0; kx < s.k_w; ++kx) {
                            acc += row[kx] * wk[ky * s.k_w + kx];
                        }
                    }
                }
                out_plane[y * ow + x] = acc;
            }
        }
    }
}

void conv_grad_weights_scalar(const double* in, const double* g, double* dw, const ConvShape& s) {
    const int oh = s.out_h();
    const int ow = s.out_w();
    for (int oc = 0; oc < s.out_c; ++oc) {
        const double* g_plane = g + static_cast<std::size_t>(oc) * oh * ow;
        for (int ic = 0; ic < s.in_c; ++ic) {
            const double* in_plane = in + static_cast<std::size_t>(ic) * s.in_h * s.in_w;
            double* dwk = dw + ((static_cast<std::size_t>(oc) * s.in_c + ic) * s.k_h) * s.k_w;
            for (int ky = 0; ky < s.k_h; ++ky) {
                for (int kx = 0; kx < s.k_w; ++kx) {
                    double acc = 0.0;
                    for (int y = 0; y < oh; ++y) {
                        const double* row = in_plane + static_cast<std::size_t>(y + ky) * s.in_w + kx;
                        const double* grow = g_plane + static_cast<std::size_t>(y) * ow;
                        for (int x = 0; x < ow; ++x) {
                            acc += row[x] * grow[x];
                        }
                    }
                    dwk[ky * s.k_w + kx] = acc;
                }
            }
        }
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void relu_forward_scalar(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* x, const double* g, double* dx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? g[i] : 0.0;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

extern const KernelTable kScalarKernels;
const KernelTable kScalarKernels = {
    "scalar",
    conv_forward_scalar,
    conv_grad_weights_scalar,
    axpy_scalar,
    relu_forward_scalar,
    relu_backward_scalar,
    dot_scalar,
};

}  // namespace mcad::kern
