#pragma once

#include <cstddef>
#include <string>

namespace mcad::kern {

/// Geometry of a valid (no padding, stride 1) 2-D cross-correlation.
/// Padded convolutions are expressed by the caller as a valid pass over a
/// zero-padded input buffer, so every backend implements exactly one shape
/// of inner loop.
struct ConvShape {
    int in_c = 0;
    int in_h = 0;
    int in_w = 0;
    int out_c = 0;
    int k_h = 0;
    int k_w = 0;

    int out_h() const { return in_h - k_h + 1; }
    int out_w() const { return in_w - k_w + 1; }
};

// in:   (in_c, in_h, in_w) row-major
// w:    (out_c, in_c, k_h, k_w)
// bias: out_c entries, may be null
// out:  (out_c, out_h, out_w), overwritten
using ConvForwardFn = void (*)(const double* in, const double* w, const double* bias, double* out,
                               const ConvShape& s);

// Weight gradient of the same correlation:
//   dw[oc][ic][ky][kx] = sum_{y,x} in[ic][y+ky][x+kx] * g[oc][y][x]
// g: (out_c, out_h, out_w); dw overwritten.
using ConvGradWeightsFn = void (*)(const double* in, const double* g, double* dw,
                                   const ConvShape& s);

// y += a * x
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t n);
// y[i] = max(0, x[i])
using ReluForwardFn = void (*)(const double* x, double* y, std::size_t n);
// dx[i] = x[i] > 0 ? g[i] : 0
using ReluBackwardFn = void (*)(const double* x, const double* g, double* dx, std::size_t n);
// sum_i a[i]*b[i]
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
    const char* name;
    ConvForwardFn conv_forward;
    ConvGradWeightsFn conv_grad_weights;
    AxpyFn axpy;
    ReluForwardFn relu_forward;
    ReluBackwardFn relu_backward;
    DotFn dot;
};

enum class Backend { Scalar, Avx2, Avx512 };

/// True when the current CPU (and build) can run the backend.
bool backend_available(Backend b);

/// Backend whose table kernels() currently returns. Defaults to the best
/// available one, resolved once per process.
Backend active_backend();

/// Force a specific backend (throws ConfigError if unavailable). Intended
/// for tests and for the MCAD_KERNELS override in the CLI.
void set_backend(Backend b);

/// Revert to automatic selection.
void reset_backend();

/// Active kernel table.
const KernelTable& kernels();

/// Table for an explicit backend (throws ConfigError if unavailable).
/// Lets equivalence tests compare SIMD variants against the scalar
/// reference without touching global state.
const KernelTable& kernel_table(Backend b);

std::string backend_name(Backend b);

/// Parse "scalar" / "avx2" / "avx512" / "auto"; applies the choice.
void select_backend_by_name(const std::string& name);

}  // namespace mcad::kern
