#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "mcad/rng.hpp"
#include "mcad/tensor.hpp"

namespace testutil {

inline double rel_err(double a, double b, double floor = 1e-8) {
    const double denom = std::max({std::fabs(a), std::fabs(b), floor});
    return std::fabs(a - b) / denom;
}

inline void fill_uniform(mcad::Tensor& t, mcad::Rng& rng, double lo = -1.0, double hi = 1.0) {
    for (double& v : t.values()) v = rng.uniform(lo, hi);
}

// Independent brute-force oracle: plain quadruple loop over the definition
// of a valid stride-1 cross-correlation. Deliberately separate from the
// library kernels.
inline mcad::Tensor naive_conv(const mcad::Tensor& in, const mcad::Tensor& w,
                               const mcad::Tensor& bias) {
    const std::size_t ic = in.extent(0), ih = in.extent(1), iw = in.extent(2);
    const std::size_t oc = w.extent(0), kh = w.extent(2), kw = w.extent(3);
    const std::size_t oh = ih - kh + 1, ow = iw - kw + 1;
    mcad::Tensor out({oc, oh, ow});
    for (std::size_t o = 0; o < oc; ++o) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                double acc = bias.size() ? bias[o] : 0.0;
                for (std::size_t c = 0; c < ic; ++c) {
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        for (std::size_t kx = 0; kx < kw; ++kx) {
                            acc += in.at(c, y + ky, x + kx) * w.at(o, c, ky, kx);
                        }
                    }
                }
                out.at(o, y, x) = acc;
            }
        }
    }
    return out;
}

// Central finite differences of a scalar function with respect to one
// parameter buffer.
inline std::vector<double> finite_diff(std::vector<double>& params,
                                       const std::function<double()>& loss, double eps = 1e-3) {
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double up = loss();
        params[i] = saved - eps;
        const double down = loss();
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * eps);
    }
    return grad;
}

inline double max_rel_err(const std::vector<double>& a, const std::vector<double>& b,
                          double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, rel_err(a[i], b[i], floor));
    }
    return worst;
}

}  // namespace testutil
