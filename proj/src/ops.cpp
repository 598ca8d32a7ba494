#include "mcad/ops.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "mcad/errors.hpp"
#include "mcad/kernels.hpp"

namespace mcad::ops {

namespace {

using kern::ConvShape;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

/// Copies a (C,H,W) tensor into a zero-filled (C,H+2ph,W+2pw) buffer.
Tensor pad_chw(const Tensor& t, int pad_h, int pad_w) {
    const std::size_t c = t.extent(0), h = t.extent(1), w = t.extent(2);
    Tensor out({c, h + 2 * pad_h, w + 2 * pad_w});
    const std::size_t pw = w + 2 * pad_w;
    for (std::size_t ic = 0; ic < c; ++ic) {
        const double* src = t.data() + ic * h * w;
        double* dst = out.data() + ic * (h + 2 * pad_h) * pw + pad_h * pw + pad_w;
        for (std::size_t y = 0; y < h; ++y) {
            std::memcpy(dst + y * pw, src + y * w, w * sizeof(double));
        }
    }
    return out;
}

/// wT[ic][oc][ky][kx] = w[oc][ic][kH-1-ky][kW-1-kx] -- the kernel that turns
/// the input-gradient full correlation into one more valid forward pass.
Tensor flip_transpose(const Tensor& w) {
    const std::size_t oc = w.extent(0), ic = w.extent(1), kh = w.extent(2), kw = w.extent(3);
    Tensor out({ic, oc, kh, kw});
    for (std::size_t o = 0; o < oc; ++o) {
        for (std::size_t i = 0; i < ic; ++i) {
            const double* src = w.data() + (o * ic + i) * kh * kw;
            double* dst = out.data() + (i * oc + o) * kh * kw;
            for (std::size_t y = 0; y < kh; ++y) {
                for (std::size_t x = 0; x < kw; ++x) {
                    dst[y * kw + x] = src[(kh - 1 - y) * kw + (kw - 1 - x)];
                }
            }
        }
    }
    return out;
}

ConvShape conv_shape(const Tensor& input, const ConvParams& params, int pad) {
    params.validate();
    require(input.rank() == 3, "conv input must be rank 3 (C,H,W), got shape " +
                                   shape_str(input.shape()));
    require(pad >= 0, "conv pad must be >= 0");
    const int ic = static_cast<int>(input.extent(0));
    const int h = static_cast<int>(input.extent(1));
    const int w = static_cast<int>(input.extent(2));
    require(ic == params.in_channels(),
            "conv input has " + std::to_string(ic) + " channels, kernel expects " +
                std::to_string(params.in_channels()));
    require(h + 2 * pad >= params.k_h() && w + 2 * pad >= params.k_w(),
            "conv input " + shape_str(input.shape()) + " smaller than kernel " +
                shape_str(params.kernel.shape()) + " at pad " + std::to_string(pad));
    ConvShape s;
    s.in_c = ic;
    s.in_h = h + 2 * pad;
    s.in_w = w + 2 * pad;
    s.out_c = params.out_channels();
    s.k_h = params.k_h();
    s.k_w = params.k_w();
    return s;
}

}  // namespace

void ConvParams::validate() const {
    if (kernel.rank() != 4) {
        throw ShapeError("conv kernel must be rank 4 (outC,inC,kH,kW), got " +
                         shape_str(kernel.shape()));
    }
    if (bias.rank() != 1 || bias.extent(0) != kernel.extent(0)) {
        throw ShapeError("conv bias must be rank 1 of outC=" + std::to_string(kernel.extent(0)) +
                         ", got " + shape_str(bias.shape()));
    }
}

void FcParams::validate() const {
    if (weights.rank() != 2) {
        throw ShapeError("fc weights must be rank 2 (outDim,inDim), got " +
                         shape_str(weights.shape()));
    }
    if (bias.rank() != 1 || bias.extent(0) != weights.extent(0)) {
        throw ShapeError("fc bias must be rank 1 of outDim=" + std::to_string(weights.extent(0)) +
                         ", got " + shape_str(bias.shape()));
    }
}

Tensor conv_forward(const Tensor& input, const ConvParams& params, int pad) {
    const ConvShape s = conv_shape(input, params, pad);
    Tensor out({static_cast<std::size_t>(s.out_c), static_cast<std::size_t>(s.out_h()),
                static_cast<std::size_t>(s.out_w())});
    if (pad == 0) {
        kern::kernels().conv_forward(input.data(), params.kernel.data(), params.bias.data(),
                                     out.data(), s);
    } else {
        const Tensor padded = pad_chw(input, pad, pad);
        kern::kernels().conv_forward(padded.data(), params.kernel.data(), params.bias.data(),
                                     out.data(), s);
    }
    return out;
}

ConvGrads conv_backward(const Tensor& input, const ConvParams& params, const Tensor& upstream,
                        int pad) {
    const ConvShape s = conv_shape(input, params, pad);
    require(upstream.rank() == 3 &&
                upstream.extent(0) == static_cast<std::size_t>(s.out_c) &&
                upstream.extent(1) == static_cast<std::size_t>(s.out_h()) &&
                upstream.extent(2) == static_cast<std::size_t>(s.out_w()),
            "conv upstream gradient shape " + shape_str(upstream.shape()) +
                " does not match forward output");

    ConvGrads grads;
    grads.d_bias = Tensor({static_cast<std::size_t>(s.out_c)});
    const std::size_t plane = static_cast<std::size_t>(s.out_h()) * s.out_w();
    for (int oc = 0; oc < s.out_c; ++oc) {
        double acc = 0.0;
        const double* g = upstream.data() + oc * plane;
        for (std::size_t i = 0; i < plane; ++i) acc += g[i];
        grads.d_bias[oc] = acc;
    }

    grads.d_kernel = Tensor(params.kernel.shape());
    const Tensor padded = pad > 0 ? pad_chw(input, pad, pad) : Tensor();
    const double* in_ptr = pad > 0 ? padded.data() : input.data();
    kern::kernels().conv_grad_weights(in_ptr, upstream.data(), grads.d_kernel.data(), s);

    // d_input: full correlation of upstream with the flipped, channel-swapped
    // kernel, phrased as a valid pass over an upstream padded by k-1-pad.
    const int gpad_h = s.k_h - 1 - pad;
    const int gpad_w = s.k_w - 1 - pad;
    require(gpad_h >= 0 && gpad_w >= 0, "conv pad must be < kernel size");
    const Tensor wt = flip_transpose(params.kernel);
    const bool need_gpad = gpad_h > 0 || gpad_w > 0;
    const Tensor gp = need_gpad ? pad_chw(upstream, gpad_h, gpad_w) : Tensor();
    const double* gp_ptr = need_gpad ? gp.data() : upstream.data();
    ConvShape bs;
    bs.in_c = s.out_c;
    bs.in_h = s.out_h() + 2 * gpad_h;
    bs.in_w = s.out_w() + 2 * gpad_w;
    bs.out_c = s.in_c;
    bs.k_h = s.k_h;
    bs.k_w = s.k_w;
    grads.d_input = Tensor(input.shape());
    kern::kernels().conv_forward(gp_ptr, wt.data(), nullptr, grads.d_input.data(), bs);
    return grads;
}

PoolResult pool_forward(const Tensor& input, int p_h, int p_w) {
    require(input.rank() == 3, "pool input must be rank 3 (C,H,W), got " +
                                   shape_str(input.shape()));
    require(p_h >= 1 && p_w >= 1, "pool window must be >= 1");
    const std::size_t c = input.extent(0), h = input.extent(1), w = input.extent(2);
    if (static_cast<std::size_t>(p_h) > h || static_cast<std::size_t>(p_w) > w) {
        throw ShapeError("pool window (" + std::to_string(p_h) + "," + std::to_string(p_w) +
                         ") larger than input " + shape_str(input.shape()));
    }
    const std::size_t oh = h / p_h;
    const std::size_t ow = w / p_w;

    PoolResult res;
    res.output = Tensor({c, oh, ow});
    res.ctx.in_shape = input.shape();
    res.ctx.out_shape = res.output.shape();
    res.ctx.p_h = p_h;
    res.ctx.p_w = p_w;
    res.ctx.argmax.resize(c * oh * ow);

    const double* in = input.data();
    double* out = res.output.data();
    std::size_t o = 0;
    for (std::size_t ic = 0; ic < c; ++ic) {
        const double* plane = in + ic * h * w;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
                const std::size_t y0 = oy * p_h;
                const std::size_t x0 = ox * p_w;
                double best = plane[y0 * w + x0];
                std::size_t best_idx = y0 * w + x0;
                for (std::size_t dy = 0; dy < static_cast<std::size_t>(p_h); ++dy) {
                    for (std::size_t dx = 0; dx < static_cast<std::size_t>(p_w); ++dx) {
                        const std::size_t idx = (y0 + dy) * w + (x0 + dx);
                        if (plane[idx] > best) {
                            best = plane[idx];
                            best_idx = idx;
                        }
                    }
                }
                out[o] = best;
                res.ctx.argmax[o] = static_cast<std::uint32_t>(ic * h * w + best_idx);
            }
        }
    }
    return res;
}

Tensor pool_backward(const PoolContext& ctx, const Tensor& upstream) {
    require(upstream.shape() == ctx.out_shape,
            "pool upstream gradient shape " + shape_str(upstream.shape()) +
                " does not match pool output " + shape_str(ctx.out_shape));
    Tensor d_input(ctx.in_shape);
    if (ctx.argmax.size() != upstream.size()) {
        throw DomainError("pool index map inconsistent with shapes (internal)");
    }
    for (std::size_t i = 0; i < ctx.argmax.size(); ++i) {
        if (ctx.argmax[i] >= d_input.size()) {
            throw DomainError("pool index map out of range (internal)");
        }
        d_input[ctx.argmax[i]] += upstream[i];
    }
    return d_input;
}

Tensor relu(const Tensor& input) {
    Tensor out(input.shape());
    kern::kernels().relu_forward(input.data(), out.data(), input.size());
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& upstream) {
    require(input.same_shape(upstream), "relu upstream gradient shape " +
                                            shape_str(upstream.shape()) + " does not match input " +
                                            shape_str(input.shape()));
    Tensor out(input.shape());
    kern::kernels().relu_backward(input.data(), upstream.data(), out.data(), input.size());
    return out;
}

Tensor fc_forward(const Tensor& input, const FcParams& params) {
    params.validate();
    require(input.size() == static_cast<std::size_t>(params.in_dim()),
            "fc input length " + std::to_string(input.size()) + " != inDim " +
                std::to_string(params.in_dim()));
    const int out_dim = params.out_dim();
    const int in_dim = params.in_dim();
    Tensor out({static_cast<std::size_t>(out_dim)});
    const auto& k = kern::kernels();
    for (int o = 0; o < out_dim; ++o) {
        out[o] = k.dot(params.weights.data() + static_cast<std::size_t>(o) * in_dim, input.data(),
                       in_dim) +
                 params.bias[o];
    }
    return out;
}

FcGrads fc_backward(const Tensor& input, const FcParams& params, const Tensor& upstream) {
    params.validate();
    require(input.size() == static_cast<std::size_t>(params.in_dim()),
            "fc input length " + std::to_string(input.size()) + " != inDim " +
                std::to_string(params.in_dim()));
    require(upstream.rank() == 1 && upstream.extent(0) == static_cast<std::size_t>(params.out_dim()),
            "fc upstream gradient shape " + shape_str(upstream.shape()) + " != outDim " +
                std::to_string(params.out_dim()));
    const int out_dim = params.out_dim();
    const int in_dim = params.in_dim();
    const auto& k = kern::kernels();

    FcGrads grads;
    grads.d_bias = upstream;
    grads.d_weights = Tensor(params.weights.shape());
    grads.d_input = Tensor(input.shape());
    for (int o = 0; o < out_dim; ++o) {
        const std::size_t row = static_cast<std::size_t>(o) * in_dim;
        k.axpy(upstream[o], input.data(), grads.d_weights.data() + row, in_dim);
        k.axpy(upstream[o], params.weights.data() + row, grads.d_input.data(), in_dim);
    }
    return grads;
}

LossResult softmax_cross_entropy(const Tensor& logits, int label) {
    if (logits.rank() != 1 || logits.size() < 2) {
        throw ShapeError("softmax_cross_entropy expects a rank-1 logit vector, got " +
                         shape_str(logits.shape()));
    }
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
        throw DomainError("label " + std::to_string(label) + " out of range for " +
                          std::to_string(logits.size()) + " classes");
    }
    const std::size_t n = logits.size();
    double m = logits[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, logits[i]);

    LossResult res;
    res.logit_grad = Tensor(logits.shape());
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res.logit_grad[i] = std::exp(logits[i] - m);
        z += res.logit_grad[i];
    }
    for (std::size_t i = 0; i < n; ++i) res.logit_grad[i] /= z;
    res.loss = std::log(z) - (logits[label] - m);
    res.logit_grad[label] -= 1.0;
    return res;
}

void sgd_update(Tensor& params, const Tensor& grads, double learning_rate) {
    require(params.same_shape(grads), "sgd_update shapes differ: " + shape_str(params.shape()) +
                                          " vs " + shape_str(grads.shape()));
    if (learning_rate <= 0.0) {
        throw DomainError("learning rate must be > 0, got " + std::to_string(learning_rate));
    }
    kern::kernels().axpy(-learning_rate, grads.data(), params.data(), params.size());
}

}  // namespace mcad::ops
