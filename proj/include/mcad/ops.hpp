#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mcad/tensor.hpp"

namespace mcad::ops {

/// Convolution layer parameters: kernel (outC, inC, kH, kW), bias (outC).
struct ConvParams {
    Tensor kernel;
    Tensor bias;

    int out_channels() const { return static_cast<int>(kernel.extent(0)); }
    int in_channels() const { return static_cast<int>(kernel.extent(1)); }
    int k_h() const { return static_cast<int>(kernel.extent(2)); }
    int k_w() const { return static_cast<int>(kernel.extent(3)); }

    void validate() const;
};

/// Fully-connected layer parameters: weights (outDim, inDim), bias (outDim).
struct FcParams {
    Tensor weights;
    Tensor bias;

    int out_dim() const { return static_cast<int>(weights.extent(0)); }
    int in_dim() const { return static_cast<int>(weights.extent(1)); }

    void validate() const;
};

struct ConvGrads {
    Tensor d_input;
    Tensor d_kernel;
    Tensor d_bias;
};

struct FcGrads {
    Tensor d_input;
    Tensor d_weights;
    Tensor d_bias;
};

/// Bookkeeping from pool_forward needed by the backward pass: shapes plus
/// the flat input index of each window's winner.
struct PoolContext {
    std::vector<std::size_t> in_shape;
    std::vector<std::size_t> out_shape;
    int p_h = 0;
    int p_w = 0;
    std::vector<std::uint32_t> argmax;
};

struct PoolResult {
    Tensor output;
    PoolContext ctx;
};

struct LossResult {
    double loss = 0.0;
    Tensor logit_grad;
};

/// Stride-1 cross-correlation with `pad` zero rows/columns on every border
/// (pad 0 = valid, the default). Output (outC, H+2p-kH+1, W+2p-kW+1), bias
/// added per output channel.
Tensor conv_forward(const Tensor& input, const ConvParams& params, int pad = 0);

/// Gradients of a scalar loss through conv_forward. d_bias is the
/// per-channel sum of upstream.
ConvGrads conv_backward(const Tensor& input, const ConvParams& params, const Tensor& upstream,
                        int pad = 0);

/// Non-overlapping max pooling, stride = window, trailing remainder cropped.
/// Window ties resolve to the first position in row-major scan order.
PoolResult pool_forward(const Tensor& input, int p_h, int p_w);

/// Routes each upstream value to its recorded argmax position.
Tensor pool_backward(const PoolContext& ctx, const Tensor& upstream);

Tensor relu(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& upstream);

/// Affine map weights . input + bias over the flattened input.
Tensor fc_forward(const Tensor& input, const FcParams& params);
FcGrads fc_backward(const Tensor& input, const FcParams& params, const Tensor& upstream);

/// Numerically stable softmax + negative log-likelihood.
/// logit_grad = softmax(logits) - onehot(label).
LossResult softmax_cross_entropy(const Tensor& logits, int label);

/// params -= learning_rate * grads, in place. learning_rate must be > 0
/// (use 0 at the call site by skipping the update).
void sgd_update(Tensor& params, const Tensor& grads, double learning_rate);

}  // namespace mcad::ops
