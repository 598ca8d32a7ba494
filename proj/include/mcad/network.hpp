#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcad/ops.hpp"
#include "mcad/tensor.hpp"

namespace mcad::net {

enum class LayerKind { Convolution, Pooling, FullyConnected, Loss };

/// One row of the network table. Field use depends on kind:
/// Convolution: k_h, k_w, channels, pad; Pooling: p_h, p_w;
/// FullyConnected: out_dim; Loss: none.
struct LayerSpec {
    LayerKind kind = LayerKind::Loss;
    int k_h = 0;
    int k_w = 0;
    int channels = 0;
    int pad = 0;
    int p_h = 0;
    int p_w = 0;
    int out_dim = 0;

    static LayerSpec conv(int k_h, int k_w, int channels, int pad = 0);
    static LayerSpec pool(int p_h, int p_w);
    static LayerSpec fc(int out_dim);
    static LayerSpec loss();
};

/// Shape of the signal after a layer (channels, height, width). The FC and
/// Loss stages carry (out_dim, 1, 1).
struct LayerShape {
    std::size_t c = 0;
    std::size_t h = 0;
    std::size_t w = 0;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;
    std::size_t input_h = 0;
    std::size_t input_w = 0;

    /// Propagates the 1-channel input through every layer. Throws ShapeError
    /// naming the first layer whose extents become invalid.
    std::vector<LayerShape> shape_trace() const;

    /// Structural checks: conv/pool before a single FC, Loss exactly once
    /// and last, plus a full shape_trace.
    void validate() const;

    /// Flattened feature count feeding the FC head.
    std::size_t fc_in_dim() const;

    std::string describe() const;

    bool operator==(const NetworkSpec&) const = default;
};

bool operator==(const LayerSpec&, const LayerSpec&);

/// The 10-row stack: C(5,5,32) S(3,3) C(5,5,32) S(3,3) C(5,5,64) S(2,2)
/// C(5,5,64) S(3,3) F(2) L, with (k-1)/2 zero padding on the convolutions
/// so the pooling chain survives small inputs.
NetworkSpec build_table1_network(std::size_t input_h, std::size_t input_w);

/// A spec plus its parameters. Parameters always agree with the spec.
struct Model {
    NetworkSpec spec;
    std::vector<ops::ConvParams> conv_params;  // one per Convolution layer, in order
    ops::FcParams fc_params;
    std::uint64_t seed = 0;

    /// Seeded init: kernels/weights uniform in +-sqrt(6/(fanIn+fanOut)),
    /// biases zero. Identical seeds give identical parameters.
    static Model init(const NetworkSpec& spec, std::uint64_t seed);
};

/// Per-sample activations retained for the backward pass.
struct ForwardTrace {
    std::vector<Tensor> conv_inputs;
    std::vector<Tensor> conv_pre_relu;
    std::vector<ops::PoolContext> pools;
    std::vector<std::size_t> pre_flatten_shape;
    Tensor fc_input;
    Tensor logits;
};

/// Gradient accumulator shaped like a Model's parameters.
struct ModelGrads {
    std::vector<Tensor> d_conv_kernels;
    std::vector<Tensor> d_conv_biases;
    Tensor d_fc_weights;
    Tensor d_fc_bias;

    static ModelGrads zeros_like(const Model& m);
    void add(const ModelGrads& other);
    void scale(double factor);
};

/// Whole-network forward pass; image must be (1, input_h, input_w).
Tensor forward(const Model& m, const Tensor& image);

/// Forward pass that keeps the activations needed by backward().
Tensor forward(const Model& m, const Tensor& image, ForwardTrace& trace);

/// Gradients of softmax cross-entropy at `label` w.r.t. every parameter;
/// returns the sample loss.
double backward(const Model& m, const ForwardTrace& trace, int label, ModelGrads& grads);

struct StepStats {
    double error_rate = 0.0;
    double mean_loss = 0.0;
    std::size_t misclassified = 0;
};

/// One batch step: forward/backward per sample, gradients averaged over the
/// batch, single SGD update. Error rate uses pre-update argmax predictions.
/// learning_rate 0 reports stats without touching parameters.
StepStats train_step(Model& m, const std::vector<Tensor>& images, const std::vector<int>& labels,
                     double learning_rate);

/// argmax of logits; ties break toward class 0.
int predict(const Model& m, const Tensor& image);
int argmax_class(const Tensor& logits);

}  // namespace mcad::net
