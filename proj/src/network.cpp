#include "mcad/network.hpp"

#include <cmath>
#include <sstream>

#include "mcad/errors.hpp"
#include "mcad/kernels.hpp"
#include "mcad/rng.hpp"

namespace mcad::net {

namespace {

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Convolution:
            return "C";
        case LayerKind::Pooling:
            return "S";
        case LayerKind::FullyConnected:
            return "F";
        case LayerKind::Loss:
            return "L";
    }
    return "?";
}

}  // namespace

LayerSpec LayerSpec::conv(int k_h, int k_w, int channels, int pad) {
    LayerSpec s;
    s.kind = LayerKind::Convolution;
    s.k_h = k_h;
    s.k_w = k_w;
    s.channels = channels;
    s.pad = pad;
    return s;
}

LayerSpec LayerSpec::pool(int p_h, int p_w) {
    LayerSpec s;
    s.kind = LayerKind::Pooling;
    s.p_h = p_h;
    s.p_w = p_w;
    return s;
}

LayerSpec LayerSpec::fc(int out_dim) {
    LayerSpec s;
    s.kind = LayerKind::FullyConnected;
    s.out_dim = out_dim;
    return s;
}

LayerSpec LayerSpec::loss() {
    LayerSpec s;
    s.kind = LayerKind::Loss;
    return s;
}

bool operator==(const LayerSpec& a, const LayerSpec& b) {
    return a.kind == b.kind && a.k_h == b.k_h && a.k_w == b.k_w && a.channels == b.channels &&
           a.pad == b.pad && a.p_h == b.p_h && a.p_w == b.p_w && a.out_dim == b.out_dim;
}

std::vector<LayerShape> NetworkSpec::shape_trace() const {
    if (input_h == 0 || input_w == 0) throw ShapeError("network input size must be positive");
    if (layers.empty()) throw ShapeError("network has no layers");

    std::vector<LayerShape> trace;
    trace.reserve(layers.size() + 1);
    LayerShape cur{1, input_h, input_w};
    trace.push_back(cur);

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        const std::string where = "layer " + std::to_string(i + 1) + " (" + kind_name(l.kind) + ")";
        switch (l.kind) {
            case LayerKind::Convolution: {
                if (l.k_h < 1 || l.k_w < 1 || l.channels < 1 || l.pad < 0) {
                    throw ShapeError(where + ": bad convolution dims");
                }
                const std::size_t ph = cur.h + 2 * static_cast<std::size_t>(l.pad);
                const std::size_t pw = cur.w + 2 * static_cast<std::size_t>(l.pad);
                if (ph < static_cast<std::size_t>(l.k_h) || pw < static_cast<std::size_t>(l.k_w)) {
                    throw ShapeError(where + ": extent " + std::to_string(cur.h) + "x" +
                                     std::to_string(cur.w) + " smaller than kernel " +
                                     std::to_string(l.k_h) + "x" + std::to_string(l.k_w));
                }
                cur = LayerShape{static_cast<std::size_t>(l.channels), ph - l.k_h + 1,
                                 pw - l.k_w + 1};
                break;
            }
            case LayerKind::Pooling: {
                if (l.p_h < 1 || l.p_w < 1) throw ShapeError(where + ": bad pooling window");
                if (cur.h < static_cast<std::size_t>(l.p_h) ||
                    cur.w < static_cast<std::size_t>(l.p_w)) {
                    throw ShapeError(where + ": extent " + std::to_string(cur.h) + "x" +
                                     std::to_string(cur.w) + " smaller than pooling window " +
                                     std::to_string(l.p_h) + "x" + std::to_string(l.p_w));
                }
                cur = LayerShape{cur.c, cur.h / l.p_h, cur.w / l.p_w};
                break;
            }
            case LayerKind::FullyConnected: {
                if (l.out_dim < 1) throw ShapeError(where + ": bad output dim");
                cur = LayerShape{static_cast<std::size_t>(l.out_dim), 1, 1};
                break;
            }
            case LayerKind::Loss:
                break;
        }
        if (cur.c == 0 || cur.h == 0 || cur.w == 0) {
            throw ShapeError(where + ": propagated extent reached zero");
        }
        trace.push_back(cur);
    }
    return trace;
}

void NetworkSpec::validate() const {
    std::size_t fc_count = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        if (l.kind == LayerKind::Loss && i + 1 != layers.size()) {
            throw ShapeError("loss layer must be last");
        }
        if (l.kind == LayerKind::FullyConnected) {
            ++fc_count;
            if (i + 2 != layers.size()) {
                throw ShapeError("fully-connected head must immediately precede the loss layer");
            }
        }
    }
    if (layers.empty() || layers.back().kind != LayerKind::Loss) {
        throw ShapeError("network must end with exactly one loss layer");
    }
    if (fc_count != 1) throw ShapeError("network must contain exactly one fully-connected head");
    shape_trace();
}

std::size_t NetworkSpec::fc_in_dim() const {
    const auto trace = shape_trace();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].kind == LayerKind::FullyConnected) {
            const LayerShape& in = trace[i];
            return in.c * in.h * in.w;
        }
    }
    throw ShapeError("network has no fully-connected layer");
}

std::string NetworkSpec::describe() const {
    const auto trace = shape_trace();
    std::ostringstream os;
    os << "input 1x" << input_h << "x" << input_w << "\n";
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        os << "  " << (i + 1) << ": " << kind_name(l.kind);
        switch (l.kind) {
            case LayerKind::Convolution:
                os << " " << l.k_h << "x" << l.k_w << "x" << l.channels << " pad " << l.pad;
                break;
            case LayerKind::Pooling:
                os << " " << l.p_h << "x" << l.p_w;
                break;
            case LayerKind::FullyConnected:
                os << " -> " << l.out_dim;
                break;
            case LayerKind::Loss:
                break;
        }
        const LayerShape& s = trace[i + 1];
        os << "  => " << s.c << "x" << s.h << "x" << s.w << "\n";
    }
    return os.str();
}

NetworkSpec build_table1_network(std::size_t input_h, std::size_t input_w) {
    NetworkSpec spec;
    spec.input_h = input_h;
    spec.input_w = input_w;
    spec.layers = {
        LayerSpec::conv(5, 5, 32, 2), LayerSpec::pool(3, 3), LayerSpec::conv(5, 5, 32, 2),
        LayerSpec::pool(3, 3),        LayerSpec::conv(5, 5, 64, 2), LayerSpec::pool(2, 2),
        LayerSpec::conv(5, 5, 64, 2), LayerSpec::pool(3, 3), LayerSpec::fc(2),
        LayerSpec::loss(),
    };
    spec.validate();
    return spec;
}

Model Model::init(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto trace = spec.shape_trace();

    Model m;
    m.spec = spec;
    m.seed = seed;
    Rng rng(seed);

    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::Convolution) {
            const std::size_t in_c = trace[i].c;
            ops::ConvParams p;
            p.kernel = Tensor({static_cast<std::size_t>(l.channels), in_c,
                               static_cast<std::size_t>(l.k_h), static_cast<std::size_t>(l.k_w)});
            p.bias = Tensor({static_cast<std::size_t>(l.channels)});
            const double fan_in = static_cast<double>(in_c) * l.k_h * l.k_w;
            const double fan_out = static_cast<double>(l.channels) * l.k_h * l.k_w;
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            for (double& v : p.kernel.values()) v = rng.uniform(-limit, limit);
            m.conv_params.push_back(std::move(p));
        } else if (l.kind == LayerKind::FullyConnected) {
            const std::size_t in_dim = trace[i].c * trace[i].h * trace[i].w;
            m.fc_params.weights =
                Tensor({static_cast<std::size_t>(l.out_dim), in_dim});
            m.fc_params.bias = Tensor({static_cast<std::size_t>(l.out_dim)});
            const double limit = std::sqrt(6.0 / (static_cast<double>(in_dim) + l.out_dim));
            for (double& v : m.fc_params.weights.values()) v = rng.uniform(-limit, limit);
        }
    }
    return m;
}

ModelGrads ModelGrads::zeros_like(const Model& m) {
    ModelGrads g;
    for (const auto& p : m.conv_params) {
        g.d_conv_kernels.emplace_back(p.kernel.shape());
        g.d_conv_biases.emplace_back(p.bias.shape());
    }
    g.d_fc_weights = Tensor(m.fc_params.weights.shape());
    g.d_fc_bias = Tensor(m.fc_params.bias.shape());
    return g;
}

void ModelGrads::add(const ModelGrads& other) {
    const auto& k = kern::kernels();
    for (std::size_t i = 0; i < d_conv_kernels.size(); ++i) {
        k.axpy(1.0, other.d_conv_kernels[i].data(), d_conv_kernels[i].data(),
               d_conv_kernels[i].size());
        k.axpy(1.0, other.d_conv_biases[i].data(), d_conv_biases[i].data(),
               d_conv_biases[i].size());
    }
    k.axpy(1.0, other.d_fc_weights.data(), d_fc_weights.data(), d_fc_weights.size());
    k.axpy(1.0, other.d_fc_bias.data(), d_fc_bias.data(), d_fc_bias.size());
}

void ModelGrads::scale(double factor) {
    auto scale_one = [factor](Tensor& t) {
        for (double& v : t.values()) v *= factor;
    };
    for (auto& t : d_conv_kernels) scale_one(t);
    for (auto& t : d_conv_biases) scale_one(t);
    scale_one(d_fc_weights);
    scale_one(d_fc_bias);
}

Tensor forward(const Model& m, const Tensor& image, ForwardTrace& trace) {
    if (image.rank() != 3 || image.extent(0) != 1 || image.extent(1) != m.spec.input_h ||
        image.extent(2) != m.spec.input_w) {
        throw ShapeError("image shape " + shape_str(image.shape()) + " does not match network input (1, " +
                         std::to_string(m.spec.input_h) + ", " + std::to_string(m.spec.input_w) +
                         ")");
    }

    trace.conv_inputs.clear();
    trace.conv_pre_relu.clear();
    trace.pools.clear();

    Tensor x = image;
    std::size_t conv_idx = 0;
    for (const LayerSpec& l : m.spec.layers) {
        switch (l.kind) {
            case LayerKind::Convolution: {
                trace.conv_inputs.push_back(x);
                Tensor z = ops::conv_forward(x, m.conv_params[conv_idx], l.pad);
                trace.conv_pre_relu.push_back(z);
                x = ops::relu(z);
                ++conv_idx;
                break;
            }
            case LayerKind::Pooling: {
                ops::PoolResult r = ops::pool_forward(x, l.p_h, l.p_w);
                trace.pools.push_back(std::move(r.ctx));
                x = std::move(r.output);
                break;
            }
            case LayerKind::FullyConnected: {
                trace.pre_flatten_shape = x.shape();
                Tensor flat({x.size()}, x.values());
                trace.fc_input = flat;
                x = ops::fc_forward(flat, m.fc_params);
                break;
            }
            case LayerKind::Loss:
                break;
        }
    }
    trace.logits = x;
    return x;
}

Tensor forward(const Model& m, const Tensor& image) {
    ForwardTrace trace;
    return forward(m, image, trace);
}

double backward(const Model& m, const ForwardTrace& trace, int label, ModelGrads& grads) {
    const ops::LossResult loss = ops::softmax_cross_entropy(trace.logits, label);

    Tensor g = loss.logit_grad;
    std::size_t conv_idx = trace.conv_inputs.size();
    std::size_t pool_idx = trace.pools.size();
    const auto& k = kern::kernels();

    for (std::size_t li = m.spec.layers.size(); li-- > 0;) {
        const LayerSpec& l = m.spec.layers[li];
        switch (l.kind) {
            case LayerKind::Loss:
                break;
            case LayerKind::FullyConnected: {
                ops::FcGrads fg = ops::fc_backward(trace.fc_input, m.fc_params, g);
                k.axpy(1.0, fg.d_weights.data(), grads.d_fc_weights.data(), fg.d_weights.size());
                k.axpy(1.0, fg.d_bias.data(), grads.d_fc_bias.data(), fg.d_bias.size());
                g = Tensor(trace.pre_flatten_shape, std::move(fg.d_input.values()));
                break;
            }
            case LayerKind::Pooling: {
                --pool_idx;
                g = ops::pool_backward(trace.pools[pool_idx], g);
                break;
            }
            case LayerKind::Convolution: {
                --conv_idx;
                Tensor gz = ops::relu_backward(trace.conv_pre_relu[conv_idx], g);
                ops::ConvGrads cg =
                    ops::conv_backward(trace.conv_inputs[conv_idx], m.conv_params[conv_idx], gz,
                                       l.pad);
                k.axpy(1.0, cg.d_kernel.data(), grads.d_conv_kernels[conv_idx].data(),
                       cg.d_kernel.size());
                k.axpy(1.0, cg.d_bias.data(), grads.d_conv_biases[conv_idx].data(),
                       cg.d_bias.size());
                g = std::move(cg.d_input);
                break;
            }
        }
    }
    return loss.loss;
}

StepStats train_step(Model& m, const std::vector<Tensor>& images, const std::vector<int>& labels,
                     double learning_rate) {
    if (images.empty()) throw DomainError("train_step: empty batch");
    if (images.size() != labels.size()) {
        throw DomainError("train_step: " + std::to_string(images.size()) + " images vs " +
                          std::to_string(labels.size()) + " labels");
    }
    if (learning_rate < 0.0) throw DomainError("train_step: negative learning rate");
    const int num_classes = m.fc_params.out_dim();
    for (int label : labels) {
        if (label < 0 || label >= num_classes) {
            throw DomainError("train_step: label " + std::to_string(label) + " out of range");
        }
    }

    ModelGrads grads = ModelGrads::zeros_like(m);
    ForwardTrace trace;
    std::size_t errors = 0;
    double loss_sum = 0.0;

    for (std::size_t i = 0; i < images.size(); ++i) {
        const Tensor logits = forward(m, images[i], trace);
        if (argmax_class(logits) != labels[i]) ++errors;
        loss_sum += backward(m, trace, labels[i], grads);
    }

    const double inv_n = 1.0 / static_cast<double>(images.size());
    if (learning_rate > 0.0) {
        grads.scale(inv_n);
        std::size_t ci = 0;
        for (auto& p : m.conv_params) {
            ops::sgd_update(p.kernel, grads.d_conv_kernels[ci], learning_rate);
            ops::sgd_update(p.bias, grads.d_conv_biases[ci], learning_rate);
            ++ci;
        }
        ops::sgd_update(m.fc_params.weights, grads.d_fc_weights, learning_rate);
        ops::sgd_update(m.fc_params.bias, grads.d_fc_bias, learning_rate);
    }

    StepStats stats;
    stats.error_rate = static_cast<double>(errors) * inv_n;
    stats.mean_loss = loss_sum * inv_n;
    stats.misclassified = errors;
    if (!std::isfinite(stats.mean_loss)) {
        throw NumericError("train_step: non-finite loss (diverged)");
    }
    return stats;
}

int argmax_class(const Tensor& logits) {
    int best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = static_cast<int>(i);
    }
    return best;
}

int predict(const Model& m, const Tensor& image) { return argmax_class(forward(m, image)); }

}  // namespace mcad::net
