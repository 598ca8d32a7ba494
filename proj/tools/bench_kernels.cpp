// Micro-benchmark for the convolution kernels across backends, plus a
// one-image train-step timing for the production network. Not a test; used
// to sanity-check that the training budget holds on a given machine.

#include <chrono>
#include <cstdio>
#include <vector>

#include "mcad/kernels.hpp"
#include "mcad/network.hpp"
#include "mcad/rng.hpp"
#include "mcad/tensor.hpp"

using namespace mcad;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_conv(kern::Backend backend) {
    if (!kern::backend_available(backend)) {
        std::printf("%-7s unavailable\n", kern::backend_name(backend).c_str());
        return;
    }
    const auto& table = kern::kernel_table(backend);

    // Layer-2-like shape: the hottest case in the production stack.
    kern::ConvShape s;
    s.in_c = 32;
    s.in_h = 25;
    s.in_w = 25;
    s.out_c = 32;
    s.k_h = 5;
    s.k_w = 5;

    Rng rng(7);
    std::vector<double> in(static_cast<std::size_t>(s.in_c) * s.in_h * s.in_w);
    std::vector<double> w(static_cast<std::size_t>(s.out_c) * s.in_c * s.k_h * s.k_w);
    std::vector<double> bias(s.out_c);
    std::vector<double> out(static_cast<std::size_t>(s.out_c) * s.out_h() * s.out_w());
    std::vector<double> dw(w.size());
    for (auto& v : in) v = rng.uniform(-1, 1);
    for (auto& v : w) v = rng.uniform(-1, 1);

    const double macs_fwd = static_cast<double>(s.out_c) * s.out_h() * s.out_w() * s.in_c *
                            s.k_h * s.k_w;
    const int reps = 400;

    auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) {
        table.conv_forward(in.data(), w.data(), bias.data(), out.data(), s);
    }
    double dt = seconds_since(t0);
    std::printf("%-7s conv_forward      %7.2f GFLOP/s\n", table.name,
                2.0 * macs_fwd * reps / dt / 1e9);

    t0 = Clock::now();
    for (int r = 0; r < reps; ++r) {
        table.conv_grad_weights(in.data(), out.data(), dw.data(), s);
    }
    dt = seconds_since(t0);
    std::printf("%-7s conv_grad_weights %7.2f GFLOP/s\n", table.name,
                2.0 * macs_fwd * reps / dt / 1e9);
}

void bench_train_step() {
    const auto spec = net::build_table1_network(64, 64);
    net::Model model = net::Model::init(spec, 3);
    Rng rng(11);
    std::vector<Tensor> batch;
    std::vector<int> labels;
    for (int i = 0; i < 16; ++i) {
        Tensor t({1, 64, 64});
        for (double& v : t.values()) v = rng.uniform(0, 1);
        batch.push_back(std::move(t));
        labels.push_back(i % 2);
    }

    net::train_step(model, batch, labels, 0.01);  // warm up
    const int reps = 5;
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) net::train_step(model, batch, labels, 0.01);
    const double dt = seconds_since(t0) / reps;
    std::printf("train_step(batch=16, 64x64): %.1f ms  (%.1f ms/image; 400-image epoch ~ %.2f s)\n",
                dt * 1e3, dt * 1e3 / 16, dt * 400 / 16);
}

}  // namespace

int main() {
    for (auto b : {kern::Backend::Scalar, kern::Backend::Avx2, kern::Backend::Avx512}) {
        bench_conv(b);
    }
    std::printf("active backend: %s\n", kern::backend_name(kern::active_backend()).c_str());
    bench_train_step();
    return 0;
}
