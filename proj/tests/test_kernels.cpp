#include <doctest.h>

#include <vector>

#include "mcad/kernels.hpp"
#include "mcad/rng.hpp"
#include "mcad/tensor.hpp"
#include "testutil.hpp"

using namespace mcad;
using testutil::fill_uniform;

namespace {

std::vector<kern::Backend> available_backends() {
    std::vector<kern::Backend> v;
    for (auto b : {kern::Backend::Scalar, kern::Backend::Avx2, kern::Backend::Avx512}) {
        if (kern::backend_available(b)) v.push_back(b);
    }
    return v;
}

// Shapes chosen to hit every tail case: widths around the 4/8/16/32-lane
// boundaries, single channels, odd channel counts, both kernel sizes used by
// the production stack plus an irregular one.
struct Case {
    int in_c, in_h, in_w, out_c, k_h, k_w;
};

const Case kCases[] = {
    {1, 6, 6, 1, 3, 3},   {1, 12, 12, 3, 5, 5},  {2, 9, 17, 5, 3, 3},  {3, 11, 8, 2, 5, 5},
    {4, 7, 33, 3, 3, 3},  {2, 25, 25, 4, 5, 5},  {1, 5, 40, 2, 1, 1},  {2, 10, 13, 1, 4, 7},
    {5, 8, 21, 7, 3, 3},  {1, 64, 64, 2, 5, 5},
};

kern::ConvShape to_shape(const Case& c) {
    kern::ConvShape s;
    s.in_c = c.in_c;
    s.in_h = c.in_h;
    s.in_w = c.in_w;
    s.out_c = c.out_c;
    s.k_h = c.k_h;
    s.k_w = c.k_w;
    return s;
}

}  // namespace

TEST_CASE("scalar conv_forward matches the brute-force oracle") {
    Rng rng(42);
    const auto& table = kern::kernel_table(kern::Backend::Scalar);
    for (const Case& c : kCases) {
        const kern::ConvShape s = to_shape(c);
        Tensor in({(std::size_t)c.in_c, (std::size_t)c.in_h, (std::size_t)c.in_w});
        Tensor w({(std::size_t)c.out_c, (std::size_t)c.in_c, (std::size_t)c.k_h,
                  (std::size_t)c.k_w});
        Tensor bias({(std::size_t)c.out_c});
        fill_uniform(in, rng);
        fill_uniform(w, rng);
        fill_uniform(bias, rng);

        Tensor out({(std::size_t)c.out_c, (std::size_t)s.out_h(), (std::size_t)s.out_w()});
        table.conv_forward(in.data(), w.data(), bias.data(), out.data(), s);

        const Tensor expected = testutil::naive_conv(in, w, bias);
        REQUIRE(out.size() == expected.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CAPTURE(i);
            CHECK(std::fabs(out[i] - expected[i]) <= 1e-10);
        }
    }
}

TEST_CASE("SIMD backends agree with the scalar reference") {
    const auto backends = available_backends();
    CAPTURE(backends.size());
    const auto& scalar = kern::kernel_table(kern::Backend::Scalar);

    for (kern::Backend b : backends) {
        if (b == kern::Backend::Scalar) continue;
        const auto& simd = kern::kernel_table(b);
        INFO("backend: " << kern::backend_name(b));
        Rng rng(1234);

        for (const Case& c : kCases) {
            const kern::ConvShape s = to_shape(c);
            const std::size_t in_n = (std::size_t)c.in_c * c.in_h * c.in_w;
            const std::size_t w_n = (std::size_t)c.out_c * c.in_c * c.k_h * c.k_w;
            const std::size_t out_n = (std::size_t)c.out_c * s.out_h() * s.out_w();

            std::vector<double> in(in_n), w(w_n), bias(c.out_c);
            for (auto& v : in) v = rng.uniform(-1, 1);
            for (auto& v : w) v = rng.uniform(-1, 1);
            for (auto& v : bias) v = rng.uniform(-1, 1);

            std::vector<double> out_ref(out_n), out_simd(out_n, -999.0);
            scalar.conv_forward(in.data(), w.data(), bias.data(), out_ref.data(), s);
            simd.conv_forward(in.data(), w.data(), bias.data(), out_simd.data(), s);
            for (std::size_t i = 0; i < out_n; ++i) {
                CHECK(std::fabs(out_ref[i] - out_simd[i]) <= 1e-10);
            }

            std::vector<double> g(out_n);
            for (auto& v : g) v = rng.uniform(-1, 1);
            std::vector<double> dw_ref(w_n), dw_simd(w_n, -999.0);
            scalar.conv_grad_weights(in.data(), g.data(), dw_ref.data(), s);
            simd.conv_grad_weights(in.data(), g.data(), dw_simd.data(), s);
            for (std::size_t i = 0; i < w_n; ++i) {
                CHECK(std::fabs(dw_ref[i] - dw_simd[i]) <= 1e-10);
            }
        }

        // Elementwise kernels across awkward lengths.
        for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 9u, 31u, 64u, 100u, 1023u}) {
            std::vector<double> x(n), y_ref(n), y_simd(n), g(n);
            for (auto& v : x) v = rng.uniform(-2, 2);
            for (auto& v : g) v = rng.uniform(-2, 2);

            y_ref = x;
            y_simd = x;
            scalar.axpy(0.37, g.data(), y_ref.data(), n);
            simd.axpy(0.37, g.data(), y_simd.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(testutil::rel_err(y_ref[i], y_simd[i]) < 1e-14);

            scalar.relu_forward(x.data(), y_ref.data(), n);
            simd.relu_forward(x.data(), y_simd.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y_ref[i] == y_simd[i]);

            scalar.relu_backward(x.data(), g.data(), y_ref.data(), n);
            simd.relu_backward(x.data(), g.data(), y_simd.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y_ref[i] == y_simd[i]);

            CHECK(testutil::rel_err(scalar.dot(x.data(), g.data(), n),
                                    simd.dot(x.data(), g.data(), n)) < 1e-12);
        }
    }
}

TEST_CASE("backend selection") {
    const kern::Backend initial = kern::active_backend();
    CHECK(kern::backend_available(kern::Backend::Scalar));

    kern::set_backend(kern::Backend::Scalar);
    CHECK(kern::active_backend() == kern::Backend::Scalar);
    CHECK(std::string(kern::kernels().name) == "scalar");

    kern::reset_backend();
    CHECK(kern::active_backend() == initial);

    CHECK_THROWS_AS(kern::select_backend_by_name("neon"), ConfigError);
    kern::select_backend_by_name("auto");
}
