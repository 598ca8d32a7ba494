#include "mcad/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mcad/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts unsupported");

namespace mcad::net {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'A', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint8_t kVersion = 1;

void write_bytes(std::ofstream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!os) throw IoError("checkpoint write failed");
}

template <typename T>
void write_pod(std::ofstream& os, T v) {
    write_bytes(os, &v, sizeof(T));
}

void read_bytes(std::ifstream& is, void* p, std::size_t n, const std::string& path) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (is.gcount() != static_cast<std::streamsize>(n)) {
        throw IoError("checkpoint truncated: " + path);
    }
}

template <typename T>
T read_pod(std::ifstream& is, const std::string& path) {
    T v;
    read_bytes(is, &v, sizeof(T), path);
    return v;
}

std::uint8_t kind_code(LayerKind k) { return static_cast<std::uint8_t>(k); }

LayerKind kind_from_code(std::uint8_t c, const std::string& path) {
    if (c > 3) throw ParseError("checkpoint " + path + ": bad layer kind " + std::to_string(c));
    return static_cast<LayerKind>(c);
}

void write_tensor(std::ofstream& os, const Tensor& t) {
    write_bytes(os, t.data(), t.size() * sizeof(double));
}

void read_tensor(std::ifstream& is, Tensor& t, const std::string& path) {
    read_bytes(is, t.data(), t.size() * sizeof(double), path);
}

}  // namespace

void save_model(const Model& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);

    write_bytes(os, kMagic, sizeof(kMagic));
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint32_t>(m.spec.input_h));
    write_pod(os, static_cast<std::uint32_t>(m.spec.input_w));
    write_pod(os, static_cast<std::uint32_t>(m.spec.layers.size()));
    for (const LayerSpec& l : m.spec.layers) {
        write_pod(os, kind_code(l.kind));
        std::int32_t dims[4] = {0, 0, 0, 0};
        switch (l.kind) {
            case LayerKind::Convolution:
                dims[0] = l.k_h;
                dims[1] = l.k_w;
                dims[2] = l.channels;
                dims[3] = l.pad;
                break;
            case LayerKind::Pooling:
                dims[0] = l.p_h;
                dims[1] = l.p_w;
                break;
            case LayerKind::FullyConnected:
                dims[0] = l.out_dim;
                break;
            case LayerKind::Loss:
                break;
        }
        write_bytes(os, dims, sizeof(dims));
    }
    write_pod(os, static_cast<std::uint64_t>(m.seed));
    for (const auto& p : m.conv_params) {
        write_tensor(os, p.kernel);
        write_tensor(os, p.bias);
    }
    write_tensor(os, m.fc_params.weights);
    write_tensor(os, m.fc_params.bias);
    os.flush();
    if (!os) throw IoError("checkpoint write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);

    char magic[8];
    read_bytes(is, magic, sizeof(magic), path);
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("not a model checkpoint (bad magic): " + path);
    }
    const auto version = read_pod<std::uint8_t>(is, path);
    if (version != kVersion) {
        throw ParseError("checkpoint " + path + ": unsupported version " +
                         std::to_string(version));
    }

    NetworkSpec spec;
    spec.input_h = read_pod<std::uint32_t>(is, path);
    spec.input_w = read_pod<std::uint32_t>(is, path);
    const auto n_layers = read_pod<std::uint32_t>(is, path);
    if (n_layers == 0 || n_layers > 1024) {
        throw ParseError("checkpoint " + path + ": implausible layer count " +
                         std::to_string(n_layers));
    }
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        const LayerKind kind = kind_from_code(read_pod<std::uint8_t>(is, path), path);
        std::int32_t dims[4];
        read_bytes(is, dims, sizeof(dims), path);
        switch (kind) {
            case LayerKind::Convolution:
                spec.layers.push_back(LayerSpec::conv(dims[0], dims[1], dims[2], dims[3]));
                break;
            case LayerKind::Pooling:
                spec.layers.push_back(LayerSpec::pool(dims[0], dims[1]));
                break;
            case LayerKind::FullyConnected:
                spec.layers.push_back(LayerSpec::fc(dims[0]));
                break;
            case LayerKind::Loss:
                spec.layers.push_back(LayerSpec::loss());
                break;
        }
    }
    spec.validate();

    const auto seed = read_pod<std::uint64_t>(is, path);
    Model m = Model::init(spec, seed);
    for (auto& p : m.conv_params) {
        read_tensor(is, p.kernel, path);
        read_tensor(is, p.bias, path);
    }
    read_tensor(is, m.fc_params.weights, path);
    read_tensor(is, m.fc_params.bias, path);

    char extra;
    if (is.read(&extra, 1); is.gcount() != 0) {
        throw ParseError("checkpoint " + path + ": trailing bytes");
    }
    return m;
}

}  // namespace mcad::net
