#include "mcad/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mcad {

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    check_shape();
    std::size_t n = 1;
    for (std::size_t e : shape_) n *= e;
    data_.assign(n, 0.0);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
    check_shape();
    std::size_t n = 1;
    for (std::size_t e : shape_) n *= e;
    if (n != data_.size()) {
        throw ShapeError("tensor value count " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
    }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

void Tensor::check_shape() const {
    if (shape_.empty() || shape_.size() > 4) {
        throw ShapeError("tensor rank must be 1..4, got " + std::to_string(shape_.size()));
    }
    for (std::size_t e : shape_) {
        if (e == 0) throw ShapeError("tensor extents must be positive, got " + shape_str(shape_));
    }
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(shape_));
    }
    return shape_[axis];
}

double& Tensor::at(std::size_t i) {
    if (rank() != 1 || i >= shape_[0]) throw ShapeError("bad index for shape " + shape_str(shape_));
    return data_[i];
}

double& Tensor::at(std::size_t i, std::size_t j) {
    if (rank() != 2 || i >= shape_[0] || j >= shape_[1]) {
        throw ShapeError("bad index for shape " + shape_str(shape_));
    }
    return data_[i * shape_[1] + j];
}

double& Tensor::at(std::size_t i, std::size_t j, std::size_t k) {
    if (rank() != 3 || i >= shape_[0] || j >= shape_[1] || k >= shape_[2]) {
        throw ShapeError("bad index for shape " + shape_str(shape_));
    }
    return data_[(i * shape_[1] + j) * shape_[2] + k];
}

double& Tensor::at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    if (rank() != 4 || i >= shape_[0] || j >= shape_[1] || k >= shape_[2] || l >= shape_[3]) {
        throw ShapeError("bad index for shape " + shape_str(shape_));
    }
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

}  // namespace mcad
