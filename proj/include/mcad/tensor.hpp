#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mcad/errors.hpp"

namespace mcad {

/// Dense real-valued tensor of rank 1..4, row-major storage.
///
/// Carrier of every numeric signal in the project: images, feature maps,
/// weights and gradients. Invariant: product(shape) == data.size(), all
/// extents positive.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    /// Tensor wrapping explicit values; throws ShapeError if the value
    /// count does not match the shape product.
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double value);

    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const;
    const std::vector<std::size_t>& shape() const { return shape_; }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    // Bounds-checked multi-index access (row-major).
    double& at(std::size_t i);
    double& at(std::size_t i, std::size_t j);
    double& at(std::size_t i, std::size_t j, std::size_t k);
    double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l);
    double at(std::size_t i) const { return const_cast<Tensor*>(this)->at(i); }
    double at(std::size_t i, std::size_t j) const { return const_cast<Tensor*>(this)->at(i, j); }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return const_cast<Tensor*>(this)->at(i, j, k);
    }
    double at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return const_cast<Tensor*>(this)->at(i, j, k, l);
    }

    void fill(double value);
    bool all_finite() const;

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    void check_shape() const;

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// "(a, b, c)" rendering for error messages.
std::string shape_str(const std::vector<std::size_t>& shape);

}  // namespace mcad
