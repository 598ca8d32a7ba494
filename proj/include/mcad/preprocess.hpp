#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "mcad/image.hpp"
#include "mcad/tensor.hpp"

namespace mcad::img {

std::array<std::uint64_t, 256> intensity_histogram(const GrayImage& image);

/// Exhaustive between-class-variance maximization over the 256 gray levels.
/// The score is computed from exact integer pixel/intensity sums, so the
/// argmax is reproducible bit-for-bit against a brute-force rescan; ties
/// break toward the smallest threshold. A histogram with a single non-empty
/// bin returns that bin (no valid split exists). Exactness assumes total
/// pixel count < 2^26 or so, far beyond desk-scale images.
int otsu_threshold(const std::array<std::uint64_t, 256>& hist);

/// Foreground = pixels strictly above the Otsu threshold. Constant images
/// therefore produce an empty mask.
BinaryMask threshold_segment(const GrayImage& image);

/// Keeps only the largest 8-connected foreground component (ties broken by
/// the smallest top-left first pixel in row-major scan order) and returns
/// its tight bounding box. Throws DomainError("no breast region found") on
/// an empty mask.
std::pair<BinaryMask, BoundingBox> largest_component(const BinaryMask& mask);

/// Horizontal flip for Right-tagged images (relabelled Left afterwards);
/// identity for Left and Unknown.
GrayImage mirror_if_right(const GrayImage& image);

/// Mirrors a mask with the same rule, for comparing generator ground truth
/// against pipeline output.
BinaryMask mirror_mask(const BinaryMask& mask, bool apply);

/// Crop to the box, bilinear-resize to (target_h, target_w) using half-pixel
/// centers with edge clamping, and rescale intensities to [0,1] by /255.
/// Output tensor shape is (1, target_h, target_w).
Tensor crop_normalize(const GrayImage& image, const BoundingBox& box, std::size_t target_h,
                      std::size_t target_w);

/// threshold_segment + largest_component, exposed so tests and tools can see
/// the detected region before cropping.
std::pair<BinaryMask, BoundingBox> segment_breast(const GrayImage& image);

/// mirror_if_right -> threshold_segment -> largest_component ->
/// crop_normalize. Errors from a stage are rethrown with the stage name
/// prefixed.
Tensor preprocess_pipeline(const GrayImage& image, std::size_t target_h, std::size_t target_w);

}  // namespace mcad::img
