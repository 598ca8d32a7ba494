#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcad/image.hpp"
#include "mcad/manifest.hpp"

namespace mcad::harness {

/// Parameters of the synthetic mammogram-like generator. "Malignant" images
/// carry a bright Gaussian blob (mass analog) plus bright speckles
/// (microcalcification analog) inside the breast region; "benign" images
/// carry the breast region and noise only.
struct SyntheticSpec {
    std::size_t image_size = 160;  // square images
    double mass_intensity_min = 70.0;
    double mass_intensity_max = 110.0;
    double mass_radius_min = 14.0;  // pixels at image_size scale
    double mass_radius_max = 22.0;
    int speckle_min = 6;
    int speckle_max = 14;
    double background_noise = 6.0;  // gaussian sigma, gray levels
    std::uint64_t seed = 1;

    void validate() const;
};

struct SyntheticSample {
    img::GrayImage image;
    img::BinaryMask breast_mask;  // ground truth, same orientation as image
    int label = 0;
    std::string split;  // "train" or "val"
};

/// Deterministic, class-balanced sample set: first the train split (benign
/// then malignant), then the val split. Roughly half the samples are tagged
/// Right and stored mirrored, ground-truth mask included.
std::vector<SyntheticSample> generate_synthetic(const SyntheticSpec& spec,
                                                std::size_t train_per_class,
                                                std::size_t val_per_class);

/// Writes images as img_NNNN.pgm, ground-truth masks as img_NNNN.mask.pgm,
/// and manifest.csv into dir. Returns the manifest.
DatasetManifest write_synthetic(const std::vector<SyntheticSample>& samples,
                                const std::string& dir);

}  // namespace mcad::harness
