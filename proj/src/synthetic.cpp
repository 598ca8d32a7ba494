#include "mcad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mcad/errors.hpp"
#include "mcad/rng.hpp"

namespace fs = std::filesystem;

namespace mcad::harness {

void SyntheticSpec::validate() const {
    if (image_size < 32) throw ConfigError("synthetic image_size must be >= 32");
    if (mass_intensity_min <= 0 || mass_intensity_max < mass_intensity_min) {
        throw ConfigError("synthetic mass intensity range is degenerate");
    }
    if (mass_radius_min <= 0 || mass_radius_max < mass_radius_min) {
        throw ConfigError("synthetic mass radius range is degenerate");
    }
    if (speckle_min < 0 || speckle_max < speckle_min) {
        throw ConfigError("synthetic speckle count range is degenerate");
    }
    if (background_noise < 0) throw ConfigError("synthetic background noise must be >= 0");
}

namespace {

struct BreastGeometry {
    double cy;       // vertical ellipse center
    double a;        // vertical semi-axis
    double b;        // horizontal semi-axis (from the left edge)
};

bool inside_breast(const BreastGeometry& g, double y, double x) {
    const double u = x / g.b;
    const double v = (y - g.cy) / g.a;
    return u * u + v * v <= 1.0;
}

void add_blob(std::vector<double>& canvas, std::size_t size, double cy, double cx, double sigma,
              double amplitude) {
    const int reach = static_cast<int>(std::ceil(3.0 * sigma));
    const int y_lo = std::max(0, static_cast<int>(cy) - reach);
    const int y_hi = std::min(static_cast<int>(size) - 1, static_cast<int>(cy) + reach);
    const int x_lo = std::max(0, static_cast<int>(cx) - reach);
    const int x_hi = std::min(static_cast<int>(size) - 1, static_cast<int>(cx) + reach);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dy = y - cy;
            const double dx = x - cx;
            canvas[static_cast<std::size_t>(y) * size + x] +=
                amplitude * std::exp(-(dy * dy + dx * dx) * inv);
        }
    }
}

SyntheticSample make_sample(const SyntheticSpec& spec, Rng& rng, int label,
                            const std::string& split) {
    const std::size_t s = spec.image_size;
    const double sd = static_cast<double>(s);

    BreastGeometry geom;
    geom.cy = sd * (0.5 + rng.uniform(-0.05, 0.05));
    geom.a = sd * rng.uniform(0.34, 0.40);
    geom.b = sd * rng.uniform(0.48, 0.56);

    const double background = rng.uniform(6.0, 14.0);
    const double breast_base = rng.uniform(104.0, 116.0);

    std::vector<double> canvas(s * s);
    img::BinaryMask mask = img::BinaryMask::blank(s, s);
    for (std::size_t y = 0; y < s; ++y) {
        for (std::size_t x = 0; x < s; ++x) {
            const bool in = inside_breast(geom, static_cast<double>(y), static_cast<double>(x));
            mask.bits[y * s + x] = in ? 1 : 0;
            canvas[y * s + x] = in ? breast_base : background;
        }
    }

    // Scanner text-mark analog in the far corner, outside the breast; kept
    // well smaller than the breast so component analysis discards it.
    const std::size_t mark_w = s / 10, mark_h = s / 20;
    for (std::size_t y = s / 16; y < s / 16 + mark_h; ++y) {
        for (std::size_t x = s - s / 8 - mark_w; x < s - s / 8; ++x) {
            canvas[y * s + x] = 220.0;
        }
    }

    auto breast_point = [&](double margin) {
        // Deterministic rejection sampling inside the shrunken ellipse.
        for (;;) {
            const double x = rng.uniform(0.0, geom.b * margin);
            const double y = geom.cy + rng.uniform(-geom.a * margin, geom.a * margin);
            const double u = x / (geom.b * margin);
            const double v = (y - geom.cy) / (geom.a * margin);
            if (u * u + v * v <= 1.0) return std::pair<double, double>(y, x);
        }
    };

    if (label == 1) {
        const auto [my, mx] = breast_point(0.7);
        const double radius = rng.uniform(spec.mass_radius_min, spec.mass_radius_max) * sd / 160.0;
        const double amp = rng.uniform(spec.mass_intensity_min, spec.mass_intensity_max);
        add_blob(canvas, s, my, mx, radius / 2.0, amp);

        const int speckles = static_cast<int>(rng.range(spec.speckle_min, spec.speckle_max));
        for (int i = 0; i < speckles; ++i) {
            const auto [py, px] = breast_point(0.8);
            add_blob(canvas, s, py, px, rng.uniform(0.8, 1.6), rng.uniform(60.0, 100.0));
        }
    }

    SyntheticSample sample;
    sample.label = label;
    sample.split = split;
    sample.image = img::GrayImage::blank(s, s);
    for (std::size_t i = 0; i < canvas.size(); ++i) {
        const double v = canvas[i] + rng.gauss() * spec.background_noise;
        sample.image.pixels[i] =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
    }

    if (rng.uniform() < 0.5) {
        // Store mirrored, as a right-breast scan would arrive.
        img::GrayImage flipped = img::GrayImage::blank(s, s);
        img::BinaryMask flipped_mask = img::BinaryMask::blank(s, s);
        for (std::size_t y = 0; y < s; ++y) {
            for (std::size_t x = 0; x < s; ++x) {
                flipped.pixels[y * s + x] = sample.image.pixels[y * s + (s - 1 - x)];
                flipped_mask.bits[y * s + x] = mask.bits[y * s + (s - 1 - x)];
            }
        }
        flipped.laterality = img::Laterality::Right;
        sample.image = std::move(flipped);
        sample.breast_mask = std::move(flipped_mask);
    } else {
        sample.image.laterality = img::Laterality::Left;
        sample.breast_mask = std::move(mask);
    }
    return sample;
}

}  // namespace

std::vector<SyntheticSample> generate_synthetic(const SyntheticSpec& spec,
                                                std::size_t train_per_class,
                                                std::size_t val_per_class) {
    spec.validate();
    if (train_per_class < 1) throw DomainError("generate_synthetic: count must be >= 1");

    Rng rng(spec.seed);
    std::vector<SyntheticSample> samples;
    samples.reserve(2 * (train_per_class + val_per_class));
    for (std::size_t i = 0; i < train_per_class; ++i) {
        samples.push_back(make_sample(spec, rng, 0, "train"));
        samples.push_back(make_sample(spec, rng, 1, "train"));
    }
    for (std::size_t i = 0; i < val_per_class; ++i) {
        samples.push_back(make_sample(spec, rng, 0, "val"));
        samples.push_back(make_sample(spec, rng, 1, "val"));
    }
    return samples;
}

DatasetManifest write_synthetic(const std::vector<SyntheticSample>& samples,
                                const std::string& dir) {
    fs::create_directories(dir);
    DatasetManifest manifest;
    manifest.base_dir = dir;

    char name[32];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::snprintf(name, sizeof(name), "img_%04zu.pgm", i);
        const std::string img_path = (fs::path(dir) / name).string();
        img::write_pgm(samples[i].image, img_path);

        std::snprintf(name, sizeof(name), "img_%04zu.mask.pgm", i);
        img::GrayImage mask_img = img::GrayImage::blank(samples[i].breast_mask.width,
                                                        samples[i].breast_mask.height);
        for (std::size_t p = 0; p < mask_img.pixels.size(); ++p) {
            mask_img.pixels[p] = samples[i].breast_mask.bits[p] ? 255 : 0;
        }
        img::write_pgm(mask_img, (fs::path(dir) / name).string());

        std::snprintf(name, sizeof(name), "img_%04zu.pgm", i);
        ManifestEntry e;
        e.path = name;
        e.label = samples[i].label;
        e.laterality = samples[i].image.laterality;
        e.split = samples[i].split;
        manifest.entries.push_back(std::move(e));
    }
    save_manifest(manifest, (fs::path(dir) / "manifest.csv").string());
    return manifest;
}

}  // namespace mcad::harness
