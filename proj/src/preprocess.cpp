#include "mcad/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mcad/errors.hpp"

namespace mcad::img {

std::array<std::uint64_t, 256> intensity_histogram(const GrayImage& image) {
    if (image.width == 0 || image.height == 0) {
        throw DomainError("empty image has no histogram");
    }
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t p : image.pixels) ++hist[p];
    return hist;
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist) {
    std::uint64_t total = 0, total_sum = 0;
    for (int i = 0; i < 256; ++i) {
        total += hist[i];
        total_sum += hist[i] * static_cast<std::uint64_t>(i);
    }
    if (total == 0) throw DomainError("otsu: empty histogram");

    // Between-class variance up to a positive constant:
    //   ((S0*W - S*W0)^2) / (W0*(W-W0))
    // evaluated from exact integer sums. The double conversions round the
    // same way for any loop structure over the same histogram, which is what
    // lets tests demand exact agreement with a brute-force rescan.
    std::uint64_t w0 = 0, s0 = 0;
    double best_score = -1.0;
    int best_t = -1;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const std::int64_t num = static_cast<std::int64_t>(s0 * total) -
                                 static_cast<std::int64_t>(total_sum * w0);
        const double score = static_cast<double>(num) * static_cast<double>(num) /
                             (static_cast<double>(w0) * static_cast<double>(w1));
        if (score > best_score) {
            best_score = score;
            best_t = t;
        }
    }
    if (best_t < 0) {
        // Single occupied bin: no valid split, return it so that
        // "strictly above" selects nothing.
        for (int i = 0; i < 256; ++i) {
            if (hist[i] != 0) return i;
        }
    }
    return best_t;
}

BinaryMask threshold_segment(const GrayImage& image) {
    if (image.width == 0 || image.height == 0) {
        throw DomainError("threshold_segment: zero-area image");
    }
    const int t = otsu_threshold(intensity_histogram(image));
    BinaryMask mask = BinaryMask::blank(image.width, image.height);
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        mask.bits[i] = image.pixels[i] > t ? 1 : 0;
    }
    return mask;
}

std::pair<BinaryMask, BoundingBox> largest_component(const BinaryMask& mask) {
    const std::size_t w = mask.width, h = mask.height;
    std::vector<std::int32_t> label(w * h, -1);
    std::vector<std::uint32_t> stack;

    std::int32_t best_label = -1;
    std::size_t best_size = 0;
    std::int32_t next_label = 0;

    for (std::size_t start = 0; start < w * h; ++start) {
        if (!mask.bits[start] || label[start] >= 0) continue;
        std::size_t size = 0;
        stack.clear();
        stack.push_back(static_cast<std::uint32_t>(start));
        label[start] = next_label;
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            ++size;
            const std::size_t y = idx / w, x = idx % w;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dy == 0 && dx == 0) continue;
                    const std::size_t ny = y + static_cast<std::size_t>(dy);
                    const std::size_t nx = x + static_cast<std::size_t>(dx);
                    if (ny >= h || nx >= w) continue;  // size_t wrap covers dy/dx = -1
                    const std::size_t nidx = ny * w + nx;
                    if (mask.bits[nidx] && label[nidx] < 0) {
                        label[nidx] = next_label;
                        stack.push_back(static_cast<std::uint32_t>(nidx));
                    }
                }
            }
        }
        // Strict > keeps the first-found component on ties; components are
        // discovered in scan order of their top-left pixel.
        if (size > best_size) {
            best_size = size;
            best_label = next_label;
        }
        ++next_label;
    }

    if (best_label < 0) throw DomainError("no breast region found (empty mask)");

    BinaryMask out = BinaryMask::blank(w, h);
    BoundingBox box{w, h, 0, 0};
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (label[y * w + x] == best_label) {
                out.bits[y * w + x] = 1;
                box.x0 = std::min(box.x0, x);
                box.y0 = std::min(box.y0, y);
                box.x1 = std::max(box.x1, x);
                box.y1 = std::max(box.y1, y);
            }
        }
    }
    return {std::move(out), box};
}

GrayImage mirror_if_right(const GrayImage& image) {
    if (image.laterality != Laterality::Right) return image;
    GrayImage out = image;
    for (std::size_t y = 0; y < image.height; ++y) {
        const std::uint8_t* src = image.pixels.data() + y * image.width;
        std::uint8_t* dst = out.pixels.data() + y * image.width;
        for (std::size_t x = 0; x < image.width; ++x) {
            dst[x] = src[image.width - 1 - x];
        }
    }
    out.laterality = Laterality::Left;
    return out;
}

BinaryMask mirror_mask(const BinaryMask& mask, bool apply) {
    if (!apply) return mask;
    BinaryMask out = mask;
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            out.bits[y * mask.width + x] = mask.bits[y * mask.width + (mask.width - 1 - x)];
        }
    }
    return out;
}

Tensor crop_normalize(const GrayImage& image, const BoundingBox& box, std::size_t target_h,
                      std::size_t target_w) {
    if (box.x0 > box.x1 || box.y0 > box.y1 || box.x1 >= image.width || box.y1 >= image.height) {
        throw DomainError("crop box out of bounds or degenerate");
    }
    if (target_h == 0 || target_w == 0) throw DomainError("target size must be positive");

    const std::size_t sh = box.height();
    const std::size_t sw = box.width();
    Tensor out({1, target_h, target_w});
    double* dst = out.data();

    const double sy_scale = static_cast<double>(sh) / static_cast<double>(target_h);
    const double sx_scale = static_cast<double>(sw) / static_cast<double>(target_w);

    for (std::size_t ty = 0; ty < target_h; ++ty) {
        double sy = (static_cast<double>(ty) + 0.5) * sy_scale - 0.5;
        sy = std::max(0.0, std::min(sy, static_cast<double>(sh - 1)));
        const std::size_t y0 = static_cast<std::size_t>(sy);
        const std::size_t y1 = std::min(y0 + 1, sh - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t tx = 0; tx < target_w; ++tx) {
            double sx = (static_cast<double>(tx) + 0.5) * sx_scale - 0.5;
            sx = std::max(0.0, std::min(sx, static_cast<double>(sw - 1)));
            const std::size_t x0 = static_cast<std::size_t>(sx);
            const std::size_t x1 = std::min(x0 + 1, sw - 1);
            const double fx = sx - static_cast<double>(x0);

            const double p00 = image.at(box.y0 + y0, box.x0 + x0);
            const double p01 = image.at(box.y0 + y0, box.x0 + x1);
            const double p10 = image.at(box.y0 + y1, box.x0 + x0);
            const double p11 = image.at(box.y0 + y1, box.x0 + x1);
            const double v = (1.0 - fy) * ((1.0 - fx) * p00 + fx * p01) +
                             fy * ((1.0 - fx) * p10 + fx * p11);
            dst[ty * target_w + tx] = v / 255.0;
        }
    }
    return out;
}

std::pair<BinaryMask, BoundingBox> segment_breast(const GrayImage& image) {
    return largest_component(threshold_segment(image));
}

namespace {

template <typename F>
auto pipeline_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw DomainError(std::string(stage) + ": " + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(std::string(stage) + ": " + e.what());
    }
}

}  // namespace

Tensor preprocess_pipeline(const GrayImage& image, std::size_t target_h, std::size_t target_w) {
    const GrayImage oriented =
        pipeline_stage("mirror_if_right", [&] { return mirror_if_right(image); });
    const BinaryMask mask =
        pipeline_stage("threshold_segment", [&] { return threshold_segment(oriented); });
    const auto [component, box] =
        pipeline_stage("largest_component", [&] { return largest_component(mask); });
    (void)component;
    return pipeline_stage("crop_normalize",
                          [&] { return crop_normalize(oriented, box, target_h, target_w); });
}

}  // namespace mcad::img
