#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcad::img {

enum class Laterality { Left, Right, Unknown };

/// 8-bit grayscale raster, row-major, with the breast-side tag carried by
/// the dataset manifest.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;
    Laterality laterality = Laterality::Unknown;

    std::uint8_t at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }

    static GrayImage blank(std::size_t width, std::size_t height, std::uint8_t value = 0);
};

struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;  // 0/1 per pixel

    bool at(std::size_t y, std::size_t x) const { return bits[y * width + x] != 0; }
    void set(std::size_t y, std::size_t x, bool v) { bits[y * width + x] = v ? 1 : 0; }
    std::size_t count() const;

    static BinaryMask blank(std::size_t width, std::size_t height);
};

/// Inclusive pixel coordinates, x0 <= x1 and y0 <= y1.
struct BoundingBox {
    std::size_t x0 = 0;
    std::size_t y0 = 0;
    std::size_t x1 = 0;
    std::size_t y1 = 0;

    std::size_t width() const { return x1 - x0 + 1; }
    std::size_t height() const { return y1 - y0 + 1; }
};

char laterality_code(Laterality l);
Laterality laterality_from_code(char c);

/// Binary PGM ("P5", maxval 255) reader/writer. Laterality is not stored in
/// the file; the loader leaves it Unknown.
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

}  // namespace mcad::img
