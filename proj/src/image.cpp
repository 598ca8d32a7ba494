#include "mcad/image.hpp"

#include <fstream>
#include <numeric>

#include "mcad/errors.hpp"

namespace mcad::img {

GrayImage GrayImage::blank(std::size_t width, std::size_t height, std::uint8_t value) {
    GrayImage im;
    im.width = width;
    im.height = height;
    im.pixels.assign(width * height, value);
    return im;
}

BinaryMask BinaryMask::blank(std::size_t width, std::size_t height) {
    BinaryMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(width * height, 0);
    return m;
}

std::size_t BinaryMask::count() const {
    return std::accumulate(bits.begin(), bits.end(), static_cast<std::size_t>(0));
}

char laterality_code(Laterality l) {
    switch (l) {
        case Laterality::Left:
            return 'L';
        case Laterality::Right:
            return 'R';
        case Laterality::Unknown:
            return 'U';
    }
    return 'U';
}

Laterality laterality_from_code(char c) {
    switch (c) {
        case 'L':
            return Laterality::Left;
        case 'R':
            return Laterality::Right;
        case 'U':
            return Laterality::Unknown;
        default:
            throw ParseError(std::string("bad laterality code '") + c + "' (expected L, R or U)");
    }
}

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_token(std::ifstream& is, const std::string& path) {
    int c = is.get();
    while (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = is.get();
        }
        c = is.get();
    }
    int value = 0;
    bool any = false;
    while (c >= '0' && c <= '9') {
        value = value * 10 + (c - '0');
        any = true;
        if (value > 1 << 30) throw ParseError("PGM header value overflow: " + path);
        c = is.get();
    }
    if (!any) throw ParseError("malformed PGM header: " + path);
    return value;
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open image: " + path);

    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '5') throw ParseError("not a binary PGM (P5) file: " + path);

    const int width = next_header_token(is, path);
    const int height = next_header_token(is, path);
    const int maxval = next_header_token(is, path);
    if (width <= 0 || height <= 0) throw ParseError("bad PGM dimensions: " + path);
    if (maxval != 255) {
        throw ParseError("unsupported PGM maxval " + std::to_string(maxval) + " (want 255): " +
                         path);
    }

    GrayImage im;
    im.width = static_cast<std::size_t>(width);
    im.height = static_cast<std::size_t>(height);
    im.pixels.resize(im.width * im.height);
    is.read(reinterpret_cast<char*>(im.pixels.data()),
            static_cast<std::streamsize>(im.pixels.size()));
    if (is.gcount() != static_cast<std::streamsize>(im.pixels.size())) {
        throw IoError("truncated PGM pixel data: " + path);
    }
    return im;
}

void write_pgm(const GrayImage& image, const std::string& path) {
    if (image.width == 0 || image.height == 0 ||
        image.pixels.size() != image.width * image.height) {
        throw DomainError("write_pgm: inconsistent image dimensions");
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open image for writing: " + path);
    os << "P5\n" << image.width << " " << image.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(image.pixels.data()),
             static_cast<std::streamsize>(image.pixels.size()));
    if (!os) throw IoError("image write failed: " + path);
}

}  // namespace mcad::img
