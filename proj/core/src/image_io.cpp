#include "abcdquant/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace abcdq {

namespace {

bool has_png_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open image file: " + path);
    unsigned char magic[8] = {};
    in.read(reinterpret_cast<char*>(magic), 8);
    static const unsigned char kPng[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    for (int i = 0; i < 8; ++i)
        if (magic[i] != kPng[i]) return false;
    return true;
}

RasterImage load_png(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw InvalidInput("PNG read failed (" + path + "): " + png.message);

    png.format = PNG_FORMAT_RGB;  // libpng strips alpha / expands palette+gray
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw InvalidInput("PNG decode failed (" + path + "): " + msg);
    }

    RasterImage img(static_cast<int>(png.width), static_cast<int>(png.height));
    auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = Rgb{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
    return img;
}

int read_ppm_token(std::istream& in) {
    // Skips whitespace and '#' comments between header fields.
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    in >> value;
    return value;
}

} // namespace

RasterImage load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open image file: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '6')
        throw InvalidInput("not a PPM P6 file: " + path);
    const int w = read_ppm_token(in);
    const int h = read_ppm_token(in);
    const int maxval = read_ppm_token(in);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw InvalidInput("unsupported PPM header in " + path);
    in.get();  // single whitespace before raster data

    RasterImage img(w, h);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw InvalidInput("truncated PPM raster in " + path);
    auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = Rgb{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
    return img;
}

void save_ppm(const RasterImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write image file: " + path);
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    for (const Rgb& p : img.pixels()) {
        const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g),
                               static_cast<char>(p.b)};
        out.write(bytes, 3);
    }
    if (!out) throw InvalidInput("write failed: " + path);
}

RasterImage load_image(const std::string& path) {
    if (has_png_magic(path)) return load_png(path);
    return load_ppm(path);
}

void save_png(const RasterImage& img, const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_RGB;

    std::vector<std::uint8_t> buf(img.pixel_count() * 3);
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        buf[3 * i] = px[i].r;
        buf[3 * i + 1] = px[i].g;
        buf[3 * i + 2] = px[i].b;
    }
    if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
        throw InvalidInput("PNG write failed (" + path + "): " + png.message);
}

void save_mask_png(const BinaryMask& mask, const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(mask.width());
    png.height = static_cast<png_uint_32>(mask.height());
    png.format = PNG_FORMAT_GRAY;

    std::vector<std::uint8_t> buf(mask.bits().size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = mask.bits()[i] ? 255 : 0;
    if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
        throw InvalidInput("PNG write failed (" + path + "): " + png.message);
}

} // namespace abcdq
