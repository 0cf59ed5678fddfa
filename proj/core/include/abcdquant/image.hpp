#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "abcdquant/error.hpp"

namespace abcdq {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

/// Rec.601 luma of an 8-bit RGB triple, in [0, 255].
inline double luma(const Rgb& c) {
    return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
}

inline constexpr int kMinImageDim = 8;

/// 8-bit RGB raster, row-major. Pixel (x, y) sits at geometric point
/// (x, y); its square footprint spans [x-0.5, x+0.5] x [y-0.5, y+0.5].
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(int width, int height, Rgb fill = Rgb{}) {
        check_dims(width, height);
        width_ = width;
        height_ = height;
        pixels_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    const Rgb& at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    Rgb& at(int x, int y) {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    const std::vector<Rgb>& pixels() const { return pixels_; }
    std::vector<Rgb>& pixels() { return pixels_; }

    bool operator==(const RasterImage&) const = default;

    static void check_dims(int width, int height) {
        if (width < kMinImageDim || height < kMinImageDim)
            throw InvalidInput("image dimensions must be at least 8x8, got " +
                               std::to_string(width) + "x" + std::to_string(height));
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// Scalar plane with values in [0, 255], same dimension contract as
/// RasterImage. Used for luminance, gradients and morphology.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * height, fill) {
        RasterImage::check_dims(width, height);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    double at(int x, int y) const {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }
    double& at(int x, int y) {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }

    /// Clamped sampling; used by convolutions near the frame edge.
    double at_clamped(int x, int y) const {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return at(x, y);
    }

    const std::vector<double>& values() const { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Row-major lesion membership flags.
class BinaryMask {
public:
    BinaryMask() = default;

    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    bool get(int x, int y) const {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool value) {
        bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
    }

    std::size_t area() const {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const BinaryMask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Luminance plane of an RGB image.
GrayImage luminance(const RasterImage& img);

/// Jaccard index of two same-sized masks. Empty union yields 1.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

} // namespace abcdq
