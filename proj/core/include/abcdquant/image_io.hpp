#pragma once

#include <string>

#include "abcdquant/image.hpp"

namespace abcdq {

/// Loads PNG (8-bit RGB/RGBA/gray/palette; alpha ignored) or PPM P6,
/// dispatched on file content.
RasterImage load_image(const std::string& path);

/// Writes an 8-bit RGB PNG.
void save_png(const RasterImage& img, const std::string& path);

/// Writes a mask as 8-bit grayscale PNG, 255 = lesion, 0 = background.
void save_mask_png(const BinaryMask& mask, const std::string& path);

RasterImage load_ppm(const std::string& path);
void save_ppm(const RasterImage& img, const std::string& path);

} // namespace abcdq
