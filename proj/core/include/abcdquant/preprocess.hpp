#pragma once

#include "abcdquant/image.hpp"

namespace abcdq {

/// Bilinear resize. Targets below 8x8 are rejected; resizing to the
/// source dimensions is pixel-exact.
RasterImage resize_image(const RasterImage& img, int target_w, int target_h);

/// Detects dark, thin, elongated structures by a luminance bottom-hat
/// (disk diameter 9, response > 30, local width <= 7 px) and inpaints
/// them from the mean of the nearest non-hair neighbors. An image with
/// no detections is returned unchanged.
RasterImage remove_hair(const RasterImage& img);

inline constexpr Rgb kReferenceBackground{200, 160, 140};
inline constexpr double kGainClampLow = 0.5;
inline constexpr double kGainClampHigh = 2.0;

/// Per-channel gain so the mean color over background_mask lands on
/// kReferenceBackground; gains clamped to [0.5, 2], channels to [0, 255].
/// The background mask must cover at least 1% of the frame.
RasterImage normalize_colors(const RasterImage& img, const BinaryMask& background_mask);

} // namespace abcdq
