#pragma once

#include <utility>
#include <vector>

#include "abcdquant/geometry.hpp"
#include "abcdquant/image.hpp"

namespace abcdq {

/// Lesion mask plus the moment-derived summary used by all feature
/// computations.
struct SegmentationResult {
    BinaryMask mask;
    std::size_t area = 0;          // number of set bits
    Point centroid;                // sub-pixel, in pixel coordinates
    double orientation = 0.0;      // radians, in (-pi/2, pi/2]
    double major_axis_len = 0.0;   // pixels, >= minor_axis_len
    double minor_axis_len = 0.0;
};

/// Otsu threshold on the luminance plane (lesion = darker side),
/// disk opening + closing with radius max(1, min(w,h)/112), hole fill,
/// largest 4-connected component, then moments.
///
/// Throws NoLesionFound when the surviving component covers < 0.5% or
/// > 95% of the frame.
SegmentationResult segment_lesion(const RasterImage& img);

/// Moments of an arbitrary mask (same math the segmenter applies to the
/// final component). Throws NoLesionFound on an empty mask.
SegmentationResult analyze_mask(BinaryMask mask);

/// Mirrors every set pixel about the line through axis_point at
/// axis_angle; nearest-pixel rounding, out-of-frame reflections dropped.
BinaryMask reflect_mask(const BinaryMask& mask, Point axis_point, double axis_angle);

/// Set pixels with a 4-neighbor outside the mask (frame edges count
/// as outside), in row-major order.
std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& mask);

/// Number of 4-connected foreground components.
int count_components(const BinaryMask& mask);

// Binary morphology with a disk structuring element, shared with the
// preprocessing chain.
BinaryMask dilate_disk(const BinaryMask& mask, int radius);
BinaryMask erode_disk(const BinaryMask& mask, int radius);
BinaryMask fill_holes(const BinaryMask& mask);

} // namespace abcdq
