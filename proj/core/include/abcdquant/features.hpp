#pragma once

#include <cstdint>
#include <vector>

#include "abcdquant/image.hpp"
#include "abcdquant/segmentation.hpp"

namespace abcdq {

/// The four dermoscopy scores, each in [0, 1].
struct AbcdScores {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

/// Asymmetry split into its four averaged terms: mask-overlap asymmetry
/// and luminance-SSIM asymmetry about each principal axis.
struct AsymmetryBreakdown {
    double shape_major = 0.0;
    double shape_minor = 0.0;
    double color_major = 0.0;
    double color_minor = 0.0;
    double a = 0.0;  // mean of the four terms
};

struct BorderBreakdown {
    double b_shape = 0.0;  // 1 - solidity, clamped to [0, 1]
    double b_grad = 0.0;   // normalized mean boundary gradient
    double b = 0.0;        // 0.5*b_shape + 0.5*(1 - b_grad), exactly
};

struct ColorBreakdown {
    double dispersion = 0.0;  // normalized within-cluster spread
    int n_colors = 1;         // surviving clusters after pruning + merging
    double c = 0.0;           // clamp(dispersion + 0.1*(n_colors-1), 0, 1)
};

/// Pixel length of 6 mm. HAM10000 frames carry no physical scale, so
/// this is calibrated from the lesion-size distribution; 36 px is the
/// documented fallback for uncalibrated single-image use.
struct CalibrationParams {
    double p6mm_px = 36.0;
};

inline constexpr double kFallbackP6mmPx = 36.0;

struct DiameterResult {
    double d = 0.0;                // clamp(max_diameter / p6mm, 0, 1)
    double max_diameter_px = 0.0;  // max Feret over boundary pixel corners
    double eq_diameter_px = 0.0;   // 2*sqrt(area/pi)
};

/// Everything score_lesion produces; `scores` is the headline output,
/// the rest mirrors the per-feature breakdowns for reporting.
struct LesionScore {
    AbcdScores scores;
    AsymmetryBreakdown asymmetry;
    BorderBreakdown border;
    ColorBreakdown color;
    double max_diameter_px = 0.0;
    double eq_diameter_px = 0.0;
};

/// Mean of shape and luminance asymmetry about the major and minor axes.
/// Shape asymmetry is 1 - IoU of the mask with its reflection; luminance
/// asymmetry is 1 - SSIM of mirror-paired luminance over the lesion
/// bounding box with non-lesion pixels zeroed.
double asymmetry_score(const RasterImage& img, const SegmentationResult& seg);
AsymmetryBreakdown asymmetry_breakdown(const RasterImage& img, const SegmentationResult& seg);

/// Convex-hull solidity deficit plus inverted boundary-gradient term.
/// Requires lesion area >= 50 px and a non-degenerate hull.
BorderBreakdown border_score(const RasterImage& img, const SegmentationResult& seg);

/// k-means color clustering (k = 6, farthest-point init, <= 50 rounds),
/// < 2% clusters discarded, centroids merged below distance 25. The
/// clustering is a pure function of the lesion pixels: initialization
/// probes come from a deterministic farthest-point chain and the
/// lowest-inertia run wins, so `seed` seals no remaining randomness and
/// repeated calls agree bit for bit.
ColorBreakdown color_score(const RasterImage& img, const SegmentationResult& seg,
                           std::uint64_t seed);

DiameterResult diameter_score(const SegmentationResult& seg, const CalibrationParams& cal);

/// p6mm = 95th percentile (linear interpolation) of the supplied max
/// diameters; needs at least 20 samples.
CalibrationParams calibrate_p6mm(const std::vector<double>& max_diameters);

/// Full chain: hair removal, provisional segmentation, color
/// normalization against the provisional background, final segmentation,
/// then the four feature scores.
LesionScore score_lesion(const RasterImage& img, const CalibrationParams& cal,
                         std::uint64_t seed);

// Tuning constants pinned by the implementation.
inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);
inline constexpr double kGradientRef = 128.0;
inline constexpr std::size_t kMinLesionArea = 50;
inline constexpr int kColorClusters = 6;
inline constexpr int kColorMaxIterations = 50;
inline constexpr int kColorRestarts = 4;
inline constexpr double kColorMinClusterFraction = 0.02;
inline constexpr double kColorMergeRadius = 25.0;
inline constexpr double kColorDispersionRef = 120.0;

} // namespace abcdq
