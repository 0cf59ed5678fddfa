#include "abcdquant/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcdquant/preprocess.hpp"

namespace abcdq {

namespace {

struct Box {
    int x0, y0, x1, y1;  // inclusive
};

Box mask_bbox(const BinaryMask& mask) {
    Box b{mask.width(), mask.height(), -1, -1};
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.get(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
            }
    return b;
}

/// Global SSIM between the mirror-paired masked luminance half-planes
/// split by the axis through `c` at `angle`. Pixels outside the lesion
/// contribute value 0, so the comparison sees both color and shape
/// mismatch across the axis.
double half_plane_ssim(const GrayImage& lum, const BinaryMask& mask, const Box& box,
                       Point c, double angle) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double nx = -dy, ny = dx;  // axis normal

    double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    std::size_t n = 0;
    for (int y = box.y0; y <= box.y1; ++y)
        for (int x = box.x0; x <= box.x1; ++x) {
            const double side = (x - c.x) * nx + (y - c.y) * ny;
            // one representative per mirror pair; the half-pixel band on
            // the axis would only pair pixels with themselves
            if (side <= 0.5) continue;
            const double proj = (x - c.x) * dx + (y - c.y) * dy;
            const int mx = static_cast<int>(std::lround(c.x + proj * dx - side * nx));
            const int my = static_cast<int>(std::lround(c.y + proj * dy - side * ny));
            if (!lum.in_bounds(mx, my)) continue;
            const double v1 = mask.get(x, y) ? lum.at(x, y) : 0.0;
            const double v2 = mask.get(mx, my) ? lum.at(mx, my) : 0.0;
            s1 += v1;
            s2 += v2;
            s11 += v1 * v1;
            s22 += v2 * v2;
            s12 += v1 * v2;
            ++n;
        }
    if (n == 0) return 1.0;

    const double inv = 1.0 / static_cast<double>(n);
    const double mu1 = s1 * inv, mu2 = s2 * inv;
    const double var1 = std::max(0.0, s11 * inv - mu1 * mu1);
    const double var2 = std::max(0.0, s22 * inv - mu2 * mu2);
    const double cov = s12 * inv - mu1 * mu2;
    return ((2.0 * mu1 * mu2 + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((mu1 * mu1 + mu2 * mu2 + kSsimC1) * (var1 + var2 + kSsimC2));
}

/// Sobel gradient magnitude at (x, y), clamped sampling at the frame
/// edge. Scaled so an ideal step of height h reads h at the pixels
/// adjacent to the edge.
double sobel_magnitude(const GrayImage& g, int x, int y) {
    const double tl = g.at_clamped(x - 1, y - 1), tc = g.at_clamped(x, y - 1),
                 tr = g.at_clamped(x + 1, y - 1);
    const double ml = g.at_clamped(x - 1, y), mr = g.at_clamped(x + 1, y);
    const double bl = g.at_clamped(x - 1, y + 1), bc = g.at_clamped(x, y + 1),
                 br = g.at_clamped(x + 1, y + 1);
    const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
    const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
    return std::sqrt(gx * gx + gy * gy) / 4.0;
}

struct Cluster {
    double r = 0, g = 0, b = 0;
    std::size_t size = 0;
};

double dist2_rgb(double r0, double g0, double b0, double r1, double g1, double b1) {
    const double dr = r0 - r1, dg = g0 - g1, db = b0 - b1;
    return dr * dr + dg * dg + db * db;
}

} // namespace

AsymmetryBreakdown asymmetry_breakdown(const RasterImage& img, const SegmentationResult& seg) {
    if (seg.area == 0) throw NoLesionFound("asymmetry_score: empty segmentation");
    const GrayImage lum = luminance(img);
    const Box box = mask_bbox(seg.mask);

    AsymmetryBreakdown out;
    const double angles[2] = {seg.orientation, seg.orientation + M_PI / 2.0};
    double shape[2], color[2];
    for (int i = 0; i < 2; ++i) {
        const BinaryMask reflected = reflect_mask(seg.mask, seg.centroid, angles[i]);
        shape[i] = 1.0 - mask_iou(seg.mask, reflected);
        const double ssim = half_plane_ssim(lum, seg.mask, box, seg.centroid, angles[i]);
        color[i] = 1.0 - std::clamp(ssim, 0.0, 1.0);
    }
    out.shape_major = shape[0];
    out.shape_minor = shape[1];
    out.color_major = color[0];
    out.color_minor = color[1];
    out.a = (shape[0] + shape[1] + color[0] + color[1]) / 4.0;
    return out;
}

double asymmetry_score(const RasterImage& img, const SegmentationResult& seg) {
    return asymmetry_breakdown(img, seg).a;
}

BorderBreakdown border_score(const RasterImage& img, const SegmentationResult& seg) {
    if (seg.area < kMinLesionArea)
        throw TinyLesion("border_score: lesion below " + std::to_string(kMinLesionArea) +
                         " px");

    const auto boundary = boundary_pixels(seg.mask);
    std::vector<Point> centers;
    centers.reserve(boundary.size());
    for (auto [x, y] : boundary) centers.push_back(Point{double(x), double(y)});

    const auto hull = convex_hull(centers);
    const double hull_area = polygon_area(hull);
    if (hull_area <= 0.0) throw TinyLesion("border_score: degenerate convex hull");

    const double solidity = static_cast<double>(seg.area) / hull_area;
    const double b_shape = std::clamp(1.0 - solidity, 0.0, 1.0);

    const GrayImage lum = luminance(img);
    double grad_sum = 0.0;
    for (auto [x, y] : boundary) grad_sum += sobel_magnitude(lum, x, y);
    const double mean_grad = grad_sum / static_cast<double>(boundary.size());
    const double b_grad = std::clamp(mean_grad / kGradientRef, 0.0, 1.0);

    BorderBreakdown out;
    out.b_shape = b_shape;
    out.b_grad = b_grad;
    out.b = 0.5 * b_shape + 0.5 * (1.0 - b_grad);
    return out;
}

ColorBreakdown color_score(const RasterImage& img, const SegmentationResult& seg,
                           std::uint64_t seed) {
    if (seg.area < kMinLesionArea)
        throw TinyLesion("color_score: lesion below " + std::to_string(kMinLesionArea) +
                         " px");

    std::vector<Rgb> px;
    px.reserve(seg.area);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (seg.mask.get(x, y)) px.push_back(img.at(x, y));
    const std::size_t n = px.size();

    // Farthest-point initialization, Lloyd iterations to convergence.
    // The probe chain starts at the pixel farthest from the mean color;
    // each restart begins the chain at the next probe point and the
    // lowest-inertia run wins. Everything is a pure function of the
    // pixel multiset, so the cluster count cannot wobble between runs
    // (the seed parameter seals no remaining randomness).
    const int k = static_cast<int>(std::min<std::size_t>(kColorClusters, n));
    (void)seed;
    std::vector<std::size_t> probes;
    {
        double mr = 0, mg = 0, mb = 0;
        for (const Rgb& p : px) {
            mr += p.r;
            mg += p.g;
            mb += p.b;
        }
        mr /= static_cast<double>(n);
        mg /= static_cast<double>(n);
        mb /= static_cast<double>(n);
        std::size_t anchor = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = dist2_rgb(px[i].r, px[i].g, px[i].b, mr, mg, mb);
            if (d2 > best) {
                best = d2;
                anchor = i;
            }
        }
        // the anchored farthest-point chain doubles as the probe list
        std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
        std::size_t pick = anchor;
        for (int c = 0; c < std::min(k, kColorRestarts); ++c) {
            probes.push_back(pick);
            double far = -1.0;
            std::size_t next = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d2 = dist2_rgb(px[i].r, px[i].g, px[i].b, px[pick].r,
                                            px[pick].g, px[pick].b);
                min_d2[i] = std::min(min_d2[i], d2);
                if (min_d2[i] > far) {
                    far = min_d2[i];
                    next = i;
                }
            }
            pick = next;
        }
    }
    std::vector<Cluster> best_centers;
    std::vector<int> assign;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (std::size_t start : probes) {
        std::vector<Cluster> centers;
        std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
        std::size_t pick = start;
        for (int c = 0; c < k; ++c) {
            const Rgb p = px[pick];
            centers.push_back(Cluster{double(p.r), double(p.g), double(p.b), 0});
            double best = -1.0;
            std::size_t next = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d2 =
                    dist2_rgb(px[i].r, px[i].g, px[i].b, centers.back().r, centers.back().g,
                              centers.back().b);
                min_d2[i] = std::min(min_d2[i], d2);
                if (min_d2[i] > best) {
                    best = min_d2[i];
                    next = i;
                }
            }
            pick = next;
        }

        std::vector<int> labels(n, -1);
        double inertia = 0.0;
        for (int iter = 0; iter < kColorMaxIterations; ++iter) {
            bool changed = false;
            inertia = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                int who = 0;
                for (int c = 0; c < k; ++c) {
                    const double d2 = dist2_rgb(px[i].r, px[i].g, px[i].b, centers[c].r,
                                                centers[c].g, centers[c].b);
                    if (d2 < best) {
                        best = d2;
                        who = c;
                    }
                }
                inertia += best;
                if (labels[i] != who) {
                    labels[i] = who;
                    changed = true;
                }
            }
            if (!changed && iter > 0) break;

            std::vector<double> sr(k, 0), sg(k, 0), sb(k, 0);
            std::vector<std::size_t> cnt(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const int c = labels[i];
                sr[c] += px[i].r;
                sg[c] += px[i].g;
                sb[c] += px[i].b;
                ++cnt[c];
            }
            for (int c = 0; c < k; ++c)
                if (cnt[c] > 0) {
                    centers[c].r = sr[c] / cnt[c];
                    centers[c].g = sg[c] / cnt[c];
                    centers[c].b = sb[c] / cnt[c];
                }
        }
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_centers = std::move(centers);
            assign = std::move(labels);
        }
    }

    std::vector<Cluster> clusters;
    {
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) ++cnt[assign[i]];
        for (int c = 0; c < k; ++c)
            if (static_cast<double>(cnt[c]) >= kColorMinClusterFraction * n)
                clusters.push_back(Cluster{best_centers[c].r, best_centers[c].g,
                                           best_centers[c].b, cnt[c]});
    }

    // Greedy merge of the closest remaining pair under the merge radius.
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double d2 = dist2_rgb(clusters[i].r, clusters[i].g, clusters[i].b,
                                            clusters[j].r, clusters[j].g, clusters[j].b);
                if (d2 < best) {
                    best = d2;
                    bi = i;
                    bj = j;
                }
            }
        if (std::sqrt(best) >= kColorMergeRadius) break;
        Cluster& a = clusters[bi];
        const Cluster& b = clusters[bj];
        const double total = static_cast<double>(a.size + b.size);
        a.r = (a.r * a.size + b.r * b.size) / total;
        a.g = (a.g * a.size + b.g * b.size) / total;
        a.b = (a.b * a.size + b.b * b.size) / total;
        a.size += b.size;
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    // Every lesion pixel counts toward the spread: reassign to the
    // surviving centroid set, then size-weight the per-cluster RMS
    // distances.
    std::vector<double> sum_d2(clusters.size(), 0.0);
    std::vector<std::size_t> sizes(clusters.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t who = 0;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const double d2 = dist2_rgb(px[i].r, px[i].g, px[i].b, clusters[c].r,
                                        clusters[c].g, clusters[c].b);
            if (d2 < best) {
                best = d2;
                who = c;
            }
        }
        sum_d2[who] += best;
        ++sizes[who];
    }
    double weighted = 0.0;
    std::size_t counted = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (sizes[c] == 0) continue;
        weighted += static_cast<double>(sizes[c]) *
                    std::sqrt(sum_d2[c] / static_cast<double>(sizes[c]));
        counted += sizes[c];
    }

    ColorBreakdown out;
    out.n_colors = static_cast<int>(std::count_if(sizes.begin(), sizes.end(),
                                                  [](std::size_t s) { return s > 0; }));
    out.n_colors = std::max(out.n_colors, 1);
    out.dispersion =
        std::clamp(weighted / static_cast<double>(counted) / kColorDispersionRef, 0.0, 1.0);
    out.c = std::clamp(out.dispersion + 0.1 * (out.n_colors - 1), 0.0, 1.0);
    return out;
}

DiameterResult diameter_score(const SegmentationResult& seg, const CalibrationParams& cal) {
    if (seg.area == 0) throw NoLesionFound("diameter_score: empty mask");
    if (cal.p6mm_px <= 0.0) throw InvalidInput("diameter_score: p6mm_px must be positive");

    // Max Feret over the corners of boundary pixel squares, so a w x h
    // block measures the full sqrt(w^2 + h^2) diagonal.
    std::vector<Point> corners;
    for (auto [x, y] : boundary_pixels(seg.mask)) {
        corners.push_back(Point{x - 0.5, y - 0.5});
        corners.push_back(Point{x + 0.5, y - 0.5});
        corners.push_back(Point{x - 0.5, y + 0.5});
        corners.push_back(Point{x + 0.5, y + 0.5});
    }
    const double feret = hull_diameter(convex_hull(std::move(corners)));

    DiameterResult out;
    out.max_diameter_px = feret;
    out.eq_diameter_px = 2.0 * std::sqrt(static_cast<double>(seg.area) / M_PI);
    out.d = std::clamp(feret / cal.p6mm_px, 0.0, 1.0);
    return out;
}

CalibrationParams calibrate_p6mm(const std::vector<double>& max_diameters) {
    if (max_diameters.size() < 20)
        throw InvalidInput("calibrate_p6mm: need at least 20 samples, got " +
                           std::to_string(max_diameters.size()));
    std::vector<double> sorted = max_diameters;
    std::sort(sorted.begin(), sorted.end());

    const double idx = 0.95 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    const double hi_val = lo + 1 < sorted.size() ? sorted[lo + 1] : sorted[lo];
    const double p95 = sorted[lo] + frac * (hi_val - sorted[lo]);
    if (!(p95 > 0.0))
        throw InvalidInput("calibrate_p6mm: 95th percentile is not positive");
    return CalibrationParams{p95};
}

LesionScore score_lesion(const RasterImage& img, const CalibrationParams& cal,
                         std::uint64_t seed) {
    const RasterImage dehaired = remove_hair(img);

    // Provisional segmentation only delimits skin for the color
    // reference; the scored mask comes from the normalized image.
    const SegmentationResult provisional = segment_lesion(dehaired);
    BinaryMask background(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            background.set(x, y, !provisional.mask.get(x, y));

    const RasterImage normalized = normalize_colors(dehaired, background);
    const SegmentationResult seg = segment_lesion(normalized);

    LesionScore out;
    out.asymmetry = asymmetry_breakdown(normalized, seg);
    out.border = border_score(normalized, seg);
    out.color = color_score(normalized, seg, seed);
    const DiameterResult diam = diameter_score(seg, cal);

    out.scores.a = out.asymmetry.a;
    out.scores.b = out.border.b;
    out.scores.c = out.color.c;
    out.scores.d = diam.d;
    out.max_diameter_px = diam.max_diameter_px;
    out.eq_diameter_px = diam.eq_diameter_px;
    return out;
}

} // namespace abcdq
