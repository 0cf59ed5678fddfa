#include "abcdquant/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace abcdq {

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    return offs;
}

int otsu_threshold(const GrayImage& lum) {
    std::array<std::size_t, 256> hist{};
    for (double v : lum.values()) {
        int bin = static_cast<int>(std::lround(v));
        bin = std::clamp(bin, 0, 255);
        ++hist[static_cast<std::size_t>(bin)];
    }
    const double total = static_cast<double>(lum.values().size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * static_cast<double>(hist[i]);

    double sum_low = 0.0, w_low = 0.0;
    double best_var = -1.0;
    int first_t = 0, last_t = 0;
    for (int t = 0; t < 256; ++t) {
        w_low += static_cast<double>(hist[t]);
        sum_low += t * static_cast<double>(hist[t]);
        const double w_high = total - w_low;
        if (w_low == 0.0 || w_high == 0.0) continue;
        const double mu_low = sum_low / w_low;
        const double mu_high = (sum_all - sum_low) / w_high;
        const double var = w_low * w_high * (mu_low - mu_high) * (mu_low - mu_high);
        if (var > best_var) {
            best_var = var;
            first_t = last_t = t;
        } else if (var == best_var) {
            last_t = t;  // flat plateau between well-separated modes
        }
    }
    return (first_t + last_t) / 2;  // lesion side: bin(lum) <= threshold
}

/// 4-connected component labels; 0 = background. Returns label count.
int label_components(const BinaryMask& mask, std::vector<int>& labels) {
    const int w = mask.width(), h = mask.height();
    labels.assign(static_cast<std::size_t>(w) * h, 0);
    int next = 0;
    std::queue<std::pair<int, int>> q;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0)
                continue;
            ++next;
            labels[static_cast<std::size_t>(y) * w + x] = next;
            q.emplace(x, y);
            while (!q.empty()) {
                auto [cx, cy] = q.front();
                q.pop();
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = cx + dx[k], ny = cy + dy[k];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    auto& l = labels[static_cast<std::size_t>(ny) * w + nx];
                    if (mask.get(nx, ny) && l == 0) {
                        l = next;
                        q.emplace(nx, ny);
                    }
                }
            }
        }
    }
    return next;
}

} // namespace

BinaryMask dilate_disk(const BinaryMask& mask, int radius) {
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
    const auto offs = disk_offsets(radius);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            for (auto [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && nx < w && ny >= 0 && ny < h) out.set(nx, ny, true);
            }
        }
    return out;
}

BinaryMask erode_disk(const BinaryMask& mask, int radius) {
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
    const auto offs = disk_offsets(radius);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool keep = mask.get(x, y);
            if (keep) {
                for (auto [dx, dy] : offs) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h || !mask.get(nx, ny)) {
                        keep = false;
                        break;
                    }
                }
            }
            out.set(x, y, keep);
        }
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    // Flood the background from the frame edge; unreached background is a hole.
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    std::queue<std::pair<int, int>> q;
    auto push = [&](int x, int y) {
        const auto idx = static_cast<std::size_t>(y) * w + x;
        if (!mask.get(x, y) && !outside[idx]) {
            outside[idx] = 1;
            q.emplace(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        if (cx + 1 < w) push(cx + 1, cy);
        if (cx > 0) push(cx - 1, cy);
        if (cy + 1 < h) push(cx, cy + 1);
        if (cy > 0) push(cx, cy - 1);
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.set(x, y, !outside[static_cast<std::size_t>(y) * w + x]);
    return out;
}

int count_components(const BinaryMask& mask) {
    std::vector<int> labels;
    return label_components(mask, labels);
}

std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            const bool edge = x == 0 || x == w - 1 || y == 0 || y == h - 1 ||
                              !mask.get(x - 1, y) || !mask.get(x + 1, y) ||
                              !mask.get(x, y - 1) || !mask.get(x, y + 1);
            if (edge) out.emplace_back(x, y);
        }
    return out;
}

SegmentationResult analyze_mask(BinaryMask mask) {
    const int w = mask.width(), h = mask.height();
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.get(x, y)) {
                m00 += 1.0;
                m10 += x;
                m01 += y;
            }
    if (m00 == 0.0) throw NoLesionFound("empty mask");

    const double cx = m10 / m00, cy = m01 / m00;
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.get(x, y)) {
                const double dx = x - cx, dy = y - cy;
                mu20 += dx * dx;
                mu02 += dy * dy;
                mu11 += dx * dy;
            }
    mu20 /= m00;
    mu02 /= m00;
    mu11 /= m00;

    // Orientation of the ellipse of inertia. Near-isotropic shapes
    // (k-fold symmetric blobs, disks) have no meaningful axis: their
    // residual anisotropy is rasterization noise, so anything below 1%
    // of the mean moment ties to angle 0 to keep downstream axes
    // reproducible.
    const double scale = (mu20 + mu02) / 2.0;
    const double anisotropy =
        std::sqrt((mu20 - mu02) * (mu20 - mu02) / 4.0 + mu11 * mu11);
    double orientation = 0.0;
    if (scale > 0.0 && anisotropy > 0.01 * scale)
        orientation = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);

    const double common = std::sqrt(std::max(
        0.0, (mu20 - mu02) * (mu20 - mu02) / 4.0 + mu11 * mu11));
    const double lam_major = (mu20 + mu02) / 2.0 + common;
    const double lam_minor = (mu20 + mu02) / 2.0 - common;

    SegmentationResult res;
    res.area = static_cast<std::size_t>(m00);
    res.centroid = Point{cx, cy};
    res.orientation = orientation;
    res.major_axis_len = 4.0 * std::sqrt(std::max(0.0, lam_major));
    res.minor_axis_len = 4.0 * std::sqrt(std::max(0.0, lam_minor));
    res.mask = std::move(mask);
    return res;
}

SegmentationResult segment_lesion(const RasterImage& img) {
    const int w = img.width(), h = img.height();
    const GrayImage lum = luminance(img);
    const int t = otsu_threshold(lum);

    BinaryMask mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const long bin = std::clamp(std::lround(lum.at(x, y)), 0L, 255L);
            mask.set(x, y, bin <= t);
        }

    const int radius = std::max(1, std::min(w, h) / 112);
    mask = dilate_disk(erode_disk(mask, radius), radius);  // opening
    mask = erode_disk(dilate_disk(mask, radius), radius);  // closing
    mask = fill_holes(mask);

    std::vector<int> labels;
    const int n = label_components(mask, labels);
    if (n == 0) throw NoLesionFound("no foreground component after thresholding");

    std::vector<std::size_t> areas(static_cast<std::size_t>(n) + 1, 0);
    for (int l : labels)
        if (l > 0) ++areas[static_cast<std::size_t>(l)];
    int best = 1;
    for (int l = 2; l <= n; ++l)
        if (areas[static_cast<std::size_t>(l)] > areas[static_cast<std::size_t>(best)]) best = l;

    const double coverage =
        static_cast<double>(areas[static_cast<std::size_t>(best)]) /
        static_cast<double>(static_cast<std::size_t>(w) * h);
    if (coverage < 0.005 || coverage > 0.95)
        throw NoLesionFound("degenerate segmentation: lesion covers " +
                            std::to_string(coverage * 100.0) + "% of the frame");

    BinaryMask lesion(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            lesion.set(x, y, labels[static_cast<std::size_t>(y) * w + x] == best);
    return analyze_mask(std::move(lesion));
}

BinaryMask reflect_mask(const BinaryMask& mask, Point c, double axis_angle) {
    const int w = mask.width(), h = mask.height();
    const double dx = std::cos(axis_angle), dy = std::sin(axis_angle);
    BinaryMask out(w, h);
    // Reflection is an involution, so sampling each target pixel at its
    // mirror avoids the rounding holes a forward scatter would leave.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double vx = x - c.x, vy = y - c.y;
            const double proj = vx * dx + vy * dy;
            const double rx = 2.0 * proj * dx - vx;
            const double ry = 2.0 * proj * dy - vy;
            const int nx = static_cast<int>(std::lround(c.x + rx));
            const int ny = static_cast<int>(std::lround(c.y + ry));
            if (nx >= 0 && nx < w && ny >= 0 && ny < h && mask.get(nx, ny))
                out.set(x, y, true);
        }
    return out;
}

} // namespace abcdq
