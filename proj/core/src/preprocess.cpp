#include "abcdquant/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "abcdquant/segmentation.hpp"

namespace abcdq {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

GrayImage gray_dilate_disk(const GrayImage& g, int radius) {
    const int w = g.width(), h = g.height();
    GrayImage out(w, h);
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = -1.0;
            for (auto [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                best = std::max(best, g.at(nx, ny));
            }
            out.at(x, y) = best;
        }
    return out;
}

GrayImage gray_erode_disk(const GrayImage& g, int radius) {
    const int w = g.width(), h = g.height();
    GrayImage out(w, h);
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offs.emplace_back(dx, dy);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double best = 1e18;
            for (auto [dx, dy] : offs) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                best = std::min(best, g.at(nx, ny));
            }
            out.at(x, y) = best;
        }
    return out;
}

constexpr int kHairSeRadius = 4;          // disk diameter 9
constexpr double kHairResponse = 30.0;    // bottom-hat threshold
constexpr int kHairMaxHalfWidth = 4;      // 2*halfwidth - 1 <= 7 px
constexpr int kHairMinElongation = 12;    // pixels >= 12 * halfwidth^2

} // namespace

RasterImage resize_image(const RasterImage& img, int target_w, int target_h) {
    RasterImage::check_dims(target_w, target_h);
    if (target_w == img.width() && target_h == img.height()) return img;

    RasterImage out(target_w, target_h);
    const double sx = static_cast<double>(img.width()) / target_w;
    const double sy = static_cast<double>(img.height()) / target_h;
    for (int y = 0; y < target_h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < target_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = fx - x0;

            const Rgb p00 = img.at(x0, y0), p10 = img.at(x1, y0);
            const Rgb p01 = img.at(x0, y1), p11 = img.at(x1, y1);
            auto lerp2 = [&](auto get) {
                const double top = (1.0 - wx) * get(p00) + wx * get(p10);
                const double bot = (1.0 - wx) * get(p01) + wx * get(p11);
                return (1.0 - wy) * top + wy * bot;
            };
            out.at(x, y) = Rgb{to_byte(lerp2([](Rgb p) { return double(p.r); })),
                               to_byte(lerp2([](Rgb p) { return double(p.g); })),
                               to_byte(lerp2([](Rgb p) { return double(p.b); }))};
        }
    }
    return out;
}

RasterImage remove_hair(const RasterImage& img) {
    const int w = img.width(), h = img.height();
    const GrayImage lum = luminance(img);

    // Bottom-hat: closing minus original responds to dark structures
    // narrower than the structuring element.
    const GrayImage closing = gray_erode_disk(gray_dilate_disk(lum, kHairSeRadius), kHairSeRadius);
    BinaryMask candidates(w, h);
    bool any = false;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const bool hit = closing.at(x, y) - lum.at(x, y) > kHairResponse;
            candidates.set(x, y, hit);
            any = any || hit;
        }
    if (!any) return img;

    // City-block distance to the nearest non-candidate pixel, for the
    // per-component width estimate.
    std::vector<int> dist(static_cast<std::size_t>(w) * h, -1);
    std::queue<std::pair<int, int>> q;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!candidates.get(x, y)) {
                dist[static_cast<std::size_t>(y) * w + x] = 0;
                q.emplace(x, y);
            }
    while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        const int d = dist[static_cast<std::size_t>(cy) * w + cx];
        constexpr int dx4[4] = {1, -1, 0, 0};
        constexpr int dy4[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = cx + dx4[k], ny = cy + dy4[k];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            auto& dn = dist[static_cast<std::size_t>(ny) * w + nx];
            if (dn < 0) {
                dn = d + 1;
                q.emplace(nx, ny);
            }
        }
    }

    // 8-connected candidate components; keep thin elongated ones.
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    BinaryMask hair(w, h);
    int next = 0;
    std::vector<std::pair<int, int>> comp;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!candidates.get(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0)
                continue;
            ++next;
            comp.clear();
            comp.emplace_back(x, y);
            labels[static_cast<std::size_t>(y) * w + x] = next;
            for (std::size_t head = 0; head < comp.size(); ++head) {
                auto [cx, cy] = comp[head];
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        auto& l = labels[static_cast<std::size_t>(ny) * w + nx];
                        if (candidates.get(nx, ny) && l == 0) {
                            l = next;
                            comp.emplace_back(nx, ny);
                        }
                    }
            }
            int half_width = 0;
            for (auto [px, py] : comp)
                half_width = std::max(half_width, dist[static_cast<std::size_t>(py) * w + px]);
            const bool thin = half_width <= kHairMaxHalfWidth;
            const bool elongated =
                comp.size() >= static_cast<std::size_t>(kHairMinElongation) *
                                   static_cast<std::size_t>(half_width) * half_width;
            if (thin && elongated)
                for (auto [px, py] : comp) hair.set(px, py, true);
        }

    if (hair.area() == 0) return img;

    // Onion-peel inpainting: each pass replaces hair pixels that touch
    // non-hair with the mean of their non-hair 8-neighbors.
    RasterImage out = img;
    BinaryMask remaining = hair;
    while (remaining.area() > 0) {
        std::vector<std::pair<int, int>> layer;
        std::vector<Rgb> fill;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!remaining.get(x, y)) continue;
                double sr = 0, sg = 0, sb = 0;
                int cnt = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if ((dx == 0 && dy == 0) || nx < 0 || nx >= w || ny < 0 || ny >= h)
                            continue;
                        if (remaining.get(nx, ny)) continue;
                        const Rgb p = out.at(nx, ny);
                        sr += p.r;
                        sg += p.g;
                        sb += p.b;
                        ++cnt;
                    }
                if (cnt > 0) {
                    layer.emplace_back(x, y);
                    fill.push_back(Rgb{to_byte(sr / cnt), to_byte(sg / cnt), to_byte(sb / cnt)});
                }
            }
        if (layer.empty()) break;  // fully hair-covered frame cannot happen past detection
        for (std::size_t i = 0; i < layer.size(); ++i) {
            out.at(layer[i].first, layer[i].second) = fill[i];
            remaining.set(layer[i].first, layer[i].second, false);
        }
    }
    return out;
}

RasterImage normalize_colors(const RasterImage& img, const BinaryMask& background_mask) {
    if (background_mask.width() != img.width() || background_mask.height() != img.height())
        throw InvalidInput("normalize_colors: mask dimension mismatch");
    const std::size_t bg = background_mask.area();
    if (bg * 100 < img.pixel_count())
        throw InvalidInput("normalize_colors: background mask below 1% of the frame");

    double mr = 0, mg = 0, mb = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            if (!background_mask.get(x, y)) continue;
            const Rgb p = img.at(x, y);
            mr += p.r;
            mg += p.g;
            mb += p.b;
        }
    mr /= static_cast<double>(bg);
    mg /= static_cast<double>(bg);
    mb /= static_cast<double>(bg);

    auto gain = [](double ref, double mean) {
        const double g = mean > 0.0 ? ref / mean : kGainClampHigh;
        return std::clamp(g, kGainClampLow, kGainClampHigh);
    };
    const double gr = gain(kReferenceBackground.r, mr);
    const double gg = gain(kReferenceBackground.g, mg);
    const double gb = gain(kReferenceBackground.b, mb);

    RasterImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img.at(x, y);
            out.at(x, y) = Rgb{to_byte(p.r * gr), to_byte(p.g * gg), to_byte(p.b * gb)};
        }
    return out;
}

} // namespace abcdq
