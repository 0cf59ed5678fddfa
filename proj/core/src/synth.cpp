#include "abcdquant/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

namespace abcdq {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

RasterImage gaussian_blur(const RasterImage& img, double sigma) {
    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        kernel[static_cast<std::size_t>(i + half)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i + half)];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width(), h = img.height();
    std::vector<double> plane(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const Rgb p = img.at(x, y);
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            plane[i] = p.r;
            plane[i + 1] = p.g;
            plane[i + 2] = p.b;
        }

    auto pass = [&](const std::vector<double>& src, bool horizontal) {
        std::vector<double> dst(src.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) {
                    double acc = 0.0;
                    for (int k = -half; k <= half; ++k) {
                        int sx = x, sy = y;
                        if (horizontal)
                            sx = std::clamp(x + k, 0, w - 1);
                        else
                            sy = std::clamp(y + k, 0, h - 1);
                        acc += kernel[static_cast<std::size_t>(k + half)] *
                               src[(static_cast<std::size_t>(sy) * w + sx) * 3 + c];
                    }
                    dst[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
                }
        return dst;
    };
    plane = pass(plane, true);
    plane = pass(plane, false);

    RasterImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 3;
            out.at(x, y) = Rgb{to_byte(plane[i]), to_byte(plane[i + 1]), to_byte(plane[i + 2])};
        }
    return out;
}

} // namespace

void validate_spec(const SynthSpec& spec) {
    if (spec.canvas < kMinImageDim)
        throw InvalidInput("synth: canvas must be at least 8");
    if (!(spec.radius > 0.0) || spec.radius >= spec.canvas / 2.0)
        throw InvalidInput("synth: radius must satisfy 0 < r < canvas/2");
    if (spec.shape == SynthShape::StarBlob) {
        if (spec.amplitude < 0.0 || spec.amplitude > 1.0)
            throw InvalidInput("synth: amplitude must be in [0, 1]");
        if (spec.lobes < 3) throw InvalidInput("synth: star_blob needs at least 3 lobes");
    }
    if (spec.colors.empty() || spec.colors.size() > 6)
        throw InvalidInput("synth: between 1 and 6 fill colors required");
    if (spec.edge_blur_sigma < 0.0)
        throw InvalidInput("synth: edge_blur_sigma must be >= 0");
}

RasterImage render(const SynthSpec& spec, std::uint64_t seed) {
    validate_spec(spec);

    std::mt19937_64 rng(seed);
    const double phase =
        spec.shape == SynthShape::StarBlob
            ? std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng)
            : 0.0;

    const int n = spec.canvas;
    const double cx = n / 2.0, cy = n / 2.0;
    RasterImage img(n, n, spec.background);

    const std::size_t sectors = spec.colors.size();
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double rr = std::sqrt(dx * dx + dy * dy);
            double boundary = spec.radius;
            bool inside = false;
            switch (spec.shape) {
                case SynthShape::Disk:
                    inside = rr <= boundary;
                    break;
                case SynthShape::HalfDisk:
                    inside = rr <= boundary && dy <= 0.0;
                    break;
                case SynthShape::StarBlob: {
                    const double theta = std::atan2(dy, dx);
                    boundary = spec.radius *
                               (1.0 + spec.amplitude * std::sin(spec.lobes * theta + phase));
                    inside = rr <= boundary;
                    break;
                }
            }
            if (!inside) continue;

            // Sector 0 starts at 12 o'clock and runs clockwise, so two
            // colors split the shape into left and right halves.
            double ang = std::atan2(dx, -dy);
            if (ang < 0.0) ang += 2.0 * M_PI;
            std::size_t sector = static_cast<std::size_t>(ang / (2.0 * M_PI) *
                                                          static_cast<double>(sectors));
            sector = std::min(sector, sectors - 1);
            img.at(x, y) = spec.colors[sector];
        }

    if (spec.edge_blur_sigma > 0.0) return gaussian_blur(img, spec.edge_blur_sigma);
    return img;
}

namespace {

const char* shape_name(SynthShape s) {
    switch (s) {
        case SynthShape::Disk: return "disk";
        case SynthShape::HalfDisk: return "half_disk";
        case SynthShape::StarBlob: return "star_blob";
    }
    return "disk";
}

Rgb rgb_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidInput("synth spec: color must be a [r, g, b] triple");
    return Rgb{static_cast<std::uint8_t>(j[0].get<int>()),
               static_cast<std::uint8_t>(j[1].get<int>()),
               static_cast<std::uint8_t>(j[2].get<int>())};
}

} // namespace

SynthSpec synth_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("synth spec: invalid JSON: ") + e.what());
    }
    try {
        SynthSpec spec;
        spec.canvas = j.at("canvas").get<int>();
        const auto& shape = j.at("shape");
        const std::string kind = shape.at("kind").get<std::string>();
        if (kind == "disk")
            spec.shape = SynthShape::Disk;
        else if (kind == "half_disk")
            spec.shape = SynthShape::HalfDisk;
        else if (kind == "star_blob")
            spec.shape = SynthShape::StarBlob;
        else
            throw InvalidInput("synth spec: unknown shape kind '" + kind + "'");
        spec.radius = shape.at("r").get<double>();
        if (spec.shape == SynthShape::StarBlob) {
            spec.amplitude = shape.at("amplitude").get<double>();
            spec.lobes = shape.at("lobes").get<int>();
        }
        if (j.contains("colors")) {
            spec.colors.clear();
            for (const auto& c : j["colors"]) spec.colors.push_back(rgb_from_json(c));
        }
        if (j.contains("edge_blur_sigma"))
            spec.edge_blur_sigma = j["edge_blur_sigma"].get<double>();
        if (j.contains("background")) spec.background = rgb_from_json(j["background"]);
        validate_spec(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("synth spec: ") + e.what());
    }
}

std::string synth_spec_to_json(const SynthSpec& spec) {
    nlohmann::ordered_json shape;
    shape["kind"] = shape_name(spec.shape);
    shape["r"] = spec.radius;
    if (spec.shape == SynthShape::StarBlob) {
        shape["amplitude"] = spec.amplitude;
        shape["lobes"] = spec.lobes;
    }
    nlohmann::ordered_json j;
    j["canvas"] = spec.canvas;
    j["shape"] = shape;
    auto colors = nlohmann::ordered_json::array();
    for (const Rgb& c : spec.colors) colors.push_back({c.r, c.g, c.b});
    j["colors"] = colors;
    j["edge_blur_sigma"] = spec.edge_blur_sigma;
    j["background"] = {spec.background.r, spec.background.g, spec.background.b};
    return j.dump(2) + "\n";
}

} // namespace abcdq
