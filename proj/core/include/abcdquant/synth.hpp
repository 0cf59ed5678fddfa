#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abcdquant/image.hpp"

namespace abcdq {

enum class SynthShape { Disk, HalfDisk, StarBlob };

/// Parametric lesion scene: one shape centered on a square canvas,
/// 1..6 fill colors laid out in equal angular sectors, optional
/// Gaussian edge blur.
struct SynthSpec {
    int canvas = 224;
    SynthShape shape = SynthShape::Disk;
    double radius = 50.0;          // base radius r, must satisfy r < canvas/2
    double amplitude = 0.0;        // star_blob radial modulation, in [0, 1]
    int lobes = 5;                 // star_blob lobe count, >= 3
    std::vector<Rgb> colors{Rgb{120, 80, 60}};
    double edge_blur_sigma = 0.0;  // pixels
    Rgb background{200, 160, 140};
};

/// Deterministic render. The star boundary is
/// r * (1 + amplitude * sin(lobes * theta + phase(seed))); the phase is
/// the only seed-dependent quantity.
RasterImage render(const SynthSpec& spec, std::uint64_t seed);

/// Validates the invariants listed on SynthSpec; throws InvalidInput.
void validate_spec(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const std::string& json_text);
std::string synth_spec_to_json(const SynthSpec& spec);

} // namespace abcdq
