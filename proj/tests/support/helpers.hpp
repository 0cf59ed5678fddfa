#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "abcdquant/synth.hpp"

namespace testing_support {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("abcdquant_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline abcdq::SynthSpec disk_spec(int canvas, double radius,
                                  abcdq::Rgb color = abcdq::Rgb{120, 80, 60}) {
    abcdq::SynthSpec spec;
    spec.canvas = canvas;
    spec.shape = abcdq::SynthShape::Disk;
    spec.radius = radius;
    spec.colors = {color};
    return spec;
}

inline abcdq::SynthSpec star_spec(int canvas, double radius, double amplitude, int lobes = 5) {
    abcdq::SynthSpec spec;
    spec.canvas = canvas;
    spec.shape = abcdq::SynthShape::StarBlob;
    spec.radius = radius;
    spec.amplitude = amplitude;
    spec.lobes = lobes;
    spec.colors = {abcdq::Rgb{120, 80, 60}};
    return spec;
}

} // namespace testing_support
