#include <benchmark/benchmark.h>

#include <random>

#include "abcdquant/evolution.hpp"
#include "abcdquant/features.hpp"
#include "abcdquant/metrics.hpp"
#include "abcdquant/preprocess.hpp"
#include "abcdquant/segmentation.hpp"
#include "abcdquant/synth.hpp"

namespace {

abcdq::RasterImage bench_scene(int canvas) {
    abcdq::SynthSpec spec;
    spec.canvas = canvas;
    spec.shape = abcdq::SynthShape::StarBlob;
    spec.radius = canvas * 0.22;
    spec.amplitude = 0.4;
    spec.lobes = 5;
    spec.colors = {abcdq::Rgb{90, 60, 40}, abcdq::Rgb{50, 30, 20}, abcdq::Rgb{130, 90, 60}};
    spec.edge_blur_sigma = 2.0;
    return abcdq::render(spec, 6);
}

void BM_ScoreLesion(benchmark::State& state) {
    const auto img = bench_scene(static_cast<int>(state.range(0)));
    const abcdq::CalibrationParams cal{150.0};
    for (auto _ : state) {
        auto score = abcdq::score_lesion(img, cal, 42);
        benchmark::DoNotOptimize(score);
    }
}
BENCHMARK(BM_ScoreLesion)->Arg(224)->Arg(448)->Unit(benchmark::kMillisecond);

void BM_SegmentLesion(benchmark::State& state) {
    const auto img = bench_scene(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto seg = abcdq::segment_lesion(img);
        benchmark::DoNotOptimize(seg);
    }
}
BENCHMARK(BM_SegmentLesion)->Arg(224)->Arg(448)->Unit(benchmark::kMillisecond);

void BM_RemoveHair(benchmark::State& state) {
    const auto img = bench_scene(224);
    for (auto _ : state) {
        auto out = abcdq::remove_hair(img);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_RemoveHair)->Unit(benchmark::kMillisecond);

void BM_ColorScore(benchmark::State& state) {
    const auto img = bench_scene(224);
    const auto seg = abcdq::segment_lesion(img);
    for (auto _ : state) {
        auto color = abcdq::color_score(img, seg, 42);
        benchmark::DoNotOptimize(color);
    }
}
BENCHMARK(BM_ColorScore)->Unit(benchmark::kMillisecond);

void BM_AsymmetryScore(benchmark::State& state) {
    const auto img = bench_scene(224);
    const auto seg = abcdq::segment_lesion(img);
    for (auto _ : state) {
        auto a = abcdq::asymmetry_score(img, seg);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_AsymmetryScore)->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<int> truth(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth[i] = static_cast<int>(rng() % 2);
        scores[i] = static_cast<double>(rng() % 1000) / 1000.0;
    }
    truth[0] = 1;
    truth[n - 1] = 0;
    for (auto _ : state) {
        auto roc = abcdq::roc_auc(truth, scores);
        benchmark::DoNotOptimize(roc);
    }
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(10000);

void BM_FitDrift(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::pair<abcdq::FeatureVector, abcdq::FeatureVector>> pairs;
    const abcdq::FeatureVector target{0.8, 0.1, 0.9, 0.9};
    for (int i = 0; i < 200; ++i) {
        abcdq::FeatureVector s(4), e(4);
        for (int d = 0; d < 4; ++d) {
            s[d] = uniform(rng);
            e[d] = s[d] + 0.1 * (target[d] - s[d]);
        }
        pairs.emplace_back(std::move(s), std::move(e));
    }
    for (auto _ : state) {
        auto model = abcdq::fit_drift(pairs);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitDrift);

} // namespace

BENCHMARK_MAIN();
