// Acceptance suite: ten go/no-go checks run end to end against the
// library and the CLI binary, one PASS/FAIL line each. The process
// exits with the number of failed checks.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "abcdquant/dataset.hpp"
#include "abcdquant/evolution.hpp"
#include "abcdquant/features.hpp"
#include "abcdquant/image_io.hpp"
#include "abcdquant/metrics.hpp"
#include "abcdquant/segmentation.hpp"
#include "abcdquant/synth.hpp"

#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace abcdq;
namespace ts = testing_support;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  %2d. %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// 1. Fifty seeded uniform disks: A, b_shape, C all <= 0.05 every time,
//    inside a 10 s budget.
void criterion_symmetry() {
    const auto start = std::chrono::steady_clock::now();
    double max_a = 0.0, max_bshape = 0.0, max_c = 0.0;
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SynthSpec spec;
        spec.canvas = 224;
        spec.shape = SynthShape::Disk;
        spec.radius = 30.0 + static_cast<double>(seed % 40);
        spec.colors = {Rgb{static_cast<std::uint8_t>(60 + 2 * (seed % 30)),
                           static_cast<std::uint8_t>(40 + (seed % 25)),
                           static_cast<std::uint8_t>(30 + (seed % 20))}};
        const RasterImage img = render(spec, seed);
        const LesionScore s = score_lesion(img, CalibrationParams{150.0}, seed);
        max_a = std::max(max_a, s.scores.a);
        max_bshape = std::max(max_bshape, s.border.b_shape);
        max_c = std::max(max_c, s.scores.c);
        ok = ok && s.scores.a <= 0.05 && s.border.b_shape <= 0.05 && s.scores.c <= 0.05;
    }
    const double secs = elapsed_s(start);
    ok = ok && secs < 10.0;
    report(1, "synthetic symmetry suite",
           ok, fmt("50 disks: max A=%.4f, max b_shape=%.4f, max C=%.4f, %.1fs", max_a,
                   max_bshape, max_c, secs));
}

// 2. Star-blob amplitude sweep 0.0..0.9: Spearman(amplitude, A) and
//    Spearman(amplitude, b_shape) both >= 0.9.
void criterion_monotone() {
    std::vector<double> amplitudes, a_scores, b_shapes;
    for (int i = 0; i < 10; ++i) {
        const double amp = 0.1 * i;
        const RasterImage img = render(ts::star_spec(224, 50, amp), 3);
        const SegmentationResult seg = segment_lesion(img);
        amplitudes.push_back(amp);
        a_scores.push_back(asymmetry_score(img, seg));
        b_shapes.push_back(border_score(img, seg).b_shape);
    }
    const double rho_a = oracle::spearman(amplitudes, a_scores);
    const double rho_b = oracle::spearman(amplitudes, b_shapes);
    report(2, "monotone irregularity suite", rho_a >= 0.9 && rho_b >= 0.9,
           fmt("Spearman amplitude vs A = %.3f, vs b_shape = %.3f", rho_a, rho_b));
}

// 3. b == 0.5*b_shape + 0.5*(1 - b_grad) to machine precision over 200
//    fuzzed lesions.
void criterion_border_identity() {
    std::mt19937_64 rng(77);
    int checked = 0;
    bool exact = true;
    while (checked < 200) {
        SynthSpec spec;
        spec.canvas = 160;
        spec.shape = SynthShape::StarBlob;
        spec.radius = 20.0 + static_cast<double>(rng() % 30);
        spec.amplitude = static_cast<double>(rng() % 85) / 100.0;
        spec.lobes = 3 + static_cast<int>(rng() % 6);
        spec.colors = {Rgb{static_cast<std::uint8_t>(40 + rng() % 80),
                           static_cast<std::uint8_t>(30 + rng() % 60),
                           static_cast<std::uint8_t>(20 + rng() % 40)}};
        spec.edge_blur_sigma = static_cast<double>(rng() % 30) / 10.0;
        const RasterImage img = render(spec, rng());
        SegmentationResult seg;
        try {
            seg = segment_lesion(img);
        } catch (const NoLesionFound&) {
            continue;
        }
        const BorderBreakdown bd = border_score(img, seg);
        exact = exact && bd.b == 0.5 * bd.b_shape + 0.5 * (1.0 - bd.b_grad);
        ++checked;
    }
    report(3, "border formula exactness", exact, fmt("%d fuzz cases, bit-exact", checked));
}

// 4. Flat-color point masses: two colors -> C = 0.10 +- 0.02, four
//    colors -> C = 0.30 +- 0.02.
void criterion_color_point_mass() {
    SynthSpec two = ts::disk_spec(224, 60);
    two.colors = {Rgb{90, 60, 40}, Rgb{30, 20, 10}};
    const LesionScore s2 = score_lesion(render(two, 0), CalibrationParams{150.0}, 42);

    SynthSpec four = ts::disk_spec(224, 60);
    four.colors = {Rgb{90, 60, 40}, Rgb{30, 20, 10}, Rgb{120, 70, 50}, Rgb{60, 90, 80}};
    const LesionScore s4 = score_lesion(render(four, 0), CalibrationParams{150.0}, 42);

    const bool ok = std::abs(s2.scores.c - 0.10) <= 0.02 && std::abs(s4.scores.c - 0.30) <= 0.02;
    report(4, "color point-mass oracle", ok,
           fmt("two colors C=%.4f (want 0.10+-0.02), four colors C=%.4f (want 0.30+-0.02)",
               s2.scores.c, s4.scores.c));
}

// 5. 30x40 rectangle Feret = 50 +- 0.5 against the all-pairs oracle;
//    calibration over {10..1000} hits 950.5 +- 0.5 with exactly the top
//    5% of lesions clamped to D = 1 (everything in the top 5% >= 0.95).
void criterion_diameter() {
    BinaryMask mask(128, 128);
    for (int y = 30; y < 70; ++y)
        for (int x = 20; x < 50; ++x) mask.set(x, y, true);
    const SegmentationResult seg = analyze_mask(mask);
    const DiameterResult dr = diameter_score(seg, CalibrationParams{100.0});
    const double brute = oracle::all_pairs_feret(mask);

    std::vector<double> diameters;
    for (int i = 1; i <= 100; ++i) diameters.push_back(10.0 * i);
    const CalibrationParams cal = calibrate_p6mm(diameters);

    int clamped = 0;
    bool top5_above = true;
    for (double d : diameters) {
        const double score = std::clamp(d / cal.p6mm_px, 0.0, 1.0);
        if (score >= 1.0) ++clamped;
        if (d >= 960.0 && score < 0.95) top5_above = false;
    }
    const bool ok = std::abs(dr.max_diameter_px - 50.0) <= 0.5 &&
                    std::abs(brute - dr.max_diameter_px) <= 1e-9 &&
                    std::abs(cal.p6mm_px - 950.5) <= 0.5 && clamped == 5 && top5_above;
    report(5, "diameter oracle", ok,
           fmt("rect Feret=%.3f (oracle %.3f), p6mm=%.2f, %d lesions at D=1.0", dr.max_diameter_px,
               brute, cal.p6mm_px, clamped));
}

// 6. 100-lesion two-class metadata splits exactly 70/10/20 per class;
//    weights for counts {30, 10} are exactly {0.5, 1.5}.
void criterion_split_weights() {
    std::string metadata = "image_id,lesion_id,dx\n";
    for (int i = 0; i < 60; ++i)
        metadata += "nv" + std::to_string(i) + ",nl" + std::to_string(i) + ",nv\n";
    for (int i = 0; i < 40; ++i)
        metadata += "mel" + std::to_string(i) + ",ml" + std::to_string(i) + ",mel\n";
    const auto records = split_dataset(parse_metadata(metadata), 42);

    std::array<std::array<int, 3>, 2> counts{};
    for (const auto& r : records) {
        const int cls = r.diagnosis == Diagnosis::nv ? 0 : 1;
        const int split = r.split == Split::Train ? 0 : (r.split == Split::Val ? 1 : 2);
        ++counts[cls][split];
    }
    const bool split_ok =
        std::abs(counts[0][0] - 42) <= 1 && std::abs(counts[0][1] - 6) <= 1 &&
        std::abs(counts[0][2] - 12) <= 1 && std::abs(counts[1][0] - 28) <= 1 &&
        std::abs(counts[1][1] - 4) <= 1 && std::abs(counts[1][2] - 8) <= 1;

    std::string wmeta = "image_id,lesion_id,dx\n";
    for (int i = 0; i < 30; ++i)
        wmeta += "a" + std::to_string(i) + ",al" + std::to_string(i) + ",nv\n";
    for (int i = 0; i < 10; ++i)
        wmeta += "b" + std::to_string(i) + ",bl" + std::to_string(i) + ",mel\n";
    auto wrecords = parse_metadata(wmeta);
    for (auto& r : wrecords) r.split = Split::Train;
    const auto weights = class_weights(wrecords);
    const bool weights_ok = std::abs(weights.at(Diagnosis::nv) - 0.5) <= 1e-12 &&
                            std::abs(weights.at(Diagnosis::mel) - 1.5) <= 1e-12;

    report(6, "split and weights arithmetic", split_ok && weights_ok,
           fmt("nv %d/%d/%d, mel %d/%d/%d; weights {%.12g, %.12g}", counts[0][0], counts[0][1],
               counts[0][2], counts[1][0], counts[1][1], counts[1][2],
               weights.at(Diagnosis::nv), weights.at(Diagnosis::mel)));
}

// 7. AUC pair counting vs trapezoid within 1e-12 on 100 random
//    instances; pearson((1,2,3),(1,2,4)) = 0.98198 +- 1e-5;
//    uniform-probability combined loss = ln 7 +- 1e-9.
void criterion_metric_oracles() {
    std::mt19937_64 rng(123);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 999;
        std::vector<int> truth(n);
        std::vector<double> scores(n);
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng() % 2);
            scores[i] = static_cast<double>(rng() % 23) / 22.0;  // ties guaranteed
            (truth[i] ? pos : neg) = true;
        }
        if (!pos) truth[0] = 1;
        if (!neg) truth[n - 1] = 0;
        const RocResult roc = roc_auc(truth, scores);
        std::vector<std::pair<double, double>> curve;
        for (const RocPoint& p : roc.curve) curve.emplace_back(p.fpr, p.tpr);
        worst = std::max(worst, std::abs(roc.auc - oracle::auc_trapezoid(curve)));
        worst = std::max(worst, std::abs(roc.auc - oracle::auc_pair_counting(truth, scores)));
    }

    const double r = pearson({1, 2, 3}, {1, 2, 4});
    std::array<double, kClassCount> uniform;
    uniform.fill(1.0 / 7.0);
    const std::array<double, 4> feats{0.2, 0.4, 0.6, 0.8};
    const double loss = combined_loss(uniform, Diagnosis::bkl, feats, feats, LossWeights{1.0});

    const bool ok = worst <= 1e-12 && std::abs(r - 0.98198) <= 1e-5 &&
                    std::abs(loss - std::log(7.0)) <= 1e-9;
    report(7, "metric oracles", ok,
           fmt("AUC route gap %.2e, pearson=%.6f, uniform loss=%.9f (ln7=%.9f)", worst, r, loss,
               std::log(7.0)));
}

// 8. fit_drift on 50 contraction pairs recovers W = -0.1 I and
//    bias = 0.1 t within 1e-6; after 6 rollout steps the remaining
//    distance is 0.9^6 of the initial one within 1e-6.
void criterion_drift() {
    const FeatureVector target{0.8, 0.1, 0.9, 0.9};
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::pair<FeatureVector, FeatureVector>> pairs;
    for (int i = 0; i < 50; ++i) {
        FeatureVector s(4), e(4);
        for (int d = 0; d < 4; ++d) {
            s[d] = uniform(rng);
            e[d] = s[d] + 0.1 * (target[d] - s[d]);
        }
        pairs.emplace_back(std::move(s), std::move(e));
    }
    const DriftModel model = fit_drift(pairs);

    double w_err = 0.0, b_err = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j)
            w_err = std::max(w_err, std::abs(model.w[i * 4 + j] - (i == j ? -0.1 : 0.0)));
        b_err = std::max(b_err, std::abs(model.bias[i] - 0.1 * target[i]));
    }

    const FeatureVector z0{0.1, 0.1, 0.1, 0.2};
    const FeatureTrajectory traj = rollout(model, z0, 6);
    auto dist = [&](const FeatureVector& z) {
        double s = 0.0;
        for (int d = 0; d < 4; ++d) s += (z[d] - target[d]) * (z[d] - target[d]);
        return std::sqrt(s);
    };
    const double roll_err = std::abs(dist(traj.steps.back()) - std::pow(0.9, 6) * dist(z0));

    const bool ok = w_err <= 1e-6 && b_err <= 1e-6 && roll_err <= 1e-6;
    report(8, "drift recovery", ok,
           fmt("max |W err|=%.2e, max |bias err|=%.2e, rollout err=%.2e", w_err, b_err,
               roll_err));
}

// 9. Interpolated trajectory from (0.1,0.1,0.1,0.2) to (0.8,0.1,0.9,0.9)
//    with K = 5: strictly increasing A, C, D; B constant.
void criterion_trajectory_shape() {
    const FeatureTrajectory traj =
        abcd_trajectory(AbcdScores{0.1, 0.1, 0.1, 0.2}, AbcdScores{0.8, 0.1, 0.9, 0.9}, 5);
    bool ok = traj.steps.size() == 6;
    for (std::size_t s = 1; ok && s < traj.steps.size(); ++s) {
        ok = traj.steps[s][0] > traj.steps[s - 1][0] &&
             traj.steps[s][1] == traj.steps[s - 1][1] &&
             traj.steps[s][2] > traj.steps[s - 1][2] &&
             traj.steps[s][3] > traj.steps[s - 1][3];
    }
    report(9, "trajectory shape (flat B, rising A/C/D)", ok,
           fmt("%zu steps, B fixed at %.2f", traj.steps.size() - 1, traj.steps[0][1]));
}

// 10. score_lesion on 224x224 under 100 ms single-threaded; the CLI
//     labels 1000 synthetic images in under 2 minutes per run with
//     byte-identical output across two runs.
void criterion_performance() {
    SynthSpec spec = ts::star_spec(224, 50, 0.4);
    spec.colors = {Rgb{90, 60, 40}, Rgb{50, 30, 20}, Rgb{130, 90, 60}};
    spec.edge_blur_sigma = 2.0;
    const RasterImage img = render(spec, 6);
    score_lesion(img, CalibrationParams{150.0}, 42);  // warm-up
    double best_ms = 1e18;
    for (int rep = 0; rep < 5; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        score_lesion(img, CalibrationParams{150.0}, 42);
        best_ms = std::min(best_ms, elapsed_s(t0) * 1000.0);
    }

    ts::TempDir dir("acceptance_label");
    std::string metadata = "image_id,lesion_id,dx\n";
    std::mt19937_64 rng(9001);
    for (int i = 0; i < 1000; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "syn%04d", i);
        metadata += std::string(id) + ",l" + std::to_string(i) + ",nv\n";
        SynthSpec s;
        s.canvas = 192;
        s.shape = i % 2 == 0 ? SynthShape::Disk : SynthShape::StarBlob;
        s.radius = 25.0 + static_cast<double>(rng() % 30);
        s.amplitude = static_cast<double>(rng() % 60) / 100.0;
        s.lobes = 5;
        s.colors = {Rgb{static_cast<std::uint8_t>(50 + rng() % 80),
                        static_cast<std::uint8_t>(35 + rng() % 55),
                        static_cast<std::uint8_t>(25 + rng() % 35)}};
        save_png(render(s, static_cast<std::uint64_t>(i)), dir.file(std::string(id) + ".png"));
    }
    ts::spit(dir.file("meta.csv"), metadata);
    ts::spit(dir.file("cal.json"), R"({"p6mm_px": 100})");

    auto run_label = [&](const std::string& out) {
        const std::string cmd = std::string(ABCDQUANT_CLI_PATH) + " label-dataset --images " +
                                dir.path().string() + " --metadata " + dir.file("meta.csv") +
                                " --calibration " + dir.file("cal.json") + " --out " +
                                dir.file(out) + " --quiet 2>/dev/null";
        const auto t0 = std::chrono::steady_clock::now();
        const int rc = std::system(cmd.c_str());
        return std::pair<double, int>{elapsed_s(t0), rc};
    };
    const auto [secs1, rc1] = run_label("labels1.csv");
    const auto [secs2, rc2] = run_label("labels2.csv");
    const bool identical = ts::slurp(dir.file("labels1.csv")) ==
                           ts::slurp(dir.file("labels2.csv")) &&
                           !ts::slurp(dir.file("labels1.csv")).empty();

    const bool ok = best_ms < 100.0 && rc1 == 0 && rc2 == 0 && secs1 < 120.0 &&
                    secs2 < 120.0 && identical;
    report(10, "performance and determinism", ok,
           fmt("score 224x224: %.1f ms; 1000-image label runs: %.1fs / %.1fs, outputs %s",
               best_ms, secs1, secs2, identical ? "identical" : "DIFFER"));
}

} // namespace

int main() {
    std::printf("abcdquant acceptance suite\n");
    const struct {
        int number;
        const char* name;
        void (*run)();
    } criteria[] = {
        {1, "synthetic symmetry suite", criterion_symmetry},
        {2, "monotone irregularity suite", criterion_monotone},
        {3, "border formula exactness", criterion_border_identity},
        {4, "color point-mass oracle", criterion_color_point_mass},
        {5, "diameter oracle", criterion_diameter},
        {6, "split and weights arithmetic", criterion_split_weights},
        {7, "metric oracles", criterion_metric_oracles},
        {8, "drift recovery", criterion_drift},
        {9, "trajectory shape (flat B, rising A/C/D)", criterion_trajectory_shape},
        {10, "performance and determinism", criterion_performance},
    };
    for (const auto& c : criteria) {
        try {
            c.run();
        } catch (const std::exception& e) {
            report(c.number, c.name, false, std::string("threw: ") + e.what());
        }
    }
    if (g_failures == 0)
        std::printf("all 10 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
