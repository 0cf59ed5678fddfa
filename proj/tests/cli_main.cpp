// End-to-end checks of the abcdquant binary: exit codes, output
// formats, golden determinism. The binary path comes from the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include <json.hpp>

#include "abcdquant/csv.hpp"
#include "abcdquant/image_io.hpp"
#include "abcdquant/synth.hpp"

#include "support/helpers.hpp"

namespace ts = testing_support;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

/// Runs the CLI with stderr routed to /dev/null unless asked otherwise.
RunResult run_cli(const std::string& args, bool keep_stderr = false) {
    const std::string cmd = std::string(ABCDQUANT_CLI_PATH) + " " + args +
                            (keep_stderr ? " 2>&1" : " 2>/dev/null");
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.out.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_disk_png(const ts::TempDir& dir, const std::string& name) {
    const std::string path = dir.file(name);
    abcdq::save_png(abcdq::render(ts::disk_spec(224, 50), 0), path);
    return path;
}

} // namespace

TEST_CASE("score emits the documented json keys") {
    ts::TempDir dir("cli_score");
    const std::string img = write_disk_png(dir, "disk.png");
    const RunResult r = run_cli("score " + img + " --p6mm 200");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"a", "b", "c", "d", "b_shape", "b_grad", "dispersion",
                            "n_colors", "max_diameter_px", "eq_diameter_px"})
        CHECK(j.contains(key));
    CHECK(j["a"].get<double>() <= 0.05);
    CHECK(j["d"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("score exits 3 on a uniform image") {
    ts::TempDir dir("cli_flat");
    const std::string img = dir.file("flat.png");
    abcdq::save_png(abcdq::RasterImage(64, 64, abcdq::Rgb{180, 140, 120}), img);
    CHECK(run_cli("score " + img).exit_code == 3);
}

TEST_CASE("unknown flags exit 2 with usage on stderr") {
    const RunResult quiet = run_cli("score x.png --bogus");
    CHECK(quiet.exit_code == 2);
    const RunResult loud = run_cli("score x.png --bogus", /*keep_stderr=*/true);
    CHECK(loud.out.find("--help") != std::string::npos);
}

TEST_CASE("missing input file exits 2") {
    CHECK(run_cli("score /nonexistent/image.png").exit_code == 2);
}

TEST_CASE("score --mask-out writes the segmentation mask") {
    ts::TempDir dir("cli_mask");
    const std::string img = write_disk_png(dir, "disk.png");
    const std::string mask = dir.file("mask.png");
    REQUIRE(run_cli("score " + img + " --p6mm 200 --mask-out " + mask).exit_code == 0);
    const abcdq::RasterImage m = abcdq::load_image(mask);
    CHECK(m.at(112, 112).r == 255);
    CHECK(m.at(5, 5).r == 0);
}

TEST_CASE("synth writes the png and a spec sidecar") {
    ts::TempDir dir("cli_synth");
    ts::spit(dir.file("spec.json"),
             R"({"canvas":128,"shape":{"kind":"star_blob","r":30,"amplitude":0.4,"lobes":5}})");
    const std::string out = dir.file("lesion.png");
    REQUIRE(run_cli("synth --spec " + dir.file("spec.json") + " --out " + out).exit_code == 0);

    const auto spec = abcdq::synth_spec_from_json(ts::slurp(dir.file("spec.json")));
    CHECK(abcdq::load_image(out) == abcdq::render(spec, 42));  // default --seed
    const auto sidecar = abcdq::synth_spec_from_json(ts::slurp(out + ".json"));
    CHECK(sidecar.radius == spec.radius);
}

TEST_CASE("simulate interpolation matches the documented example") {
    ts::TempDir dir("cli_sim");
    const std::string out = dir.file("traj.csv");
    REQUIRE(run_cli("simulate --start 0.1,0.1,0.1,0.2 --target 0.8,0.1,0.9,0.9 --steps 5 "
                    "--out " + out).exit_code == 0);
    const abcdq::CsvTable table = abcdq::read_csv(out);
    REQUIRE(table.rows.size() == 6);
    CHECK(table.header == std::vector<std::string>{"step", "a", "b", "c", "d"});
    double prev_a = -1, prev_c = -1, prev_d = -1;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double a = std::stod(table.rows[r][1]);
        const double b = std::stod(table.rows[r][2]);
        const double c = std::stod(table.rows[r][3]);
        const double d = std::stod(table.rows[r][4]);
        CHECK(a > prev_a);
        CHECK(c > prev_c);
        CHECK(d > prev_d);
        CHECK(b == doctest::Approx(0.1));
        prev_a = a;
        prev_c = c;
        prev_d = d;
    }
}

TEST_CASE("simulate --fit rolls out a fitted drift model") {
    ts::TempDir dir("cli_fit");
    // pairs from delta = 0.1 * (t - z), 4-d
    std::string pairs = "s0,s1,s2,s3,e0,e1,e2,e3\n";
    std::mt19937_64 rng(4);
    const double target[4] = {0.8, 0.1, 0.9, 0.9};
    for (int i = 0; i < 30; ++i) {
        double s[4];
        std::string row;
        for (int d = 0; d < 4; ++d) s[d] = static_cast<double>(rng() % 1000) / 1000.0;
        for (int d = 0; d < 4; ++d) row += std::to_string(s[d]) + ",";
        for (int d = 0; d < 4; ++d)
            row += std::to_string(s[d] + 0.1 * (target[d] - s[d])) + (d < 3 ? "," : "\n");
        pairs += row;
    }
    ts::spit(dir.file("pairs.csv"), pairs);

    const std::string out = dir.file("rollout.csv");
    const std::string model = dir.file("model.json");
    REQUIRE(run_cli("simulate --start 0.1,0.1,0.1,0.2 --steps 6 --fit " + dir.file("pairs.csv") +
                    " --model-out " + model + " --out " + out).exit_code == 0);
    const abcdq::CsvTable table = abcdq::read_csv(out);
    CHECK(table.rows.size() == 7);
    // the rollout contracts toward the target
    CHECK(std::stod(table.rows[6][1]) > std::stod(table.rows[0][1]));
    const auto j = nlohmann::json::parse(ts::slurp(model));
    CHECK(j["n"].get<int>() == 4);
}

TEST_CASE("pca of a linear trajectory is one-dimensional") {
    ts::TempDir dir("cli_pca");
    const std::string traj = dir.file("traj.csv");
    REQUIRE(run_cli("simulate --start 0.1,0.1,0.1,0.2 --target 0.8,0.1,0.9,0.9 --steps 5 "
                    "--out " + traj).exit_code == 0);
    const std::string out = dir.file("proj.csv");
    REQUIRE(run_cli("pca --traj " + traj + " --out " + out).exit_code == 0);
    const abcdq::CsvTable table = abcdq::read_csv(out);
    REQUIRE(table.rows.size() == 6);
    CHECK(table.header == std::vector<std::string>{"step", "pc1", "pc2"});
    for (const auto& row : table.rows)
        CHECK(std::abs(std::stod(row[2])) <= 1e-8);
}

TEST_CASE("calibrate reads max_diameter_px and fits the percentile") {
    ts::TempDir dir("cli_cal");
    std::string csv = "image_id,max_diameter_px\n";
    for (int i = 1; i <= 100; ++i)
        csv += "img" + std::to_string(i) + "," + std::to_string(10 * i) + "\n";
    ts::spit(dir.file("feret.csv"), csv);
    const RunResult r = run_cli("calibrate --labels-raw " + dir.file("feret.csv"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["p6mm_px"].get<double>() == doctest::Approx(950.5));
}

TEST_CASE("split and weights agree with the documented arithmetic") {
    ts::TempDir dir("cli_split");
    std::string metadata = "image_id,lesion_id,dx\n";
    for (int i = 0; i < 30; ++i)
        metadata += "nv" + std::to_string(i) + ",nl" + std::to_string(i) + ",nv\n";
    for (int i = 0; i < 10; ++i)
        metadata += "mel" + std::to_string(i) + ",ml" + std::to_string(i) + ",mel\n";
    ts::spit(dir.file("meta.csv"), metadata);

    const std::string split = dir.file("split.csv");
    REQUIRE(run_cli("split --metadata " + dir.file("meta.csv") + " --out " + split)
                .exit_code == 0);

    const RunResult w = run_cli("weights --metadata " + dir.file("meta.csv") +
                                " --split " + split);
    REQUIRE(w.exit_code == 0);
    const auto j = nlohmann::json::parse(w.out);
    // train counts 21/7 keep the 3:1 ratio, so weights stay 0.5/1.5
    CHECK(j["nv"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(j["mel"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("identical seeds give byte-identical outputs") {
    ts::TempDir dir("cli_golden");
    std::string metadata = "image_id,lesion_id,dx\n";
    for (int i = 0; i < 25; ++i)
        metadata += "img" + std::to_string(i) + ",l" + std::to_string(i % 9) +
                    (i % 3 == 0 ? ",mel\n" : ",nv\n");
    ts::spit(dir.file("meta.csv"), metadata);

    REQUIRE(run_cli("split --metadata " + dir.file("meta.csv") + " --seed 7 --out " +
                    dir.file("s1.csv")).exit_code == 0);
    REQUIRE(run_cli("split --metadata " + dir.file("meta.csv") + " --seed 7 --out " +
                    dir.file("s2.csv")).exit_code == 0);
    CHECK(ts::slurp(dir.file("s1.csv")) == ts::slurp(dir.file("s2.csv")));

    const std::string img = write_disk_png(dir, "disk.png");
    const RunResult a = run_cli("score " + img + " --p6mm 150");
    const RunResult b = run_cli("score " + img + " --p6mm 150");
    CHECK(a.out == b.out);
}

TEST_CASE("label-dataset batches, reports failures and stays deterministic") {
    ts::TempDir dir("cli_label");
    std::string metadata = "image_id,lesion_id,dx\n";
    for (int i = 0; i < 4; ++i) {
        const std::string id = "img" + std::to_string(i);
        metadata += id + ",l" + std::to_string(i) + ",nv\n";
        if (i == 1)
            abcdq::save_png(abcdq::RasterImage(96, 96, abcdq::Rgb{180, 140, 120}),
                            dir.file(id + ".png"));
        else
            abcdq::save_png(render(ts::disk_spec(96, 20), static_cast<std::uint64_t>(i)),
                            dir.file(id + ".png"));
    }
    ts::spit(dir.file("meta.csv"), metadata);
    ts::spit(dir.file("cal.json"), R"({"p6mm_px": 60})");

    const std::string out1 = dir.file("labels1.csv");
    REQUIRE(run_cli("label-dataset --images " + dir.path().string() + " --metadata " +
                    dir.file("meta.csv") + " --calibration " + dir.file("cal.json") +
                    " --out " + out1 + " --quiet").exit_code == 0);
    const auto rows = abcdq::parse_csv(ts::slurp(out1));
    REQUIRE(rows.rows.size() == 4);
    CHECK(rows.rows[1][5] == "failed(NoLesionFound)");
    CHECK(rows.rows[0][5] == "ok");

    const std::string out2 = dir.file("labels2.csv");
    REQUIRE(run_cli("label-dataset --images " + dir.path().string() + " --metadata " +
                    dir.file("meta.csv") + " --calibration " + dir.file("cal.json") +
                    " --out " + out2 + " --quiet").exit_code == 0);
    CHECK(ts::slurp(out1) == ts::slurp(out2));
}

TEST_CASE("evaluate produces classification and feature reports") {
    ts::TempDir dir("cli_eval");
    ts::spit(dir.file("meta.csv"),
             "image_id,lesion_id,dx\n"
             "i1,l1,mel\n"
             "i2,l2,nv\n"
             "i3,l3,nv\n"
             "i4,l4,bcc\n");
    ts::spit(dir.file("pred.csv"),
             "image_id,pred_class,score_mel\n"
             "i1,mel,0.9\n"
             "i2,nv,0.2\n"
             "i3,mel,0.6\n"
             "i4,bcc,0.1\n");
    const RunResult cls = run_cli("evaluate --task class --pred " + dir.file("pred.csv") +
                                  " --truth " + dir.file("meta.csv"));
    REQUIRE(cls.exit_code == 0);
    const auto cj = nlohmann::json::parse(cls.out);
    CHECK(cj["accuracy"].get<double>() == doctest::Approx(0.75));
    CHECK(cj["melanoma_auc"].get<double>() == doctest::Approx(1.0));

    ts::spit(dir.file("truth_feats.csv"),
             "image_id,a,b,c,d,status\n"
             "i1,0.2,0.1,0.4,0.6,ok\n"
             "i2,0.4,0.3,0.5,0.2,ok\n");
    // prediction files from external models carry no status column
    ts::spit(dir.file("pred_feats.csv"),
             "image_id,a,b,c,d\n"
             "i1,0.3,0.1,0.4,0.6\n"
             "i2,0.5,0.3,0.5,0.2\n");
    const RunResult feats = run_cli("evaluate --task features --pred " +
                                    dir.file("pred_feats.csv") + " --truth " +
                                    dir.file("truth_feats.csv") + " --metadata " +
                                    dir.file("meta.csv"));
    REQUIRE(feats.exit_code == 0);
    const auto fj = nlohmann::json::parse(feats.out);
    CHECK(fj["per_feature"]["a"]["mae"].get<double>() == doctest::Approx(0.1));
    CHECK(fj["per_class_mae"]["mel"]["a"].get<double>() == doctest::Approx(0.1));

    CHECK(run_cli("evaluate --task bogus --pred x --truth y").exit_code == 2);
}
