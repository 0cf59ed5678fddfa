// abcdquant: lesion scoring, dataset labeling, evolution simulation and
// evaluation in one scriptable binary. Machine output goes to --out (or
// stdout); diagnostics go to stderr. Exit codes: 0 success, 2 input or
// parse error, 3 no scoreable lesion, 4 numeric failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abcdquant/csv.hpp"
#include "abcdquant/dataset.hpp"
#include "abcdquant/error.hpp"
#include "abcdquant/evolution.hpp"
#include "abcdquant/features.hpp"
#include "abcdquant/image_io.hpp"
#include "abcdquant/metrics.hpp"
#include "abcdquant/preprocess.hpp"
#include "abcdquant/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoLesion = 3;
constexpr int kExitNumeric = 4;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw abcdq::InvalidInput("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw abcdq::InvalidInput("cannot write file: " + path);
    out << text;
    if (!out) throw abcdq::InvalidInput("write failed: " + path);
}

/// --out <path> writes there; otherwise the payload goes to stdout.
void emit(const std::string& out_path, const std::string& payload) {
    if (out_path.empty())
        std::cout << payload;
    else
        write_text_file(out_path, payload);
}

abcdq::CalibrationParams load_calibration(const std::string& path) {
    const auto j = nlohmann::json::parse(read_text_file(path));
    abcdq::CalibrationParams cal;
    cal.p6mm_px = j.at("p6mm_px").get<double>();
    if (!(cal.p6mm_px > 0.0))
        throw abcdq::InvalidInput("calibration: p6mm_px must be positive");
    return cal;
}

abcdq::AbcdScores parse_scores_arg(const std::string& text, const std::string& flag) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw abcdq::InvalidInput(flag + ": not a number: '" + item + "'");
        }
    }
    if (vals.size() != 4)
        throw abcdq::InvalidInput(flag + " expects four comma-separated values, got '" +
                                  text + "'");
    return abcdq::AbcdScores{vals[0], vals[1], vals[2], vals[3]};
}

int default_jobs() {
    if (const char* env = std::getenv("ABCD_QUANT_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CliOptions {
    std::uint64_t seed = 42;
    bool quiet = false;
};

void log_line(const CliOptions& opts, const std::string& msg) {
    if (!opts.quiet) std::cerr << msg << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ABCD dermoscopy feature toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--seed", opts.seed, "Global RNG seed")->capture_default_str();
    app.add_flag("--quiet", opts.quiet, "Suppress progress output on stderr");

    // score
    std::string score_image, score_cal, score_out, score_mask_out;
    double score_p6mm = 0.0;
    auto* score = app.add_subcommand("score", "Score one lesion image");
    score->fallthrough();
    score->add_option("image", score_image, "PNG or PPM input image")->required();
    score->add_option("--p6mm", score_p6mm, "Pixel length of 6 mm")
        ->check(CLI::PositiveNumber);
    score->add_option("--calibration", score_cal, "Calibration JSON from `calibrate`");
    score->add_option("--out", score_out, "Output JSON path (default stdout)");
    score->add_option("--mask-out", score_mask_out, "Optional segmentation mask PNG");

    // synth
    std::string synth_spec_path, synth_out;
    auto* synth = app.add_subcommand("synth", "Render a synthetic lesion");
    synth->fallthrough();
    synth->add_option("--spec", synth_spec_path, "Scene spec JSON")->required();
    synth->add_option("--out", synth_out, "Output PNG path")->required();

    // label-dataset
    std::string label_images, label_metadata, label_cal, label_out;
    int label_jobs = 0;
    auto* label = app.add_subcommand("label-dataset", "Batch-score a metadata CSV");
    label->fallthrough();
    label->add_option("--images", label_images, "Image directory")->required();
    label->add_option("--metadata", label_metadata, "Metadata CSV")->required();
    label->add_option("--calibration", label_cal, "Calibration JSON")->required();
    label->add_option("--out", label_out, "Output labels CSV")->required();
    label->add_option("--jobs", label_jobs, "Worker count (default: logical CPUs)");

    // calibrate
    std::string cal_in, cal_out;
    auto* calibrate = app.add_subcommand("calibrate", "Fit p6mm from max diameters");
    calibrate->fallthrough();
    calibrate->add_option("--labels-raw", cal_in, "CSV with a max_diameter_px column")
        ->required();
    calibrate->add_option("--out", cal_out, "Output calibration JSON");

    // split
    std::string split_metadata, split_out;
    auto* split = app.add_subcommand("split", "Assign 70/10/20 lesion-grouped splits");
    split->fallthrough();
    split->add_option("--metadata", split_metadata, "Metadata CSV")->required();
    split->add_option("--out", split_out, "Output split CSV");

    // weights
    std::string weights_metadata, weights_split, weights_out;
    auto* weights = app.add_subcommand("weights", "Inverse-frequency class weights");
    weights->fallthrough();
    weights->add_option("--metadata", weights_metadata, "Metadata CSV")->required();
    weights->add_option("--split", weights_split, "Split CSV")->required();
    weights->add_option("--out", weights_out, "Output weights JSON");

    // simulate
    std::string sim_start, sim_target, sim_fit, sim_out, sim_model_out;
    int sim_steps = 0;
    auto* simulate = app.add_subcommand("simulate", "Feature-space trajectory");
    simulate->fallthrough();
    simulate->add_option("--start", sim_start, "Start a,b,c,d")->required();
    simulate->add_option("--target", sim_target, "Target a,b,c,d (interpolation mode)");
    simulate->add_option("--steps", sim_steps, "Step count K")->required();
    simulate->add_option("--fit", sim_fit, "Pairs CSV: fit a drift model and roll out");
    simulate->add_option("--model-out", sim_model_out, "Optional fitted drift model JSON");
    simulate->add_option("--out", sim_out, "Output trajectory CSV");

    // pca
    std::string pca_traj, pca_out;
    auto* pca = app.add_subcommand("pca", "Project a trajectory to its top-2 PCs");
    pca->fallthrough();
    pca->add_option("--traj", pca_traj, "Trajectory CSV")->required();
    pca->add_option("--out", pca_out, "Output projection CSV");

    // evaluate
    std::string eval_task, eval_pred, eval_truth, eval_metadata, eval_out;
    auto* evaluate = app.add_subcommand("evaluate", "Classification / feature metrics");
    evaluate->fallthrough();
    evaluate->add_option("--task", eval_task, "class|features")->required();
    evaluate->add_option("--pred", eval_pred, "Prediction CSV")->required();
    evaluate->add_option("--truth", eval_truth, "Truth CSV (metadata or labels)")->required();
    evaluate->add_option("--metadata", eval_metadata,
                         "Metadata CSV for per-class MAE (features task)");
    evaluate->add_option("--out", eval_out, "Output report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInput;
    }

    try {
        if (score->parsed()) {
            const abcdq::RasterImage img = abcdq::load_image(score_image);
            abcdq::CalibrationParams cal;
            if (!score_cal.empty()) cal = load_calibration(score_cal);
            if (score_p6mm > 0.0) cal.p6mm_px = score_p6mm;
            const abcdq::LesionScore s = abcdq::score_lesion(img, cal, opts.seed);

            if (!score_mask_out.empty()) {
                // The scored mask comes from the normalized image; re-run
                // the same chain to export it.
                const abcdq::RasterImage dehaired = abcdq::remove_hair(img);
                const auto provisional = abcdq::segment_lesion(dehaired);
                abcdq::BinaryMask bg(img.width(), img.height());
                for (int y = 0; y < img.height(); ++y)
                    for (int x = 0; x < img.width(); ++x)
                        bg.set(x, y, !provisional.mask.get(x, y));
                const auto seg = abcdq::segment_lesion(abcdq::normalize_colors(dehaired, bg));
                abcdq::save_mask_png(seg.mask, score_mask_out);
            }

            nlohmann::ordered_json j;
            j["a"] = s.scores.a;
            j["b"] = s.scores.b;
            j["c"] = s.scores.c;
            j["d"] = s.scores.d;
            j["b_shape"] = s.border.b_shape;
            j["b_grad"] = s.border.b_grad;
            j["dispersion"] = s.color.dispersion;
            j["n_colors"] = s.color.n_colors;
            j["max_diameter_px"] = s.max_diameter_px;
            j["eq_diameter_px"] = s.eq_diameter_px;
            emit(score_out, j.dump(2) + "\n");
        } else if (synth->parsed()) {
            const auto spec = abcdq::synth_spec_from_json(read_text_file(synth_spec_path));
            const abcdq::RasterImage img = abcdq::render(spec, opts.seed);
            abcdq::save_png(img, synth_out);
            write_text_file(synth_out + ".json", abcdq::synth_spec_to_json(spec));
            log_line(opts, "wrote " + synth_out + " and " + synth_out + ".json");
        } else if (label->parsed()) {
            const auto records = abcdq::load_metadata(label_metadata);
            abcdq::LabelDatasetOptions lopts;
            lopts.calibration = load_calibration(label_cal);
            lopts.seed = opts.seed;
            lopts.jobs = label_jobs > 0 ? label_jobs : default_jobs();
            const auto rows = abcdq::label_dataset(records, label_images, lopts);
            write_text_file(label_out, abcdq::label_rows_to_csv(rows));
            std::size_t ok = 0;
            for (const auto& r : rows) ok += r.ok ? 1 : 0;
            log_line(opts, "labeled " + std::to_string(ok) + "/" +
                               std::to_string(rows.size()) + " images -> " + label_out);
        } else if (calibrate->parsed()) {
            const abcdq::CsvTable table = abcdq::read_csv(cal_in);
            const std::size_t col = table.column("max_diameter_px");
            std::vector<double> diameters;
            diameters.reserve(table.rows.size());
            for (std::size_t r = 0; r < table.rows.size(); ++r)
                diameters.push_back(
                    abcdq::parse_cell_double(table.rows[r][col], r + 1, "max_diameter_px"));
            const auto cal = abcdq::calibrate_p6mm(diameters);
            nlohmann::ordered_json j;
            j["p6mm_px"] = cal.p6mm_px;
            emit(cal_out, j.dump(2) + "\n");
        } else if (split->parsed()) {
            auto records = abcdq::load_metadata(split_metadata);
            records = abcdq::split_dataset(std::move(records), opts.seed);
            emit(split_out, abcdq::split_to_csv(records));
        } else if (weights->parsed()) {
            auto records = abcdq::load_metadata(weights_metadata);
            abcdq::apply_split_csv(records, read_text_file(weights_split));
            emit(weights_out, abcdq::class_weights_to_json(abcdq::class_weights(records)));
        } else if (simulate->parsed()) {
            const abcdq::AbcdScores start = parse_scores_arg(sim_start, "--start");
            abcdq::FeatureTrajectory traj;
            if (!sim_fit.empty()) {
                const auto pairs = abcdq::drift_pairs_from_csv(read_text_file(sim_fit));
                const abcdq::DriftModel model = abcdq::fit_drift(pairs);
                if (!sim_model_out.empty())
                    write_text_file(sim_model_out, abcdq::drift_model_to_json(model));
                traj = abcdq::rollout(model, {start.a, start.b, start.c, start.d}, sim_steps,
                                      /*clamp_unit=*/true);
            } else {
                if (sim_target.empty())
                    throw abcdq::InvalidInput("simulate: --target required without --fit");
                const abcdq::AbcdScores target = parse_scores_arg(sim_target, "--target");
                traj = abcdq::abcd_trajectory(start, target, sim_steps);
            }
            emit(sim_out, abcdq::trajectory_to_csv(traj));
        } else if (pca->parsed()) {
            const auto traj = abcdq::trajectory_from_csv(read_text_file(pca_traj));
            const auto proj = abcdq::pca_fit(traj.steps);
            emit(pca_out, abcdq::projection_to_csv(abcdq::project(proj, traj)));
        } else if (evaluate->parsed()) {
            if (eval_task == "class") {
                const auto truth = abcdq::parse_metadata(read_text_file(eval_truth));
                const auto pred =
                    abcdq::class_predictions_from_csv(read_text_file(eval_pred));
                const auto rep = abcdq::evaluate_classification(truth, pred);
                emit(eval_out, abcdq::classification_report_to_json(rep));
            } else if (eval_task == "features") {
                const auto truth = abcdq::label_rows_from_csv(read_text_file(eval_truth));
                const auto pred = abcdq::label_rows_from_csv(read_text_file(eval_pred));
                std::vector<abcdq::DatasetRecord> classes;
                if (!eval_metadata.empty())
                    classes = abcdq::load_metadata(eval_metadata);
                const auto rep = abcdq::regression_report(truth, pred, classes);
                emit(eval_out, abcdq::regression_report_to_json(rep));
            } else {
                throw abcdq::InvalidInput("evaluate: --task must be 'class' or 'features'");
            }
        }
    } catch (const abcdq::NoLesionFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoLesion;
    } catch (const abcdq::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const abcdq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
