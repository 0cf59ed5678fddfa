#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abcdquant/features.hpp"

namespace abcdq {

/// HAM10000 diagnostic categories.
enum class Diagnosis { nv, mel, bcc, akiec, bkl, df, vasc };

inline constexpr int kClassCount = 7;
inline constexpr std::array<const char*, kClassCount> kClassNames = {
    "nv", "mel", "bcc", "akiec", "bkl", "df", "vasc"};

const char* to_string(Diagnosis d);
std::optional<Diagnosis> parse_diagnosis(const std::string& s);

enum class Split { Train, Val, Test, Unassigned };
const char* to_string(Split s);
std::optional<Split> parse_split(const std::string& s);

struct DatasetRecord {
    std::string image_id;
    std::string lesion_id;
    Diagnosis diagnosis = Diagnosis::nv;
    Split split = Split::Unassigned;
};

struct LabelRow {
    std::string image_id;
    AbcdScores scores;
    bool ok = false;
    std::string failure;  // reason when !ok
};

/// Mean-normalized inverse-frequency weights over the train split.
/// Only classes present in the table have entries; the mean is 1.
using ClassWeightTable = std::map<Diagnosis, double>;

/// Reads a metadata CSV whose header contains image_id, lesion_id and
/// dx (extra columns ignored). Rows with unknown dx or duplicate
/// image_id raise row-numbered errors.
std::vector<DatasetRecord> load_metadata(const std::string& csv_path);
std::vector<DatasetRecord> parse_metadata(const std::string& csv_text);

/// 70/10/20 split by image count, stratified within each diagnosis and
/// grouped by lesion_id so every image of a lesion lands in one split.
/// Deterministic for a fixed seed.
std::vector<DatasetRecord> split_dataset(std::vector<DatasetRecord> records,
                                         std::uint64_t seed);

/// Throws InvalidInput when a class present in the records has no
/// train-split members.
ClassWeightTable class_weights(const std::vector<DatasetRecord>& records);

/// One oversampled epoch: every class present in the train split is
/// brought up to the majority count (whole repeats plus seeded draws
/// without replacement), then the epoch order is shuffled.
std::vector<std::string> oversample_plan(const std::vector<DatasetRecord>& records,
                                         std::uint64_t seed);

struct LabelDatasetOptions {
    CalibrationParams calibration;
    std::uint64_t seed = 42;
    int jobs = 0;  // <= 0: hardware concurrency
};

/// Scores <image_dir>/<image_id>.(png|ppm) for every record; failures
/// become failed(...) rows. Output is ordered by image_id and the
/// per-image seed mixes the global seed with a stable hash of the id,
/// so results do not depend on scheduling.
std::vector<LabelRow> label_dataset(const std::vector<DatasetRecord>& records,
                                    const std::string& image_dir,
                                    const LabelDatasetOptions& options);

/// Label CSV: header image_id,a,b,c,d,status; scores with 6 decimals,
/// blank score cells on failed rows; LF line endings.
std::string label_rows_to_csv(const std::vector<LabelRow>& rows);
std::vector<LabelRow> label_rows_from_csv(const std::string& csv_text);

/// Split CSV: header image_id,split.
std::string split_to_csv(const std::vector<DatasetRecord>& records);

/// Applies a split CSV onto records (joined by image_id).
void apply_split_csv(std::vector<DatasetRecord>& records, const std::string& csv_text);

/// Weights JSON: flat object class -> weight.
std::string class_weights_to_json(const ClassWeightTable& weights);

} // namespace abcdq
