#include "abcdquant/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "abcdquant/csv.hpp"
#include "abcdquant/image_io.hpp"

namespace abcdq {

namespace {

/// FNV-1a, used to derive a per-image seed that is stable across runs
/// and independent of scheduling.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Fisher-Yates with an explicit draw so shuffles are identical on
/// every platform (std::shuffle is not specified bit-for-bit).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

const char* to_string(Diagnosis d) { return kClassNames[static_cast<std::size_t>(d)]; }

std::optional<Diagnosis> parse_diagnosis(const std::string& s) {
    for (int i = 0; i < kClassCount; ++i)
        if (s == kClassNames[static_cast<std::size_t>(i)]) return static_cast<Diagnosis>(i);
    return std::nullopt;
}

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Unassigned: return "unassigned";
    }
    return "unassigned";
}

std::optional<Split> parse_split(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    if (s == "unassigned") return Split::Unassigned;
    return std::nullopt;
}

std::vector<DatasetRecord> parse_metadata(const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    const std::size_t id_col = table.column("image_id");
    const std::size_t lesion_col = table.column("lesion_id");
    const std::size_t dx_col = table.column("dx");

    std::vector<DatasetRecord> records;
    records.reserve(table.rows.size());
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        DatasetRecord rec;
        rec.image_id = row[id_col];
        rec.lesion_id = row[lesion_col];
        const auto dx = parse_diagnosis(row[dx_col]);
        if (!dx)
            throw InvalidInput("row " + std::to_string(r + 1) + ": unknown class label '" +
                               row[dx_col] + "'");
        rec.diagnosis = *dx;
        if (!seen.insert(rec.image_id).second)
            throw InvalidInput("row " + std::to_string(r + 1) + ": duplicate image_id '" +
                               rec.image_id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<DatasetRecord> load_metadata(const std::string& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open metadata CSV: " + csv_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_metadata(buf.str());
}

std::vector<DatasetRecord> split_dataset(std::vector<DatasetRecord> records,
                                         std::uint64_t seed) {
    if (records.empty()) throw InvalidInput("split_dataset: no records");

    // lesion groups; a group's class is its first record's diagnosis
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
        groups[records[i].lesion_id].push_back(i);

    std::map<Diagnosis, std::vector<const std::vector<std::size_t>*>> by_class;
    std::map<Diagnosis, std::size_t> class_counts;
    for (const auto& [lesion, members] : groups) {
        const Diagnosis dx = records[members.front()].diagnosis;
        by_class[dx].push_back(&members);
        class_counts[dx] += members.size();
    }

    std::mt19937_64 rng(seed);
    for (auto& [dx, group_list] : by_class) {
        deterministic_shuffle(group_list, rng);

        const double total = static_cast<double>(class_counts[dx]);
        double target[3] = {0.7 * total, 0.1 * total, 0.2 * total};
        double assigned[3] = {0.0, 0.0, 0.0};
        for (const auto* members : group_list) {
            // largest remaining deficit wins; ties prefer train, then val
            int best = 0;
            for (int s = 1; s < 3; ++s)
                if (target[s] - assigned[s] > target[best] - assigned[best]) best = s;
            assigned[best] += static_cast<double>(members->size());
            const Split split = best == 0 ? Split::Train : (best == 1 ? Split::Val : Split::Test);
            for (std::size_t idx : *members) records[idx].split = split;
        }
    }
    return records;
}

ClassWeightTable class_weights(const std::vector<DatasetRecord>& records) {
    std::map<Diagnosis, std::size_t> train_counts;
    std::set<Diagnosis> present;
    std::size_t total = 0;
    for (const auto& rec : records) {
        present.insert(rec.diagnosis);
        if (rec.split == Split::Train) {
            ++train_counts[rec.diagnosis];
            ++total;
        }
    }
    for (Diagnosis dx : present)
        if (train_counts.find(dx) == train_counts.end())
            throw InvalidInput(std::string("class_weights: class '") + to_string(dx) +
                               "' absent from the train split");
    if (total == 0) throw InvalidInput("class_weights: empty train split");

    ClassWeightTable weights;
    double sum = 0.0;
    for (const auto& [dx, count] : train_counts) {
        weights[dx] = static_cast<double>(total) / static_cast<double>(count);
        sum += weights[dx];
    }
    const double mean = sum / static_cast<double>(weights.size());
    for (auto& [dx, w] : weights) w /= mean;
    return weights;
}

std::vector<std::string> oversample_plan(const std::vector<DatasetRecord>& records,
                                         std::uint64_t seed) {
    std::map<Diagnosis, std::vector<std::string>> ids;
    for (const auto& rec : records)
        if (rec.split == Split::Train) ids[rec.diagnosis].push_back(rec.image_id);
    if (ids.empty()) throw InvalidInput("oversample_plan: empty train split");
    std::size_t max_count = 0;
    for (auto& [dx, list] : ids) {
        std::sort(list.begin(), list.end());  // input-order independence
        max_count = std::max(max_count, list.size());
    }

    std::mt19937_64 rng(seed);
    std::vector<std::string> plan;
    plan.reserve(max_count * ids.size());
    for (auto& [dx, list] : ids) {
        const std::size_t repeats = max_count / list.size();
        const std::size_t extras = max_count % list.size();
        for (std::size_t r = 0; r < repeats; ++r)
            plan.insert(plan.end(), list.begin(), list.end());
        if (extras > 0) {
            std::vector<std::string> pool = list;
            deterministic_shuffle(pool, rng);
            plan.insert(plan.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extras));
        }
    }
    deterministic_shuffle(plan, rng);
    return plan;
}

std::vector<LabelRow> label_dataset(const std::vector<DatasetRecord>& records,
                                    const std::string& image_dir,
                                    const LabelDatasetOptions& options) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(image_dir, ec))
        throw InvalidInput("label_dataset: not a readable directory: " + image_dir);

    std::vector<LabelRow> rows(records.size());
    auto score_one = [&](std::size_t i) {
        LabelRow row;
        row.image_id = records[i].image_id;
        const fs::path png = fs::path(image_dir) / (row.image_id + ".png");
        const fs::path ppm = fs::path(image_dir) / (row.image_id + ".ppm");
        try {
            const fs::path* path = nullptr;
            if (fs::exists(png, ec))
                path = &png;
            else if (fs::exists(ppm, ec))
                path = &ppm;
            else
                throw InvalidInput("image file not found for id " + row.image_id);
            const RasterImage img = load_image(path->string());
            const std::uint64_t img_seed = options.seed ^ fnv1a(row.image_id);
            const LesionScore score = score_lesion(img, options.calibration, img_seed);
            row.scores = score.scores;
            row.ok = true;
        } catch (const NoLesionFound&) {
            row.ok = false;
            row.failure = "NoLesionFound";
        } catch (const Error& e) {
            row.ok = false;
            row.failure = e.what();
        }
        rows[i] = std::move(row);
    };

    int jobs = options.jobs;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(records.size())));

    if (jobs == 1 || records.size() < 2) {
        for (std::size_t i = 0; i < records.size(); ++i) score_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t)
            workers.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= records.size()) break;
                    score_one(i);
                }
            });
        for (auto& w : workers) w.join();
    }

    std::sort(rows.begin(), rows.end(),
              [](const LabelRow& a, const LabelRow& b) { return a.image_id < b.image_id; });
    return rows;
}

std::string label_rows_to_csv(const std::vector<LabelRow>& rows) {
    CsvTable table;
    table.header = {"image_id", "a", "b", "c", "d", "status"};
    for (const auto& row : rows) {
        if (row.ok) {
            table.rows.push_back({row.image_id, format_score(row.scores.a),
                                  format_score(row.scores.b), format_score(row.scores.c),
                                  format_score(row.scores.d), "ok"});
        } else {
            table.rows.push_back({row.image_id, "", "", "", "", "failed(" + row.failure + ")"});
        }
    }
    return to_csv(table);
}

std::vector<LabelRow> label_rows_from_csv(const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    const std::size_t id = table.column("image_id");
    const std::size_t a = table.column("a");
    const std::size_t b = table.column("b");
    const std::size_t c = table.column("c");
    const std::size_t d = table.column("d");
    // plain prediction files (image_id,a,b,c,d) have no status column;
    // every row counts as ok
    const bool has_status = table.has_column("status");
    const std::size_t status = has_status ? table.column("status") : 0;

    std::vector<LabelRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        LabelRow out;
        out.image_id = row[id];
        if (!has_status || row[status] == "ok") {
            out.ok = true;
            out.scores.a = parse_cell_double(row[a], r + 1, "a");
            out.scores.b = parse_cell_double(row[b], r + 1, "b");
            out.scores.c = parse_cell_double(row[c], r + 1, "c");
            out.scores.d = parse_cell_double(row[d], r + 1, "d");
        } else if (row[status].rfind("failed(", 0) == 0 && row[status].back() == ')') {
            out.ok = false;
            out.failure = row[status].substr(7, row[status].size() - 8);
        } else {
            throw InvalidInput("row " + std::to_string(r + 1) + ": bad status '" +
                               row[status] + "'");
        }
        rows.push_back(std::move(out));
    }
    return rows;
}

std::string split_to_csv(const std::vector<DatasetRecord>& records) {
    CsvTable table;
    table.header = {"image_id", "split"};
    for (const auto& rec : records)
        table.rows.push_back({rec.image_id, to_string(rec.split)});
    return to_csv(table);
}

void apply_split_csv(std::vector<DatasetRecord>& records, const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    const std::size_t id = table.column("image_id");
    const std::size_t split = table.column("split");
    std::map<std::string, Split> assignment;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto s = parse_split(table.rows[r][split]);
        if (!s)
            throw InvalidInput("row " + std::to_string(r + 1) + ": unknown split '" +
                               table.rows[r][split] + "'");
        assignment[table.rows[r][id]] = *s;
    }
    for (auto& rec : records) {
        const auto it = assignment.find(rec.image_id);
        if (it == assignment.end())
            throw InvalidInput("split CSV has no row for image_id '" + rec.image_id + "'");
        rec.split = it->second;
    }
}

std::string class_weights_to_json(const ClassWeightTable& weights) {
    nlohmann::ordered_json j;
    for (int i = 0; i < kClassCount; ++i) {
        const auto dx = static_cast<Diagnosis>(i);
        const auto it = weights.find(dx);
        if (it != weights.end()) j[to_string(dx)] = it->second;
    }
    return j.dump(2) + "\n";
}

} // namespace abcdq
