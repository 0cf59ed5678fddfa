#include "abcdquant/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "abcdquant/csv.hpp"

namespace abcdq {

ClassificationReport confusion_and_accuracy(const std::vector<Diagnosis>& truth,
                                            const std::vector<Diagnosis>& pred) {
    if (truth.size() != pred.size())
        throw InvalidInput("confusion_and_accuracy: length mismatch (" +
                           std::to_string(truth.size()) + " vs " + std::to_string(pred.size()) +
                           ")");
    if (truth.empty()) throw InvalidInput("confusion_and_accuracy: empty input");

    ClassificationReport rep;
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++rep.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];

    std::size_t correct = 0;
    double recall_sum = 0.0;
    std::size_t supported = 0;
    for (int t = 0; t < kClassCount; ++t) {
        const auto& row = rep.confusion[static_cast<std::size_t>(t)];
        const std::size_t support = std::accumulate(row.begin(), row.end(), std::size_t{0});
        correct += row[static_cast<std::size_t>(t)];

        auto& norm = rep.normalized_confusion[static_cast<std::size_t>(t)];
        if (support == 0) {
            norm.fill(0.0);  // flagged, not divided
            rep.zero_support.push_back(static_cast<Diagnosis>(t));
        } else {
            for (int p = 0; p < kClassCount; ++p)
                norm[static_cast<std::size_t>(p)] =
                    static_cast<double>(row[static_cast<std::size_t>(p)]) /
                    static_cast<double>(support);
        }

        std::size_t predicted = 0;
        for (int u = 0; u < kClassCount; ++u)
            predicted += rep.confusion[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)];
        const std::size_t tp = row[static_cast<std::size_t>(t)];
        auto& pc = rep.per_class[static_cast<std::size_t>(t)];
        pc.support = support;
        pc.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        pc.recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
        pc.f1 = (pc.precision + pc.recall) > 0.0
                    ? 2.0 * pc.precision * pc.recall / (pc.precision + pc.recall)
                    : 0.0;
        if (support > 0) {
            recall_sum += pc.recall;
            ++supported;
        }
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    rep.balanced_accuracy = supported > 0 ? recall_sum / static_cast<double>(supported) : 0.0;

    // Melanoma one-vs-rest sensitivity / specificity straight from the
    // confusion matrix.
    const auto mel = static_cast<std::size_t>(Diagnosis::mel);
    std::size_t mel_tp = rep.confusion[mel][mel];
    std::size_t mel_support = 0, others_total = 0, others_pred_mel = 0;
    for (int p = 0; p < kClassCount; ++p) mel_support += rep.confusion[mel][static_cast<std::size_t>(p)];
    for (int t = 0; t < kClassCount; ++t) {
        if (static_cast<std::size_t>(t) == mel) continue;
        for (int p = 0; p < kClassCount; ++p) {
            others_total += rep.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
            if (static_cast<std::size_t>(p) == mel)
                others_pred_mel +=
                    rep.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
        }
    }
    rep.melanoma_sensitivity =
        mel_support > 0 ? static_cast<double>(mel_tp) / mel_support : 0.0;
    rep.melanoma_specificity =
        others_total > 0
            ? static_cast<double>(others_total - others_pred_mel) / others_total
            : 0.0;
    return rep;
}

RocResult roc_auc(const std::vector<int>& truth, const std::vector<double>& scores) {
    if (truth.size() != scores.size())
        throw InvalidInput("roc_auc: length mismatch");
    std::size_t pos = 0, neg = 0;
    for (int t : truth) (t != 0 ? pos : neg) += 1;
    if (pos == 0 || neg == 0)
        throw InvalidInput("roc_auc: both classes must be present");

    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    out.curve.push_back(RocPoint{std::numeric_limits<double>::infinity(), 0.0, 0.0});

    // Sweep descending scores in tie groups; pair counting gets
    // half-credit for ties against negatives seen in the same group.
    std::size_t tp = 0, fp = 0;
    double auc2 = 0.0;  // accumulated in units of 2 to stay integral
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t tie_pos = 0, tie_neg = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (truth[order[j]] != 0 ? tie_pos : tie_neg) += 1;
            ++j;
        }
        // negatives strictly below this group: neg - fp - tie_neg
        auc2 += static_cast<double>(tie_pos) *
                (2.0 * static_cast<double>(neg - fp - tie_neg) + static_cast<double>(tie_neg));
        tp += tie_pos;
        fp += tie_neg;
        out.curve.push_back(RocPoint{scores[order[i]],
                                     static_cast<double>(fp) / static_cast<double>(neg),
                                     static_cast<double>(tp) / static_cast<double>(pos)});
        i = j;
    }
    out.auc = auc2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidInput("pearson: length mismatch");
    if (x.size() < 2) throw InvalidInput("pearson: need at least 2 samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw InvalidInput("pearson: constant input has undefined correlation");
    return sxy / std::sqrt(sxx * syy);
}

RegressionReport regression_report(const std::vector<LabelRow>& truth,
                                   const std::vector<LabelRow>& pred,
                                   const std::vector<DatasetRecord>& classes) {
    std::map<std::string, const LabelRow*> pred_by_id;
    for (const auto& row : pred)
        if (row.ok) pred_by_id[row.image_id] = &row;

    std::size_t truth_ok = 0;
    std::vector<std::pair<const LabelRow*, const LabelRow*>> joined;  // truth, pred
    for (const auto& row : truth) {
        if (!row.ok) continue;
        ++truth_ok;
        const auto it = pred_by_id.find(row.image_id);
        if (it == pred_by_id.end())
            throw InvalidInput("regression_report: no prediction for image_id '" +
                               row.image_id + "'");
        joined.emplace_back(&row, it->second);
    }
    if (truth_ok != pred_by_id.size())
        throw InvalidInput("regression_report: prediction ids do not match truth ids");
    if (joined.empty()) throw InvalidInput("regression_report: empty join");

    auto feature = [](const LabelRow& row, int f) {
        switch (f) {
            case 0: return row.scores.a;
            case 1: return row.scores.b;
            case 2: return row.scores.c;
            default: return row.scores.d;
        }
    };

    RegressionReport rep;
    rep.joined = joined.size();
    std::array<std::vector<double>, 4> tv, pv;
    for (int f = 0; f < 4; ++f) {
        tv[static_cast<std::size_t>(f)].reserve(joined.size());
        pv[static_cast<std::size_t>(f)].reserve(joined.size());
        for (const auto& [t, p] : joined) {
            tv[static_cast<std::size_t>(f)].push_back(feature(*t, f));
            pv[static_cast<std::size_t>(f)].push_back(feature(*p, f));
        }
        double mae = 0.0;
        for (std::size_t i = 0; i < joined.size(); ++i)
            mae += std::abs(pv[static_cast<std::size_t>(f)][i] - tv[static_cast<std::size_t>(f)][i]);
        rep.per_feature[static_cast<std::size_t>(f)].mae = mae / static_cast<double>(joined.size());
        rep.per_feature[static_cast<std::size_t>(f)].pearson =
            pearson(tv[static_cast<std::size_t>(f)], pv[static_cast<std::size_t>(f)]);
    }

    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) {
                rep.feature_correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1.0;
            } else if (j > i) {
                const double r = pearson(pv[static_cast<std::size_t>(i)], pv[static_cast<std::size_t>(j)]);
                rep.feature_correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r;
                rep.feature_correlation[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = r;
            }
        }

    if (!classes.empty()) {
        std::map<std::string, Diagnosis> dx_by_id;
        for (const auto& rec : classes) dx_by_id[rec.image_id] = rec.diagnosis;
        std::map<Diagnosis, std::array<double, 4>> sums;
        std::map<Diagnosis, std::size_t> counts;
        for (const auto& [t, p] : joined) {
            const auto it = dx_by_id.find(t->image_id);
            if (it == dx_by_id.end())
                throw InvalidInput("regression_report: image_id '" + t->image_id +
                                   "' missing from metadata");
            auto& s = sums[it->second];
            for (int f = 0; f < 4; ++f)
                s[static_cast<std::size_t>(f)] += std::abs(feature(*p, f) - feature(*t, f));
            ++counts[it->second];
        }
        for (const auto& [dx, s] : sums) {
            std::array<double, 4> mae{};
            for (int f = 0; f < 4; ++f)
                mae[static_cast<std::size_t>(f)] =
                    s[static_cast<std::size_t>(f)] / static_cast<double>(counts[dx]);
            rep.per_class_mae[dx] = mae;
        }
    }
    return rep;
}

double combined_loss(const std::array<double, kClassCount>& class_probs, Diagnosis true_class,
                     const std::array<double, 4>& pred_feats,
                     const std::array<double, 4>& true_feats, const LossWeights& weights) {
    double sum = 0.0;
    for (double p : class_probs) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidInput("combined_loss: probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw InvalidInput("combined_loss: probabilities sum to " + std::to_string(sum) +
                           ", not 1");
    if (!std::isfinite(weights.lambda) || weights.lambda < 0.0)
        throw InvalidInput("combined_loss: lambda must be finite and >= 0");

    const double p_true =
        std::max(class_probs[static_cast<std::size_t>(true_class)], 1e-12);
    double mse = 0.0;
    for (int f = 0; f < 4; ++f) {
        const double d = pred_feats[static_cast<std::size_t>(f)] -
                         true_feats[static_cast<std::size_t>(f)];
        mse += d * d;
    }
    mse /= 4.0;
    return -std::log(p_true) + weights.lambda * mse;
}

std::vector<ClassPredictionRow> class_predictions_from_csv(const std::string& csv_text) {
    const CsvTable table = parse_csv(csv_text);
    const std::size_t id = table.column("image_id");
    const std::size_t cls = table.column("pred_class");
    const std::size_t mel = table.column("score_mel");
    std::vector<ClassPredictionRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ClassPredictionRow row;
        row.image_id = table.rows[r][id];
        const auto dx = parse_diagnosis(table.rows[r][cls]);
        if (!dx)
            throw InvalidInput("row " + std::to_string(r + 1) + ": unknown class label '" +
                               table.rows[r][cls] + "'");
        row.pred_class = *dx;
        row.score_mel = parse_cell_double(table.rows[r][mel], r + 1, "score_mel");
        rows.push_back(std::move(row));
    }
    return rows;
}

ClassificationReport evaluate_classification(const std::vector<DatasetRecord>& truth,
                                             const std::vector<ClassPredictionRow>& pred) {
    std::map<std::string, Diagnosis> truth_by_id;
    for (const auto& rec : truth) truth_by_id[rec.image_id] = rec.diagnosis;

    std::vector<Diagnosis> t, p;
    std::vector<int> mel_truth;
    std::vector<double> mel_scores;
    for (const auto& row : pred) {
        const auto it = truth_by_id.find(row.image_id);
        if (it == truth_by_id.end())
            throw InvalidInput("evaluate_classification: image_id '" + row.image_id +
                               "' missing from truth metadata");
        t.push_back(it->second);
        p.push_back(row.pred_class);
        mel_truth.push_back(it->second == Diagnosis::mel ? 1 : 0);
        mel_scores.push_back(row.score_mel);
    }

    ClassificationReport rep = confusion_and_accuracy(t, p);
    rep.melanoma_roc = roc_auc(mel_truth, mel_scores);
    rep.melanoma_auc = rep.melanoma_roc.auc;
    return rep;
}

std::string classification_report_to_json(const ClassificationReport& rep) {
    nlohmann::ordered_json j;
    j["task"] = "classification";
    j["classes"] = kClassNames;
    j["accuracy"] = rep.accuracy;
    j["balanced_accuracy"] = rep.balanced_accuracy;
    j["confusion"] = rep.confusion;
    j["normalized_confusion"] = rep.normalized_confusion;
    nlohmann::ordered_json per_class;
    for (int i = 0; i < kClassCount; ++i) {
        const auto& pc = rep.per_class[static_cast<std::size_t>(i)];
        per_class[kClassNames[static_cast<std::size_t>(i)]] = {{"precision", pc.precision},
                                                               {"recall", pc.recall},
                                                               {"f1", pc.f1},
                                                               {"support", pc.support}};
    }
    j["per_class"] = per_class;
    auto zero = nlohmann::ordered_json::array();
    for (Diagnosis dx : rep.zero_support) zero.push_back(to_string(dx));
    j["zero_support_classes"] = zero;
    j["melanoma_auc"] = rep.melanoma_auc;
    j["melanoma_sensitivity"] = rep.melanoma_sensitivity;
    j["melanoma_specificity"] = rep.melanoma_specificity;
    auto curve = nlohmann::ordered_json::array();
    for (const RocPoint& pt : rep.melanoma_roc.curve) {
        nlohmann::ordered_json e;
        e["threshold"] = std::isfinite(pt.threshold) ? nlohmann::ordered_json(pt.threshold)
                                                     : nlohmann::ordered_json();
        e["fpr"] = pt.fpr;
        e["tpr"] = pt.tpr;
        curve.push_back(e);
    }
    j["melanoma_roc"] = curve;
    return j.dump(2) + "\n";
}

std::string regression_report_to_json(const RegressionReport& rep) {
    static const char* kFeatures[4] = {"a", "b", "c", "d"};
    nlohmann::ordered_json j;
    j["task"] = "features";
    j["joined"] = rep.joined;
    nlohmann::ordered_json per_feature;
    for (int f = 0; f < 4; ++f)
        per_feature[kFeatures[f]] = {{"mae", rep.per_feature[static_cast<std::size_t>(f)].mae},
                                     {"pearson", rep.per_feature[static_cast<std::size_t>(f)].pearson}};
    j["per_feature"] = per_feature;
    nlohmann::ordered_json per_class;
    for (int i = 0; i < kClassCount; ++i) {
        const auto dx = static_cast<Diagnosis>(i);
        const auto it = rep.per_class_mae.find(dx);
        if (it == rep.per_class_mae.end()) {
            per_class[to_string(dx)] = nullptr;
        } else {
            nlohmann::ordered_json e;
            for (int f = 0; f < 4; ++f) e[kFeatures[f]] = it->second[static_cast<std::size_t>(f)];
            per_class[to_string(dx)] = e;
        }
    }
    j["per_class_mae"] = per_class;
    j["feature_correlation"] = rep.feature_correlation;
    return j.dump(2) + "\n";
}

} // namespace abcdq
