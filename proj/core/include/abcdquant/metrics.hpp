#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "abcdquant/dataset.hpp"

namespace abcdq {

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    double auc = 0.0;
    std::vector<RocPoint> curve;
};

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct ClassificationReport {
    std::array<std::array<std::size_t, kClassCount>, kClassCount> confusion{};  // [truth][pred]
    std::array<std::array<double, kClassCount>, kClassCount> normalized_confusion{};
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    std::array<PerClassMetrics, kClassCount> per_class{};
    std::vector<Diagnosis> zero_support;  // classes with no truth rows
    double melanoma_auc = 0.0;
    RocResult melanoma_roc;
    // melanoma row/column of the confusion matrix
    double melanoma_sensitivity = 0.0;
    double melanoma_specificity = 0.0;
};

struct FeatureStats {
    double mae = 0.0;
    double pearson = 0.0;
};

struct RegressionReport {
    std::array<FeatureStats, 4> per_feature{};  // a, b, c, d
    // per-class per-feature MAE; entry missing when the class has no
    // joined samples
    std::map<Diagnosis, std::array<double, 4>> per_class_mae;
    std::array<std::array<double, 4>, 4> feature_correlation{};  // among predictions
    std::size_t joined = 0;
};

struct LossWeights {
    double lambda = 1.0;
};

/// Confusion counts, row-normalization, accuracy and balanced accuracy
/// (mean recall over classes with support).
ClassificationReport confusion_and_accuracy(const std::vector<Diagnosis>& truth,
                                            const std::vector<Diagnosis>& pred);

/// Mann-Whitney AUC with half-credit ties plus the tie-aware ROC curve
/// sampled at every distinct threshold.
RocResult roc_auc(const std::vector<int>& truth, const std::vector<double>& scores);

/// Product-moment correlation; both inputs must be non-constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Joins prediction and truth label rows on image_id (ok rows only; the
/// id sets must match) and fills every regression figure. `classes` may
/// be empty, which skips the per-class table.
RegressionReport regression_report(const std::vector<LabelRow>& truth,
                                   const std::vector<LabelRow>& pred,
                                   const std::vector<DatasetRecord>& classes);

/// Cross-entropy of the true class plus lambda times the mean squared
/// feature error. Probabilities must form a 7-simplex within 1e-6 and
/// are floored at 1e-12 before the log.
double combined_loss(const std::array<double, kClassCount>& class_probs, Diagnosis true_class,
                     const std::array<double, 4>& pred_feats,
                     const std::array<double, 4>& true_feats, const LossWeights& weights);

/// Classification + melanoma ROC from prediction rows
/// (image_id, pred_class, score_mel) joined against metadata truth.
struct ClassPredictionRow {
    std::string image_id;
    Diagnosis pred_class = Diagnosis::nv;
    double score_mel = 0.0;
};
std::vector<ClassPredictionRow> class_predictions_from_csv(const std::string& csv_text);
ClassificationReport evaluate_classification(const std::vector<DatasetRecord>& truth,
                                             const std::vector<ClassPredictionRow>& pred);

std::string classification_report_to_json(const ClassificationReport& report);
std::string regression_report_to_json(const RegressionReport& report);

} // namespace abcdq
