#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ts2img {

struct ScoredLabel {
    double score = 0.0;
    bool anomalous = false;  // ground truth
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    // Throw if the relevant class is absent.
    double tpr() const;
    double fpr() const;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (FPR, TPR), (0,0) .. (1,1)
    double auc = 0.0;
};

// Predicted positive iff score > tau (strict), positives = anomalous.
ConfusionCounts confusion(std::span<const ScoredLabel> scored, double tau);

// F1 = 2 TP / (2 TP + FP + FN); throws when the denominator is zero.
double f1_score(std::size_t tp, std::size_t fp, std::size_t fn);

// ROC swept over distinct score thresholds (ties grouped into one
// step), AUC by trapezoidal integration. Requires both classes.
RocCurve roc_auc(std::span<const ScoredLabel> scored);

}  // namespace ts2img
