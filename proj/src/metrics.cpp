#include "ts2img/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ts2img {

double ConfusionCounts::tpr() const {
    if (tp + fn == 0)
        throw std::invalid_argument("ConfusionCounts::tpr: no positive samples");
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double ConfusionCounts::fpr() const {
    if (fp + tn == 0)
        throw std::invalid_argument("ConfusionCounts::fpr: no negative samples");
    return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

ConfusionCounts confusion(std::span<const ScoredLabel> scored, double tau) {
    if (scored.empty())
        throw std::invalid_argument("confusion: empty input");
    ConfusionCounts c;
    for (const ScoredLabel& s : scored) {
        const bool predicted = s.score > tau;
        if (s.anomalous)
            (predicted ? c.tp : c.fn)++;
        else
            (predicted ? c.fp : c.tn)++;
    }
    return c;
}

double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
    const std::size_t denom = 2 * tp + fp + fn;
    if (denom == 0)
        throw std::invalid_argument("f1_score: undefined for all-zero counts");
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

RocCurve roc_auc(std::span<const ScoredLabel> scored) {
    std::size_t pos = 0, neg = 0;
    for (const ScoredLabel& s : scored)
        (s.anomalous ? pos : neg)++;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_auc: both classes must be present");

    std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // Group equal scores into a single ROC step so trapezoidal AUC
        // matches the pairwise-probability formulation exactly.
        const double score = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == score) {
            (sorted[i].anomalous ? tp : fp)++;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auc = auc;
    return curve;
}

}  // namespace ts2img
