#include "ts2img/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ts2img {

double residual(std::span<const double> original, std::span<const double> reconstruction) {
    if (original.size() != reconstruction.size())
        throw std::invalid_argument("residual: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i)
        sum += std::abs(original[i] - reconstruction[i]);
    return sum;
}

Threshold calibrate(std::span<const double> residuals, double percentile) {
    if (residuals.empty())
        throw std::invalid_argument("calibrate: no residuals");
    if (!(percentile >= 0.0 && percentile <= 100.0))
        throw std::invalid_argument("calibrate: percentile must be in [0, 100]");
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = percentile / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    Threshold tau;
    tau.value = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    tau.percentile = percentile;
    tau.calibration_count = sorted.size();
    return tau;
}

SeriesScore score_series(const std::string& series_id, std::span<const double> slice_residuals,
                         const Threshold& tau) {
    if (slice_residuals.empty())
        throw std::invalid_argument("score_series: no slice residuals");
    SeriesScore score;
    score.series_id = series_id;
    score.max_residual = *std::max_element(slice_residuals.begin(), slice_residuals.end());
    score.threshold = tau.value;
    score.anomalous = score.max_residual > tau.value;
    return score;
}

}  // namespace ts2img
