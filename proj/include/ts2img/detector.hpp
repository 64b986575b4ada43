#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ts2img {

struct ResidualRecord {
    std::string series_id;
    std::size_t slice_index = 0;
    double residual = 0.0;
};

struct Threshold {
    double value = 0.0;
    double percentile = 99.0;
    std::size_t calibration_count = 0;
};

struct SeriesScore {
    std::string series_id;
    double max_residual = 0.0;
    double threshold = 0.0;
    bool anomalous = false;
};

struct DetectionReport {
    std::vector<SeriesScore> series;
    Threshold threshold;
};

// l1 distance between a model input and its reconstruction.
double residual(std::span<const double> original, std::span<const double> reconstruction);

// Empirical percentile with linear interpolation between closest ranks.
Threshold calibrate(std::span<const double> residuals, double percentile);

// Max aggregation over slice residuals; anomalous iff max > tau (strict).
SeriesScore score_series(const std::string& series_id, std::span<const double> slice_residuals,
                         const Threshold& tau);

}  // namespace ts2img
