#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ts2img {

// A raw 1-D sensor signal. Values are kept in acquisition units, no
// normalisation or filtering is applied on ingestion.
struct TimeSeries {
    std::vector<double> values;
    double sample_rate_hz = 1024.0;

    // Throws std::invalid_argument on empty or non-finite input.
    void validate() const;
};

// Contiguous, non-overlapping partition of a series into fixed-length
// windows. Trailing samples that do not fill a window are dropped.
struct SliceGrid {
    std::vector<std::vector<double>> slices;
    std::size_t slice_len = 0;

    std::size_t count() const { return slices.size(); }
};

// Global value bounds derived from a training set, shared by the GAF
// and GS scalers.
struct ScalingBounds {
    double lower = 0.0;
    double upper = 0.0;

    double range() const { return upper - lower; }
    void validate() const;
};

SliceGrid slice_series(const TimeSeries& series, std::size_t slice_len);

// upper = margin * global max, lower = margin * global min over the
// whole training collection. A degenerate interval (constant data) is
// widened symmetrically by 1e-6.
ScalingBounds fit_bounds(std::span<const TimeSeries> training, double margin);

std::vector<double> clip_to_bounds(std::span<const double> x, const ScalingBounds& bounds);

}  // namespace ts2img
