#include "ts2img/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ts2img {

void TimeSeries::validate() const {
    if (values.empty())
        throw std::invalid_argument("TimeSeries: empty signal");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("TimeSeries: non-finite sample");
}

void ScalingBounds::validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw std::invalid_argument("ScalingBounds: non-finite bound");
    if (!(lower < upper))
        throw std::invalid_argument("ScalingBounds: lower must be < upper");
}

SliceGrid slice_series(const TimeSeries& series, std::size_t slice_len) {
    if (slice_len == 0)
        throw std::invalid_argument("slice_series: slice_len must be positive");
    const std::size_t n = series.values.size();
    if (n < slice_len)
        throw std::invalid_argument("slice_series: series of length " + std::to_string(n) +
                                    " is shorter than slice length " + std::to_string(slice_len));
    SliceGrid grid;
    grid.slice_len = slice_len;
    const std::size_t count = n / slice_len;
    grid.slices.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        auto begin = series.values.begin() + static_cast<std::ptrdiff_t>(k * slice_len);
        grid.slices.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(slice_len));
    }
    return grid;
}

ScalingBounds fit_bounds(std::span<const TimeSeries> training, double margin) {
    if (training.empty())
        throw std::invalid_argument("fit_bounds: empty training collection");
    if (margin < 1.0)
        throw std::invalid_argument("fit_bounds: margin must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const TimeSeries& series : training) {
        series.validate();
        auto [mn, mx] = std::minmax_element(series.values.begin(), series.values.end());
        lo = std::min(lo, *mn);
        hi = std::max(hi, *mx);
    }
    ScalingBounds bounds{margin * lo, margin * hi};
    if (!(bounds.lower < bounds.upper)) {
        const double centre = margin * lo;
        bounds.lower = centre - 1e-6;
        bounds.upper = centre + 1e-6;
    }
    bounds.validate();
    return bounds;
}

std::vector<double> clip_to_bounds(std::span<const double> x, const ScalingBounds& bounds) {
    bounds.validate();
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out)
        v = std::clamp(v, bounds.lower, bounds.upper);
    return out;
}

}  // namespace ts2img
