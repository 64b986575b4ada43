#include "ts2img/field_encoders.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ts2img {

std::size_t SaxQuantizer::assign(double value) const {
    // First breakpoint >= value; values beyond the fitted range fall
    // into the extreme bins.
    auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), value);
    return static_cast<std::size_t>(it - breakpoints.begin());
}

std::size_t UniformQuantizer::assign(double value) const {
    if (bin_count == 1 || upper <= lower)
        return 0;
    const double t = (value - lower) / (upper - lower);
    auto bin = static_cast<std::ptrdiff_t>(t * static_cast<double>(bin_count));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bin_count) - 1);
    return static_cast<std::size_t>(bin);
}

SaxQuantizer sax_fit(std::span<const double> training_values, std::size_t bin_count) {
    if (bin_count < 2)
        throw std::invalid_argument("sax_fit: need at least 2 bins");
    if (training_values.empty())
        throw std::invalid_argument("sax_fit: empty training data");
    const double n = static_cast<double>(training_values.size());
    const double mean = std::accumulate(training_values.begin(), training_values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : training_values)
        var += (v - mean) * (v - mean);
    var /= n;
    if (var <= 0.0)
        throw std::invalid_argument("sax_fit: zero training variance");
    const double std_dev = std::sqrt(var);

    SaxQuantizer q;
    q.bin_count = bin_count;
    q.train_mean = mean;
    q.train_std = std_dev;
    q.breakpoints.reserve(bin_count - 1);
    const boost::math::normal_distribution<double> gauss;
    for (std::size_t i = 1; i < bin_count; ++i) {
        const double level = static_cast<double>(i) / static_cast<double>(bin_count);
        q.breakpoints.push_back(mean + std_dev * boost::math::quantile(gauss, level));
    }
    return q;
}

template <typename Quantizer>
MarkovTransitionMatrix mtf_fit(std::span<const std::vector<double>> sequences,
                               const Quantizer& quantizer) {
    const std::size_t bins = quantizer.bin_count;
    if (bins == 0)
        throw std::invalid_argument("mtf_fit: unfitted quantizer");
    std::vector<double> counts(bins * bins, 0.0);
    std::size_t transitions = 0;
    for (const auto& seq : sequences) {
        if (seq.size() < 2)
            continue;
        std::size_t prev = quantizer.assign(seq[0]);
        for (std::size_t t = 1; t < seq.size(); ++t) {
            const std::size_t cur = quantizer.assign(seq[t]);
            counts[prev * bins + cur] += 1.0;
            prev = cur;
            ++transitions;
        }
    }
    if (transitions == 0)
        throw std::invalid_argument("mtf_fit: no transitions in training data");

    MarkovTransitionMatrix w;
    w.bin_count = bins;
    w.probs.assign(bins * bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < bins; ++j)
            row_sum += counts[i * bins + j];
        if (row_sum > 0.0)
            for (std::size_t j = 0; j < bins; ++j)
                w.probs[i * bins + j] = counts[i * bins + j] / row_sum;
    }
    return w;
}

template MarkovTransitionMatrix mtf_fit<SaxQuantizer>(std::span<const std::vector<double>>,
                                                      const SaxQuantizer&);
template MarkovTransitionMatrix mtf_fit<UniformQuantizer>(std::span<const std::vector<double>>,
                                                          const UniformQuantizer&);

template <typename Quantizer>
Matrix mtf_encode_matrix(std::span<const double> slice, const Quantizer& quantizer,
                         const MarkovTransitionMatrix& w) {
    if (quantizer.bin_count != w.bin_count)
        throw std::invalid_argument("mtf_encode: quantizer/matrix bin count mismatch");
    const std::size_t n = slice.size();
    std::vector<std::size_t> bin(n);
    for (std::size_t t = 0; t < n; ++t)
        bin[t] = quantizer.assign(slice[t]);
    Matrix out(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            out(a, b) = w.at(bin[a], bin[b]);
    return out;
}

template Matrix mtf_encode_matrix<SaxQuantizer>(std::span<const double>, const SaxQuantizer&,
                                                const MarkovTransitionMatrix&);
template Matrix mtf_encode_matrix<UniformQuantizer>(std::span<const double>,
                                                    const UniformQuantizer&,
                                                    const MarkovTransitionMatrix&);

namespace {

// Per-slice bounds for the original-variant scalers; constant slices
// are widened so the scaler stays defined.
ScalingBounds per_slice_bounds(std::span<const double> slice) {
    auto [mn, mx] = std::minmax_element(slice.begin(), slice.end());
    ScalingBounds b{*mn, *mx};
    if (!(b.lower < b.upper)) {
        b.lower -= 1e-6;
        b.upper += 1e-6;
    }
    return b;
}

}  // namespace

EncodedImage gaf_encode(std::span<const double> slice, const ScalingBounds& bounds,
                        EncoderVariant variant) {
    if (slice.empty())
        throw std::invalid_argument("gaf_encode: empty slice");
    ScalingBounds b = (variant == EncoderVariant::Original) ? per_slice_bounds(slice)
                                                            : bounds;
    b.validate();
    const std::size_t n = slice.size();
    std::vector<double> cos_phi(n), sin_phi(n);
    const double inv_range = 1.0 / b.range();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::clamp(slice[i], b.lower, b.upper);
        // ((x - UB) + (x - LB)) / (UB - LB), lands in [-1, 1]
        const double norm = std::clamp((2.0 * x - b.upper - b.lower) * inv_range, -1.0, 1.0);
        cos_phi[i] = norm;
        sin_phi[i] = std::sqrt(std::max(0.0, 1.0 - norm * norm));
    }
    EncodedImage img;
    img.kind = EncoderKind::Gaf;
    img.variant = variant;
    img.pixels = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            img.pixels(i, j) = cos_phi[i] * cos_phi[j] - sin_phi[i] * sin_phi[j];
    return img;
}

EncodedImage mtf_encode(std::span<const double> slice, const SaxQuantizer& quantizer,
                        const MarkovTransitionMatrix& w) {
    EncodedImage img;
    img.kind = EncoderKind::Mtf;
    img.variant = EncoderVariant::Modified;
    img.pixels = mtf_encode_matrix(slice, quantizer, w);
    return img;
}

EncodedImage mtf_encode_original(std::span<const double> slice, std::size_t bin_count) {
    if (slice.size() < 2)
        throw std::invalid_argument("mtf_encode_original: slice too short");
    const ScalingBounds b = per_slice_bounds(slice);
    UniformQuantizer q{bin_count, b.lower, b.upper};
    std::vector<std::vector<double>> one{std::vector<double>(slice.begin(), slice.end())};
    const MarkovTransitionMatrix w = mtf_fit<UniformQuantizer>(one, q);
    EncodedImage img;
    img.kind = EncoderKind::Mtf;
    img.variant = EncoderVariant::Original;
    img.pixels = mtf_encode_matrix(slice, q, w);
    return img;
}

EncodedImage rp_encode(std::span<const double> slice, EncoderVariant variant) {
    if (slice.empty())
        throw std::invalid_argument("rp_encode: empty slice");
    const std::size_t n = slice.size();
    double offset = 0.0;
    if (variant == EncoderVariant::Modified)
        offset = std::accumulate(slice.begin(), slice.end(), 0.0) / static_cast<double>(n);
    EncodedImage img;
    img.kind = EncoderKind::Rp;
    img.variant = variant;
    img.pixels = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            img.pixels(i, j) = std::abs(slice[i] - slice[j]) + offset;
    return img;
}

EncodedImage gs_encode(std::span<const double> slice, const ScalingBounds& bounds,
                       EncoderVariant variant, const GsConfig& cfg) {
    const std::size_t k = cfg.image_size;
    const std::size_t needed = cfg.head_skip + (k - 1) * cfg.stride + k + cfg.tail_skip;
    if (slice.size() != needed)
        throw std::invalid_argument("gs_encode: slice length " + std::to_string(slice.size()) +
                                    " does not match expected " + std::to_string(needed));
    ScalingBounds b = (variant == EncoderVariant::Original) ? per_slice_bounds(slice)
                                                            : bounds;
    b.validate();
    double scale = 255.0;
    bool round_pixels = true;
    switch (variant) {
    case EncoderVariant::Original:
    case EncoderVariant::GsP255:
        break;
    case EncoderVariant::GsP1:
        scale = 1.0;
        break;
    case EncoderVariant::GsMinMax:
        scale = 1.0;
        round_pixels = false;
        break;
    default:
        throw std::invalid_argument("gs_encode: unsupported variant");
    }
    EncodedImage img;
    img.kind = EncoderKind::Gs;
    img.variant = variant;
    img.pixels = Matrix(k, k);
    const double inv_range = 1.0 / b.range();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double x = std::clamp(slice[cfg.head_skip + i * cfg.stride + j], b.lower, b.upper);
            const double scaled = scale * (x - b.lower) * inv_range;
            // round() ties resolve half away from zero
            img.pixels(i, j) = round_pixels ? std::round(scaled) : scaled;
        }
    }
    return img;
}

}  // namespace ts2img
