#include "ts2img/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ts2img/image_ops.hpp"

namespace ts2img {

void StftConfig::validate() const {
    if (window_len == 0 || hop == 0 || image_size == 0)
        throw std::invalid_argument("StftConfig: window, hop and image size must be positive");
    if (freq_bins() != image_size)
        throw std::invalid_argument("StftConfig: floor(window/2)+1 must equal image_size");
}

void CwtConfig::validate() const {
    if (num_scales == 0 || pool_time == 0 || image_size == 0)
        throw std::invalid_argument("CwtConfig: scales, pooling and image size must be positive");
    if (scale_exponent_step <= 0.0)
        throw std::invalid_argument("CwtConfig: scale step must be positive");
}

std::vector<double> CwtConfig::scales() const {
    std::vector<double> out(num_scales);
    for (std::size_t j = 1; j <= num_scales; ++j)
        out[j - 1] = std::pow(2.0, scale_exponent_step * static_cast<double>(j));
    return out;
}

std::vector<double> hanning_window(std::size_t len) {
    std::vector<double> w(len);
    if (len == 1) {
        w[0] = 1.0;
        return w;
    }
    for (std::size_t n = 0; n < len; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(len - 1)));
    return w;
}

std::vector<double> ricker(std::size_t points, double scale) {
    if (points == 0)
        throw std::invalid_argument("ricker: need at least one point");
    if (scale <= 0.0)
        throw std::invalid_argument("ricker: scale must be positive");
    const double amp = 2.0 / (std::sqrt(3.0 * scale) * std::pow(std::numbers::pi, 0.25));
    std::vector<double> psi(points);
    const double half = (static_cast<double>(points) - 1.0) / 2.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) - half;
        const double u = t / scale;
        psi[k] = amp * (1.0 - u * u) * std::exp(-0.5 * u * u);
    }
    return psi;
}

std::vector<EncodedImage> stft_spectrogram(const TimeSeries& series, const StftConfig& cfg) {
    cfg.validate();
    series.validate();
    const std::size_t n = series.values.size();
    if (n < cfg.window_len)
        throw std::invalid_argument("stft_spectrogram: series shorter than one window");

    const std::size_t bins = cfg.freq_bins();
    const std::size_t frames = n / cfg.hop;
    const std::size_t win = cfg.window_len;
    const std::vector<double> taper = hanning_window(win);

    // Twiddle tables for the unnormalised forward DFT of length win.
    std::vector<double> cos_tab(bins * win), sin_tab(bins * win);
    for (std::size_t k = 0; k < bins; ++k) {
        for (std::size_t m = 0; m < win; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(m) / static_cast<double>(win);
            cos_tab[k * win + m] = std::cos(ang);
            sin_tab[k * win + m] = std::sin(ang);
        }
    }

    Matrix mag(bins, frames);
    std::vector<double> frame(win);
    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t start = t * cfg.hop;
        for (std::size_t m = 0; m < win; ++m) {
            const std::size_t idx = start + m;
            frame[m] = (idx < n ? series.values[idx] : 0.0) * taper[m];
        }
        for (std::size_t k = 0; k < bins; ++k) {
            double re = 0.0, im = 0.0;
            const double* ct = &cos_tab[k * win];
            const double* st = &sin_tab[k * win];
            for (std::size_t m = 0; m < win; ++m) {
                re += frame[m] * ct[m];
                im += frame[m] * st[m];
            }
            mag(k, t) = std::hypot(re, im);
        }
    }

    const std::size_t image_count = frames / cfg.image_size;
    std::vector<EncodedImage> images;
    images.reserve(image_count);
    for (std::size_t s = 0; s < image_count; ++s) {
        EncodedImage img;
        img.kind = EncoderKind::Sp;
        img.variant = EncoderVariant::Original;
        img.pixels = Matrix(bins, cfg.image_size);
        for (std::size_t k = 0; k < bins; ++k)
            for (std::size_t t = 0; t < cfg.image_size; ++t)
                img.pixels(k, t) = mag(k, s * cfg.image_size + t);
        images.push_back(std::move(img));
    }
    return images;
}

EncodedImage cwt_scalogram(std::span<const double> slice, const CwtConfig& cfg) {
    cfg.validate();
    const std::size_t n = slice.size();
    if (n == 0)
        throw std::invalid_argument("cwt_scalogram: empty slice");
    if (n % cfg.pool_time != 0)
        throw std::invalid_argument("cwt_scalogram: slice length not divisible by pooling factor");

    Matrix response(cfg.num_scales, n);
    const std::vector<double> scales = cfg.scales();
    for (std::size_t row = 0; row < cfg.num_scales; ++row) {
        const double a = scales[row];
        // Kernel support truncated; at the largest scales the kernel
        // would otherwise dwarf the slice.
        const auto half = static_cast<std::size_t>(
            std::min(std::ceil(10.0 * a), static_cast<double>(n)));
        const std::vector<double> kernel = ricker(2 * half + 1, a);
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            // zero-extension outside the slice
            const std::size_t k_lo = (t + half >= n) ? (t + half - n + 1) : 0;
            const std::size_t k_hi = std::min(2 * half, t + half);
            for (std::size_t k = k_lo; k <= k_hi; ++k)
                acc += kernel[k] * slice[t + half - k];
            response(row, t) = acc;
        }
    }

    EncodedImage img;
    img.kind = EncoderKind::Sc;
    img.variant = EncoderVariant::Original;
    img.pixels = average_pool(response, PoolSpec{1, cfg.pool_time});
    return img;
}

}  // namespace ts2img
