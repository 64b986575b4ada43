#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ts2img/matrix.hpp"
#include "ts2img/signal.hpp"

namespace ts2img {

struct StftConfig {
    std::size_t window_len = 126;  // Hanning taper
    std::size_t hop = 8;
    std::size_t image_size = 64;   // frames per output image; also freq bins

    std::size_t freq_bins() const { return window_len / 2 + 1; }
    void validate() const;
};

struct CwtConfig {
    std::size_t num_scales = 64;
    double scale_exponent_step = 0.25;  // scale_j = 2^(j * step), j = 1..num_scales
    std::size_t pool_time = 8;
    std::size_t image_size = 64;

    std::vector<double> scales() const;
    void validate() const;
};

// Symmetric Hann taper of the given length.
std::vector<double> hanning_window(std::size_t len);

// Ricker (Mexican hat) wavelet sampled at integer offsets centred on 0.
std::vector<double> ricker(std::size_t points, double scale);

// Magnitude STFT over the whole series (tail zero-padded so exactly
// floor(N / hop) frames are produced), split along time into
// image_size-wide images. 61,440 samples -> 64 x 7,680 -> 120 images.
std::vector<EncodedImage> stft_spectrogram(const TimeSeries& series, const StftConfig& cfg);

// One row per scale: "same"-length zero-extension convolution of the
// slice with the scale's Ricker kernel, then average-pooled along time.
EncodedImage cwt_scalogram(std::span<const double> slice, const CwtConfig& cfg);

}  // namespace ts2img
