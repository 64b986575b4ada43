#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ts2img/matrix.hpp"
#include "ts2img/signal.hpp"

namespace ts2img {

// Gaussian-breakpoint bin assignment from the SAX family. Breakpoints
// are standard-normal quantiles at i/Q mapped through the training
// mean/std, so bin occupancy is roughly balanced on Gaussian data.
struct SaxQuantizer {
    std::size_t bin_count = 0;
    std::vector<double> breakpoints;  // bin_count - 1, strictly increasing
    double train_mean = 0.0;
    double train_std = 0.0;

    // Bin index in [0, bin_count). Out-of-range values land in the
    // nearest extreme bin.
    std::size_t assign(double value) const;
};

// Uniform-width binning over a fixed interval; used by the original
// MTF formulation, fitted per slice.
struct UniformQuantizer {
    std::size_t bin_count = 0;
    double lower = 0.0;
    double upper = 0.0;

    std::size_t assign(double value) const;
};

struct MarkovTransitionMatrix {
    std::size_t bin_count = 0;
    std::vector<double> probs;  // bin_count x bin_count, row-major

    double at(std::size_t i, std::size_t j) const { return probs[i * bin_count + j]; }
};

SaxQuantizer sax_fit(std::span<const double> training_values, std::size_t bin_count);

// Counts bin transitions over every two consecutive points of each
// sequence and row-normalises. Rows of unvisited bins stay all zero.
template <typename Quantizer>
MarkovTransitionMatrix mtf_fit(std::span<const std::vector<double>> sequences,
                               const Quantizer& quantizer);

template <typename Quantizer>
Matrix mtf_encode_matrix(std::span<const double> slice, const Quantizer& quantizer,
                         const MarkovTransitionMatrix& w);

EncodedImage gaf_encode(std::span<const double> slice, const ScalingBounds& bounds,
                        EncoderVariant variant);

// Modified variant: per-point lookup in a transition matrix fitted over
// the whole training set with SAX bins.
EncodedImage mtf_encode(std::span<const double> slice, const SaxQuantizer& quantizer,
                        const MarkovTransitionMatrix& w);

// Original variant: uniform bins and transition counts fitted on the
// slice itself.
EncodedImage mtf_encode_original(std::span<const double> slice, std::size_t bin_count);

EncodedImage rp_encode(std::span<const double> slice, EncoderVariant variant);

struct GsConfig {
    std::size_t image_size = 64;  // K
    std::size_t stride = 7;       // s
    std::size_t head_skip = 3;
    std::size_t tail_skip = 4;
};

EncodedImage gs_encode(std::span<const double> slice, const ScalingBounds& bounds,
                       EncoderVariant variant, const GsConfig& cfg = {});

}  // namespace ts2img
