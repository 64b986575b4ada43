#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ts2img/detector.hpp"
#include "ts2img/field_encoders.hpp"
#include "ts2img/matrix.hpp"
#include "ts2img/metrics.hpp"
#include "ts2img/nn.hpp"
#include "ts2img/signal.hpp"
#include "ts2img/spectral.hpp"

namespace ts2img {

struct PipelineConfig {
    EncoderKind encoder = EncoderKind::Sc;
    EncoderVariant variant = EncoderVariant::Modified;

    std::size_t slice_len = 512;
    std::size_t image_size = 64;
    double bounds_margin = 1.2;
    std::size_t sax_bins = 500;
    StftConfig stft;
    CwtConfig cwt;
    GsConfig gs;

    // Network widths; Table-1 defaults, shrinkable for desk-scale runs.
    std::size_t conv1_channels = 64;
    std::size_t conv2_channels = 128;
    std::size_t conv3_channels = 256;
    std::size_t bottleneck = 300;
    double leaky_alpha = 0.3;
    nn::NetworkConfig::PoolMode pool_mode = nn::NetworkConfig::PoolMode::Average;

    nn::TrainConfig train;
    double percentile = 99.0;
    std::uint64_t seed = 0;
    std::size_t repetitions = 5;
    std::size_t workers = 1;

    void validate() const;
};

// Training-set-derived state the encoders need at test time.
struct FittedEncoders {
    ScalingBounds bounds{0.0, 1.0};
    SaxQuantizer sax;
    MarkovTransitionMatrix mtf;
};

struct EvalMetrics {
    double tpr = 0.0;
    double fpr = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

struct PipelineResult {
    DetectionReport report;
    std::optional<EvalMetrics> metrics;
    std::optional<RocCurve> roc;
    std::vector<double> loss_history;
};

// A trained model plus everything needed to score new data.
struct PipelineModel {
    PipelineConfig config;
    FittedEncoders fitted;
    nn::Network network;
    Threshold threshold;
};

nn::NetworkConfig network_config_for(const PipelineConfig& cfg);

FittedEncoders fit_encoders(const PipelineConfig& cfg, const std::vector<TimeSeries>& training);

// All model inputs for one series: encoded 64x64 images for the image
// paths, raw slices for the no-encoding baseline. The image count per
// series follows from the encoder's own windowing.
std::vector<nn::Tensor> encode_series(const PipelineConfig& cfg, const FittedEncoders& fitted,
                                      const TimeSeries& series);

// slice -> encode -> train on healthy encodings -> calibrate tau.
PipelineModel train_pipeline(const PipelineConfig& cfg, const std::vector<TimeSeries>& training,
                             std::vector<double>* loss_history = nullptr);

// Scores each test series by its maximum slice residual.
DetectionReport detect(const PipelineModel& model, const std::vector<TimeSeries>& test,
                       const std::vector<std::string>& ids);

// Full run; labels[i] is the ground truth for test[i].
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<TimeSeries>& training,
                            const std::vector<TimeSeries>& test,
                            const std::vector<std::string>& test_ids,
                            const std::optional<std::vector<bool>>& labels);

// Wall-clock encoding benchmark; no correctness claim.
struct BenchResult {
    std::size_t slices = 0;
    double seconds = 0.0;
};
BenchResult bench_encode(const PipelineConfig& cfg, const FittedEncoders& fitted,
                         std::size_t slice_count);

}  // namespace ts2img
