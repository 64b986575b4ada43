#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ts2img/signal.hpp"

namespace ts2img {

// Stand-in benchmark data: healthy series are sums of sinusoids with
// random phases plus Gaussian noise; anomalous series carry one
// injected disturbance.
struct SyntheticSpec {
    std::size_t series_len = 6144;
    double sample_rate_hz = 1024.0;

    struct Tone {
        double amplitude;
        double freq_hz;
    };
    // whole cycles per 512-sample slice at fs = 1024, so every slice of
    // a series sees the tones at the same phase
    std::vector<Tone> tones = {{1.0, 12.0}, {0.6, 38.0}, {0.3, 110.0}};
    double noise_std = 0.03;
    double amplitude_jitter = 0.12;  // per-series relative amplitude spread

    enum class AnomalyKind { AmplitudeBurst, FrequencyShift, TransientSpike };
    struct Anomaly {
        AnomalyKind kind;
        double magnitude;
        std::size_t extent;  // samples
    };
    std::vector<Anomaly> anomalies = {
        {AnomalyKind::AmplitudeBurst, 1.5, 1024},
        {AnomalyKind::FrequencyShift, 0.5, 1024},
        {AnomalyKind::TransientSpike, 10.0, 64},
    };

    std::size_t train_healthy = 200;
    std::size_t test_healthy = 50;
    std::size_t test_anomalous = 50;
};

struct LabeledSeries {
    TimeSeries series;
    std::string id;
    bool anomalous = false;
};

struct SyntheticDataset {
    std::vector<LabeledSeries> train;  // healthy only
    std::vector<LabeledSeries> test;
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace ts2img
