#include "ts2img/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ts2img {

namespace {

TimeSeries healthy_series(const SyntheticSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    std::uniform_real_distribution<double> jitter(1.0 - spec.amplitude_jitter,
                                                  1.0 + spec.amplitude_jitter);

    struct ToneState {
        double amp, freq, phase;
    };
    std::vector<ToneState> tones;
    tones.reserve(spec.tones.size());
    for (const auto& t : spec.tones)
        tones.push_back({t.amplitude * jitter(rng), t.freq_hz, phase_dist(rng)});

    TimeSeries series;
    series.sample_rate_hz = spec.sample_rate_hz;
    series.values.resize(spec.series_len);
    const double dt = 1.0 / spec.sample_rate_hz;
    for (std::size_t n = 0; n < spec.series_len; ++n) {
        double v = 0.0;
        for (const auto& t : tones)
            v += t.amp * std::sin(2.0 * std::numbers::pi * t.freq * static_cast<double>(n) * dt +
                                  t.phase);
        series.values[n] = v + (spec.noise_std > 0.0 ? noise(rng) : 0.0);
    }
    return series;
}

void inject_anomaly(TimeSeries& series, const SyntheticSpec& spec,
                    const SyntheticSpec::Anomaly& anomaly, std::mt19937_64& rng) {
    const std::size_t n = series.values.size();
    if (anomaly.extent > n)
        throw std::invalid_argument("generate_synthetic: anomaly extent exceeds series length");
    std::uniform_int_distribution<std::size_t> start_dist(0, n - anomaly.extent);
    const std::size_t start = start_dist(rng);
    const double dt = 1.0 / spec.sample_rate_hz;

    switch (anomaly.kind) {
    case SyntheticSpec::AnomalyKind::AmplitudeBurst:
        for (std::size_t i = start; i < start + anomaly.extent; ++i)
            series.values[i] *= 1.0 + anomaly.magnitude;
        break;
    case SyntheticSpec::AnomalyKind::FrequencyShift: {
        // Overlay an extra tone shifted off the healthy carriers.
        const double base = spec.tones.empty() ? 50.0 : spec.tones.front().freq_hz;
        const double freq = base * (1.0 + anomaly.magnitude);
        const double amp = spec.tones.empty() ? 1.0 : spec.tones.front().amplitude;
        std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
        const double phase = phase_dist(rng);
        for (std::size_t i = start; i < start + anomaly.extent; ++i)
            series.values[i] += amp * std::sin(2.0 * std::numbers::pi * freq *
                                               static_cast<double>(i) * dt + phase);
        break;
    }
    case SyntheticSpec::AnomalyKind::TransientSpike: {
        // Decaying impulse of the given magnitude.
        for (std::size_t i = 0; i < anomaly.extent; ++i) {
            const double decay = std::exp(-static_cast<double>(i) /
                                          (static_cast<double>(anomaly.extent) / 4.0 + 1.0));
            series.values[start + i] += anomaly.magnitude * decay * (i % 2 == 0 ? 1.0 : -1.0);
        }
        break;
    }
    }
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.series_len == 0)
        throw std::invalid_argument("generate_synthetic: empty series length");
    std::mt19937_64 rng(seed);
    SyntheticDataset data;

    data.train.reserve(spec.train_healthy);
    for (std::size_t i = 0; i < spec.train_healthy; ++i) {
        LabeledSeries s;
        s.series = healthy_series(spec, rng);
        s.id = "train_" + std::to_string(i);
        data.train.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < spec.test_healthy; ++i) {
        LabeledSeries s;
        s.series = healthy_series(spec, rng);
        s.id = "test_h_" + std::to_string(i);
        data.test.push_back(std::move(s));
    }
    if (spec.test_anomalous > 0 && spec.anomalies.empty())
        throw std::invalid_argument("generate_synthetic: no anomaly kinds configured");
    for (std::size_t i = 0; i < spec.test_anomalous; ++i) {
        LabeledSeries s;
        s.series = healthy_series(spec, rng);
        s.id = "test_a_" + std::to_string(i);
        s.anomalous = true;
        inject_anomaly(s.series, spec, spec.anomalies[i % spec.anomalies.size()], rng);
        data.test.push_back(std::move(s));
    }
    return data;
}

}  // namespace ts2img
