#include "ts2img/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ts2img/image_ops.hpp"

namespace ts2img {

void PipelineConfig::validate() const {
    if (slice_len == 0 || image_size == 0)
        throw std::invalid_argument("PipelineConfig: slice_len and image_size must be positive");
    if (encoder == EncoderKind::Gaf || encoder == EncoderKind::Mtf || encoder == EncoderKind::Rp)
        if (slice_len % image_size != 0)
            throw std::invalid_argument(
                "PipelineConfig: slice_len must be divisible by image_size for pooled encoders");
    if (!(percentile > 0.0 && percentile <= 100.0))
        throw std::invalid_argument("PipelineConfig: percentile must be in (0, 100]");
    if (bounds_margin < 1.0)
        throw std::invalid_argument("PipelineConfig: bounds margin must be >= 1");
}

nn::NetworkConfig network_config_for(const PipelineConfig& cfg) {
    nn::NetworkConfig net;
    // Raw-series path trains the 1-D architecture, every encoded path
    // the 2-D one.
    net.arch = cfg.encoder == EncoderKind::None ? nn::NetworkConfig::Arch::OneD
                                                : nn::NetworkConfig::Arch::TwoD;
    net.input_len = cfg.slice_len;
    net.image_size = cfg.image_size;
    net.conv1_channels = cfg.conv1_channels;
    net.conv2_channels = cfg.conv2_channels;
    net.conv3_channels = cfg.conv3_channels;
    net.bottleneck = cfg.bottleneck;
    net.leaky_alpha = cfg.leaky_alpha;
    net.pool_mode = cfg.pool_mode;
    return net;
}

FittedEncoders fit_encoders(const PipelineConfig& cfg, const std::vector<TimeSeries>& training) {
    cfg.validate();
    if (training.empty())
        throw std::invalid_argument("fit_encoders: empty training collection");
    FittedEncoders fitted;
    const bool needs_bounds = (cfg.encoder == EncoderKind::Gaf || cfg.encoder == EncoderKind::Gs) &&
                              cfg.variant != EncoderVariant::Original;
    if (needs_bounds)
        fitted.bounds = fit_bounds(training, cfg.bounds_margin);
    if (cfg.encoder == EncoderKind::Mtf && cfg.variant == EncoderVariant::Modified) {
        std::vector<double> all_values;
        std::size_t total = 0;
        for (const auto& s : training)
            total += s.values.size();
        all_values.reserve(total);
        for (const auto& s : training)
            all_values.insert(all_values.end(), s.values.begin(), s.values.end());
        fitted.sax = sax_fit(all_values, cfg.sax_bins);
        std::vector<std::vector<double>> sequences;
        sequences.reserve(training.size());
        for (const auto& s : training)
            sequences.push_back(s.values);
        fitted.mtf = mtf_fit<SaxQuantizer>(sequences, fitted.sax);
    }
    return fitted;
}

namespace {

nn::Tensor matrix_to_tensor(const Matrix& m) {
    nn::Tensor t;
    t.shape = {1, m.rows(), m.cols()};
    t.data = m.values();
    return t;
}

Matrix pool_to_size(const Matrix& m, std::size_t target) {
    if (m.rows() == target && m.cols() == target)
        return m;
    return average_pool(m, PoolSpec{m.rows() / target, m.cols() / target});
}

EncoderVariant gs_variant_for(EncoderVariant v) {
    // The pipeline-level "modified" GS defaults to the P=1 variant.
    return v == EncoderVariant::Modified ? EncoderVariant::GsP1 : v;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t used = std::min(workers, count);
    pool.reserve(used);
    for (std::size_t w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += used)
                fn(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

}  // namespace

std::vector<nn::Tensor> encode_series(const PipelineConfig& cfg, const FittedEncoders& fitted,
                                      const TimeSeries& series) {
    cfg.validate();
    if (cfg.encoder == EncoderKind::Sp) {
        StftConfig stft = cfg.stft;
        stft.image_size = cfg.image_size;
        const auto images = stft_spectrogram(series, stft);
        std::vector<nn::Tensor> out;
        out.reserve(images.size());
        for (const auto& img : images)
            out.push_back(matrix_to_tensor(img.pixels));
        return out;
    }

    const SliceGrid grid = slice_series(series, cfg.slice_len);
    std::vector<nn::Tensor> out(grid.count());
    parallel_for(grid.count(), cfg.workers, [&](std::size_t k) {
        const auto& slice = grid.slices[k];
        switch (cfg.encoder) {
        case EncoderKind::None: {
            nn::Tensor t;
            t.shape = {1, cfg.slice_len};
            t.data = slice;
            out[k] = std::move(t);
            break;
        }
        case EncoderKind::Gaf:
            out[k] = matrix_to_tensor(
                pool_to_size(gaf_encode(slice, fitted.bounds, cfg.variant).pixels, cfg.image_size));
            break;
        case EncoderKind::Mtf: {
            const EncodedImage img = cfg.variant == EncoderVariant::Modified
                                         ? mtf_encode(slice, fitted.sax, fitted.mtf)
                                         : mtf_encode_original(slice, cfg.sax_bins);
            out[k] = matrix_to_tensor(pool_to_size(img.pixels, cfg.image_size));
            break;
        }
        case EncoderKind::Rp:
            out[k] = matrix_to_tensor(
                pool_to_size(rp_encode(slice, cfg.variant).pixels, cfg.image_size));
            break;
        case EncoderKind::Gs: {
            GsConfig gs = cfg.gs;
            gs.image_size = cfg.image_size;
            out[k] = matrix_to_tensor(
                gs_encode(slice, fitted.bounds, gs_variant_for(cfg.variant), gs).pixels);
            break;
        }
        case EncoderKind::Sc: {
            CwtConfig cwt = cfg.cwt;
            cwt.image_size = cfg.image_size;
            cwt.num_scales = cfg.image_size;
            cwt.pool_time = cfg.slice_len / cfg.image_size;
            out[k] = matrix_to_tensor(cwt_scalogram(slice, cwt).pixels);
            break;
        }
        case EncoderKind::Sp:
            break;  // handled above
        }
    });
    return out;
}

PipelineModel train_pipeline(const PipelineConfig& cfg, const std::vector<TimeSeries>& training,
                             std::vector<double>* loss_history) {
    cfg.validate();
    PipelineModel model;
    model.config = cfg;
    model.fitted = fit_encoders(cfg, training);

    std::vector<nn::Tensor> inputs;
    for (const TimeSeries& series : training) {
        auto encoded = encode_series(cfg, model.fitted, series);
        std::move(encoded.begin(), encoded.end(), std::back_inserter(inputs));
    }
    if (inputs.empty())
        throw std::invalid_argument("train_pipeline: training set produced no model inputs");

    model.network = nn::build_network(network_config_for(cfg));
    model.network.init_params(cfg.seed);
    nn::TrainConfig train_cfg = cfg.train;
    train_cfg.seed = cfg.seed;
    const std::vector<double> history = nn::train(model.network, inputs, train_cfg);
    if (loss_history)
        *loss_history = history;

    std::vector<double> residuals(inputs.size());
    parallel_for(inputs.size(), cfg.workers, [&](std::size_t i) {
        const nn::Tensor rec = model.network.forward(inputs[i]);
        residuals[i] = residual(inputs[i].data, rec.data);
    });
    model.threshold = calibrate(residuals, cfg.percentile);
    return model;
}

DetectionReport detect(const PipelineModel& model, const std::vector<TimeSeries>& test,
                       const std::vector<std::string>& ids) {
    if (test.size() != ids.size())
        throw std::invalid_argument("detect: ids/series count mismatch");
    DetectionReport report;
    report.threshold = model.threshold;
    report.series.resize(test.size());
    parallel_for(test.size(), model.config.workers, [&](std::size_t s) {
        const auto inputs = encode_series(model.config, model.fitted, test[s]);
        std::vector<double> residuals(inputs.size());
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const nn::Tensor rec = model.network.forward(inputs[k]);
            residuals[k] = residual(inputs[k].data, rec.data);
        }
        report.series[s] = score_series(ids[s], residuals, model.threshold);
    });
    return report;
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::vector<TimeSeries>& training,
                            const std::vector<TimeSeries>& test,
                            const std::vector<std::string>& test_ids,
                            const std::optional<std::vector<bool>>& labels) {
    PipelineResult result;
    const PipelineModel model = train_pipeline(cfg, training, &result.loss_history);
    result.report = detect(model, test, test_ids);

    if (labels) {
        if (labels->size() != test.size())
            throw std::invalid_argument("run_pipeline: labels/series count mismatch");
        std::vector<ScoredLabel> scored(test.size());
        for (std::size_t i = 0; i < test.size(); ++i)
            scored[i] = {result.report.series[i].max_residual, (*labels)[i]};
        const ConfusionCounts counts = confusion(scored, model.threshold.value);
        EvalMetrics m;
        m.tpr = counts.tpr();
        m.fpr = counts.fpr();
        m.f1 = f1_score(counts.tp, counts.fp, counts.fn);
        const RocCurve roc = roc_auc(scored);
        m.auc = roc.auc;
        result.metrics = m;
        result.roc = roc;
    }
    return result;
}

BenchResult bench_encode(const PipelineConfig& cfg, const FittedEncoders& fitted,
                         std::size_t slice_count) {
    BenchResult bench;
    bench.slices = slice_count;
    if (slice_count == 0)
        return bench;

    // One synthetic series long enough for the requested slice count.
    TimeSeries series;
    series.values.resize(cfg.slice_len);
    for (std::size_t i = 0; i < series.values.size(); ++i)
        series.values[i] = std::sin(0.05 * static_cast<double>(i)) +
                           0.25 * std::sin(0.31 * static_cast<double>(i));

    const auto start = std::chrono::steady_clock::now();
    if (cfg.encoder == EncoderKind::Sp) {
        // One STFT image per "slice".
        TimeSeries stretched;
        stretched.values.reserve(cfg.stft.hop * cfg.image_size * slice_count);
        while (stretched.values.size() < cfg.stft.hop * cfg.image_size * slice_count)
            stretched.values.insert(stretched.values.end(), series.values.begin(),
                                    series.values.end());
        stretched.values.resize(cfg.stft.hop * cfg.image_size * slice_count);
        StftConfig stft = cfg.stft;
        stft.image_size = cfg.image_size;
        (void)stft_spectrogram(stretched, stft);
    } else {
        for (std::size_t i = 0; i < slice_count; ++i)
            (void)encode_series(cfg, fitted, series);
    }
    const auto end = std::chrono::steady_clock::now();
    bench.seconds = std::chrono::duration<double>(end - start).count();
    return bench;
}

}  // namespace ts2img
