// Command-line front end: dataset generation, encoding to PNG, model
// training, threshold calibration, detection, evaluation and encoder
// benchmarking around the ts2img library.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ts2img/checkpoint.hpp"
#include "ts2img/image_ops.hpp"
#include "ts2img/io.hpp"
#include "ts2img/pipeline.hpp"
#include "ts2img/synthetic.hpp"

using namespace ts2img;
using nlohmann::json;

namespace {

EncoderKind encoder_from_name(const std::string& name) {
    using E = EncoderKind;
    for (E e : {E::None, E::Gaf, E::Mtf, E::Rp, E::Gs, E::Sp, E::Sc})
        if (encoder_kind_name(e) == name)
            return e;
    throw CLI::ValidationError("--encoder", "unknown encoder '" + name + "'");
}

EncoderVariant variant_from_name(const std::string& name) {
    using V = EncoderVariant;
    for (V v : {V::Original, V::Modified, V::GsP255, V::GsP1, V::GsMinMax})
        if (encoder_variant_name(v) == name)
            return v;
    throw CLI::ValidationError("--variant", "unknown variant '" + name + "'");
}

// Every key is optional; unspecified fields keep their defaults.
void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CLI::ValidationError("--config", "cannot read " + path);
    json j;
    in >> j;

    if (j.contains("encoder"))
        cfg.encoder = encoder_from_name(j["encoder"].get<std::string>());
    if (j.contains("variant"))
        cfg.variant = variant_from_name(j["variant"].get<std::string>());
    if (j.contains("slice_len"))
        cfg.slice_len = j["slice_len"].get<std::size_t>();
    if (j.contains("image_size"))
        cfg.image_size = j["image_size"].get<std::size_t>();
    if (j.contains("bounds_margin"))
        cfg.bounds_margin = j["bounds_margin"].get<double>();
    if (j.contains("sax_bins"))
        cfg.sax_bins = j["sax_bins"].get<std::size_t>();
    if (j.contains("stft")) {
        const auto& s = j["stft"];
        if (s.contains("window_len"))
            cfg.stft.window_len = s["window_len"].get<std::size_t>();
        if (s.contains("hop"))
            cfg.stft.hop = s["hop"].get<std::size_t>();
    }
    if (j.contains("cwt")) {
        const auto& c = j["cwt"];
        if (c.contains("num_scales"))
            cfg.cwt.num_scales = c["num_scales"].get<std::size_t>();
        if (c.contains("scale_exponent_step"))
            cfg.cwt.scale_exponent_step = c["scale_exponent_step"].get<double>();
        if (c.contains("pool_time"))
            cfg.cwt.pool_time = c["pool_time"].get<std::size_t>();
    }
    if (j.contains("gs")) {
        const auto& g = j["gs"];
        if (g.contains("stride"))
            cfg.gs.stride = g["stride"].get<std::size_t>();
        if (g.contains("head_skip"))
            cfg.gs.head_skip = g["head_skip"].get<std::size_t>();
        if (g.contains("tail_skip"))
            cfg.gs.tail_skip = g["tail_skip"].get<std::size_t>();
    }
    if (j.contains("conv1_channels"))
        cfg.conv1_channels = j["conv1_channels"].get<std::size_t>();
    if (j.contains("conv2_channels"))
        cfg.conv2_channels = j["conv2_channels"].get<std::size_t>();
    if (j.contains("conv3_channels"))
        cfg.conv3_channels = j["conv3_channels"].get<std::size_t>();
    if (j.contains("bottleneck"))
        cfg.bottleneck = j["bottleneck"].get<std::size_t>();
    if (j.contains("leaky_alpha"))
        cfg.leaky_alpha = j["leaky_alpha"].get<double>();
    if (j.contains("pool_mode"))
        cfg.pool_mode = j["pool_mode"].get<std::string>() == "max"
                            ? nn::NetworkConfig::PoolMode::Max
                            : nn::NetworkConfig::PoolMode::Average;
    if (j.contains("train")) {
        const auto& t = j["train"];
        if (t.contains("epochs"))
            cfg.train.epochs = t["epochs"].get<std::size_t>();
        if (t.contains("batch_size"))
            cfg.train.batch_size = t["batch_size"].get<std::size_t>();
        if (t.contains("lr"))
            cfg.train.adam.lr = t["lr"].get<double>();
    }
    if (j.contains("percentile"))
        cfg.percentile = j["percentile"].get<double>();
    if (j.contains("seed"))
        cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("repetitions"))
        cfg.repetitions = j["repetitions"].get<std::size_t>();
    if (j.contains("workers"))
        cfg.workers = j["workers"].get<std::size_t>();
}

// Shared --config/override flags attached to every pipeline subcommand.
struct ConfigCli {
    std::string config_path;
    std::string encoder, variant, pool_mode;
    std::optional<std::size_t> slice_len, image_size, sax_bins;
    std::optional<std::size_t> conv1, conv2, conv3, bottleneck;
    std::optional<std::size_t> epochs, batch_size, repetitions, workers;
    std::optional<double> lr, percentile, bounds_margin;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (all keys optional)");
        cmd->add_option("--encoder", encoder,
                        "none|gaf|mtf|rp|gs|sp|sc (overrides config)");
        cmd->add_option("--variant", variant, "original|modified|p255|p1|minmax");
        cmd->add_option("--slice-len", slice_len, "samples per slice");
        cmd->add_option("--image-size", image_size, "encoded image side length");
        cmd->add_option("--sax-bins", sax_bins, "quantile bins for the transition field");
        cmd->add_option("--bounds-margin", bounds_margin, "training bounds margin");
        cmd->add_option("--conv1", conv1, "first conv channels");
        cmd->add_option("--conv2", conv2, "second conv channels");
        cmd->add_option("--conv3", conv3, "third conv channels (1-D path)");
        cmd->add_option("--bottleneck", bottleneck, "dense bottleneck width");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--batch-size", batch_size, "training batch size");
        cmd->add_option("--lr", lr, "Adam learning rate");
        cmd->add_option("--percentile", percentile, "calibration percentile");
        cmd->add_option("--seed", seed, "run seed");
        cmd->add_option("--repetitions", repetitions, "evaluate: number of seeded runs");
        cmd->add_option("--workers", workers,
                        "encoding worker threads (env TS2IMG_WORKERS overrides)");
    }

    PipelineConfig build() const {
        PipelineConfig cfg;
        if (!config_path.empty())
            apply_config_file(cfg, config_path);
        if (!encoder.empty())
            cfg.encoder = encoder_from_name(encoder);
        if (!variant.empty())
            cfg.variant = variant_from_name(variant);
        if (slice_len)
            cfg.slice_len = *slice_len;
        if (image_size)
            cfg.image_size = *image_size;
        if (sax_bins)
            cfg.sax_bins = *sax_bins;
        if (bounds_margin)
            cfg.bounds_margin = *bounds_margin;
        if (conv1)
            cfg.conv1_channels = *conv1;
        if (conv2)
            cfg.conv2_channels = *conv2;
        if (conv3)
            cfg.conv3_channels = *conv3;
        if (bottleneck)
            cfg.bottleneck = *bottleneck;
        if (epochs)
            cfg.train.epochs = *epochs;
        if (batch_size)
            cfg.train.batch_size = *batch_size;
        if (lr)
            cfg.train.adam.lr = *lr;
        if (percentile)
            cfg.percentile = *percentile;
        if (seed) {
            cfg.seed = *seed;
            cfg.train.seed = *seed;
        } else {
            cfg.train.seed = cfg.seed;
        }
        if (repetitions)
            cfg.repetitions = *repetitions;
        if (workers)
            cfg.workers = *workers;
        if (const char* env = std::getenv("TS2IMG_WORKERS"))
            cfg.workers = static_cast<std::size_t>(std::stoul(env));
        cfg.validate();
        return cfg;
    }
};

io::SeriesFormat format_for(const std::string& path) {
    return path.ends_with(".f32") || path.ends_with(".bin") ? io::SeriesFormat::BinaryF32
                                                            : io::SeriesFormat::Csv;
}

std::vector<std::string> index_ids(std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = std::to_string(i);
    return ids;
}

void write_images(const PipelineConfig& cfg, const FittedEncoders& fitted,
                  const std::vector<TimeSeries>& series, const std::string& out_dir,
                  std::size_t only_series, bool single) {
    std::filesystem::create_directories(out_dir);
    const std::string tag = std::string(encoder_kind_name(cfg.encoder));
    std::size_t written = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        if (single && s != only_series)
            continue;
        const auto tensors = encode_series(cfg, fitted, series[s]);
        for (std::size_t t = 0; t < tensors.size(); ++t) {
            const auto& shape = tensors[t].shape;
            const std::size_t rows = shape.size() == 3 ? shape[1] : 1;
            const std::size_t cols = shape.back();
            Matrix img(rows, cols);
            img.values() = tensors[t].data;
            const std::string name = std::to_string(s) + "_" + std::to_string(t) + "_" +
                                     tag + ".png";
            write_png_gray(minmax_stretch(img),
                           (std::filesystem::path(out_dir) / name).string());
            ++written;
        }
    }
    std::cout << "wrote " << written << " images to " << out_dir << "\n";
}

int run_generate(const std::string& out_dir, std::uint64_t seed, SyntheticSpec spec) {
    std::filesystem::create_directories(out_dir);
    const SyntheticDataset data = generate_synthetic(spec, seed);
    const std::filesystem::path dir(out_dir);

    std::vector<TimeSeries> train;
    for (const auto& l : data.train)
        train.push_back(l.series);
    io::write_series_csv((dir / "train.csv").string(), train);

    std::vector<TimeSeries> test;
    std::vector<std::pair<std::string, bool>> labels;
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        test.push_back(data.test[i].series);
        labels.emplace_back(std::to_string(i), data.test[i].anomalous);
    }
    io::write_series_csv((dir / "test.csv").string(), test);
    io::write_labels_csv((dir / "labels.csv").string(), labels);

    std::cout << "wrote " << train.size() << " training and " << test.size()
              << " test series to " << out_dir << "\n";
    return 0;
}

int run_train(const PipelineConfig& cfg, const std::string& train_path,
              const std::string& model_path, const std::string& loss_path) {
    const auto training = io::read_series(train_path, format_for(train_path));
    std::vector<double> history;
    const PipelineModel model = train_pipeline(cfg, training, &history);
    save_checkpoint(model, model_path);
    if (!loss_path.empty()) {
        std::ofstream out(loss_path);
        out << "batch,loss\n";
        for (std::size_t i = 0; i < history.size(); ++i)
            out << i << "," << history[i] << "\n";
    }
    std::cout << "trained on " << training.size() << " series; threshold "
              << model.threshold.value << " (p" << model.threshold.percentile << " of "
              << model.threshold.calibration_count << " residuals); saved to "
              << model_path << "\n";
    return 0;
}

int run_calibrate(const std::string& model_path, const std::string& data_path,
                  std::optional<double> percentile) {
    PipelineModel model = load_checkpoint(model_path);
    const auto healthy = io::read_series(data_path, format_for(data_path));
    if (percentile)
        model.config.percentile = *percentile;

    std::vector<double> residuals;
    for (const auto& series : healthy) {
        const auto tensors = encode_series(model.config, model.fitted, series);
        for (const auto& t : tensors) {
            const nn::Tensor rec = model.network.forward(t);
            residuals.push_back(residual(t.data, rec.data));
        }
    }
    model.threshold = calibrate(residuals, model.config.percentile);
    save_checkpoint(model, model_path);
    std::cout << "recalibrated threshold " << model.threshold.value << " (p"
              << model.threshold.percentile << " of " << residuals.size()
              << " residuals)\n";
    return 0;
}

int run_detect(const std::string& model_path, const std::string& data_path,
               const std::string& report_path) {
    const PipelineModel model = load_checkpoint(model_path);
    const auto test = io::read_series(data_path, format_for(data_path));
    const DetectionReport report = detect(model, test, index_ids(test.size()));
    io::write_report_csv(report_path, report);
    std::size_t flagged = 0;
    for (const auto& s : report.series)
        flagged += s.anomalous ? 1 : 0;
    std::cout << flagged << "/" << report.series.size() << " series flagged; report in "
              << report_path << "\n";
    return 0;
}

int run_evaluate(const PipelineConfig& base, const std::string& train_path,
                 const std::string& test_path, const std::string& labels_path,
                 const std::string& out_dir) {
    const auto training = io::read_series(train_path, format_for(train_path));
    const auto test = io::read_series(test_path, format_for(test_path));
    const auto label_map = io::read_labels_csv(labels_path);
    const auto ids = index_ids(test.size());
    std::vector<bool> labels;
    for (const auto& id : ids) {
        const auto it = label_map.find(id);
        if (it == label_map.end())
            throw std::runtime_error("evaluate: no label for series " + id);
        labels.push_back(it->second);
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    std::vector<EvalMetrics> all;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(base.repetitions, 1); ++rep) {
        PipelineConfig cfg = base;
        cfg.seed = base.seed + rep;
        cfg.train.seed = cfg.seed;
        const PipelineResult result = run_pipeline(cfg, training, test, ids, labels);
        all.push_back(*result.metrics);
        if (rep == 0) {
            io::write_report_csv((dir / "report.csv").string(), result.report);
            io::write_roc_csv((dir / "roc.csv").string(), *result.roc);
            io::write_metrics_json((dir / "metrics.json").string(), result.metrics->tpr,
                                   result.metrics->fpr, result.metrics->f1,
                                   result.metrics->auc);
        }
        std::cout << "run " << rep << ": auc " << result.metrics->auc << " f1 "
                  << result.metrics->f1 << " tpr " << result.metrics->tpr << " fpr "
                  << result.metrics->fpr << "\n";
    }

    auto mean_std = [&](auto pick) {
        double mean = 0.0;
        for (const auto& m : all)
            mean += pick(m);
        mean /= static_cast<double>(all.size());
        double var = 0.0;
        for (const auto& m : all) {
            const double d = pick(m) - mean;
            var += d * d;
        }
        var /= static_cast<double>(all.size());
        return std::pair{mean, std::sqrt(var)};
    };
    const auto [auc_m, auc_s] = mean_std([](const EvalMetrics& m) { return m.auc; });
    const auto [f1_m, f1_s] = mean_std([](const EvalMetrics& m) { return m.f1; });
    std::cout << "over " << all.size() << " runs: auc " << auc_m << " +/- " << auc_s
              << ", f1 " << f1_m << " +/- " << f1_s << "\n";
    std::cout << "outputs in " << out_dir << "\n";
    return 0;
}

int run_bench(const PipelineConfig& cfg, const std::string& train_path,
              std::size_t slices) {
    std::vector<TimeSeries> fit_data;
    if (!train_path.empty()) {
        fit_data = io::read_series(train_path, format_for(train_path));
    } else {
        SyntheticSpec spec;
        spec.train_healthy = 4;
        spec.test_healthy = 0;
        spec.test_anomalous = 0;
        for (const auto& l : generate_synthetic(spec, cfg.seed).train)
            fit_data.push_back(l.series);
    }
    const FittedEncoders fitted = fit_encoders(cfg, fit_data);
    const BenchResult r = bench_encode(cfg, fitted, slices);
    std::cout << encoder_kind_name(cfg.encoder) << "/" << encoder_variant_name(cfg.variant)
              << ": " << r.slices << " slices in " << r.seconds << " s";
    if (r.seconds > 0.0)
        std::cout << " (" << static_cast<double>(r.slices) / r.seconds << " slices/s)";
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time series to image anomaly detection pipeline"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "write a synthetic benchmark dataset");
    std::string gen_out = "data";
    std::uint64_t gen_seed = 0;
    SyntheticSpec gen_spec;
    generate->add_option("--out-dir", gen_out, "output directory");
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("--length", gen_spec.series_len, "samples per series");
    generate->add_option("--train-count", gen_spec.train_healthy, "healthy training series");
    generate->add_option("--test-healthy", gen_spec.test_healthy, "healthy test series");
    generate->add_option("--test-anomalous", gen_spec.test_anomalous, "anomalous test series");
    generate->add_option("--noise-std", gen_spec.noise_std, "additive noise level");

    // encode
    auto* encode = app.add_subcommand("encode", "encode every series to PNG images");
    ConfigCli encode_cfg;
    encode_cfg.attach(encode);
    std::string enc_input, enc_out = "images";
    encode->add_option("--input", enc_input, "series file (csv or .f32)")->required();
    encode->add_option("--out-dir", enc_out, "output directory");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model on healthy series");
    ConfigCli train_cfg;
    train_cfg.attach(train_cmd);
    std::string train_data, train_model = "model.bin", train_loss;
    train_cmd->add_option("--train", train_data, "healthy training series")->required();
    train_cmd->add_option("--model", train_model, "checkpoint output path");
    train_cmd->add_option("--loss-out", train_loss, "per-batch loss history CSV");

    // calibrate
    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "refit the threshold of a saved model");
    std::string cal_model, cal_data;
    std::optional<double> cal_percentile;
    calibrate_cmd->add_option("--model", cal_model, "checkpoint path")->required();
    calibrate_cmd->add_option("--data", cal_data, "healthy series")->required();
    calibrate_cmd->add_option("--percentile", cal_percentile, "new percentile");

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "score series with a saved model");
    std::string det_model, det_data, det_report = "report.csv";
    detect_cmd->add_option("--model", det_model, "checkpoint path")->required();
    detect_cmd->add_option("--data", det_data, "series to score")->required();
    detect_cmd->add_option("--report", det_report, "report CSV output");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "train + score + metrics");
    ConfigCli eval_cfg;
    eval_cfg.attach(evaluate);
    std::string ev_train, ev_test, ev_labels, ev_out = "eval";
    evaluate->add_option("--train", ev_train, "healthy training series")->required();
    evaluate->add_option("--test", ev_test, "labeled test series")->required();
    evaluate->add_option("--labels", ev_labels, "labels CSV")->required();
    evaluate->add_option("--out-dir", ev_out, "output directory");

    // render
    auto* render = app.add_subcommand("render", "encode one series to PNG images");
    ConfigCli render_cfg;
    render_cfg.attach(render);
    std::string ren_input, ren_out = "images";
    std::size_t ren_series = 0;
    render->add_option("--input", ren_input, "series file")->required();
    render->add_option("--series", ren_series, "series index to render");
    render->add_option("--out-dir", ren_out, "output directory");

    // bench
    auto* bench = app.add_subcommand("bench", "time the configured encoder");
    ConfigCli bench_cfg;
    bench_cfg.attach(bench);
    std::string bench_train;
    std::size_t bench_slices = 10000;
    bench->add_option("--train", bench_train, "series for encoder fitting (optional)");
    bench->add_option("--slices", bench_slices, "number of slices to encode");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate)
            return run_generate(gen_out, gen_seed, gen_spec);
        if (*encode) {
            const PipelineConfig cfg = encode_cfg.build();
            const auto series = io::read_series(enc_input, format_for(enc_input));
            const FittedEncoders fitted = fit_encoders(cfg, series);
            write_images(cfg, fitted, series, enc_out, 0, false);
            return 0;
        }
        if (*train_cmd)
            return run_train(train_cfg.build(), train_data, train_model, train_loss);
        if (*calibrate_cmd)
            return run_calibrate(cal_model, cal_data, cal_percentile);
        if (*detect_cmd)
            return run_detect(det_model, det_data, det_report);
        if (*evaluate)
            return run_evaluate(eval_cfg.build(), ev_train, ev_test, ev_labels, ev_out);
        if (*render) {
            const PipelineConfig cfg = render_cfg.build();
            const auto series = io::read_series(ren_input, format_for(ren_input));
            if (ren_series >= series.size())
                throw std::runtime_error("render: series index out of range");
            const FittedEncoders fitted = fit_encoders(cfg, series);
            write_images(cfg, fitted, series, ren_out, ren_series, true);
            return 0;
        }
        if (*bench)
            return run_bench(bench_cfg.build(), bench_train, bench_slices);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
