#include "ts2img/checkpoint.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ts2img {

namespace {

constexpr char kMagic[8] = {'T', 'S', '2', 'I', 'M', 'G', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

json spec_to_json(const nn::LayerSpec& s) {
    return json{{"kind", nn::layer_kind_name(s.kind)},
                {"kernel", s.kernel},
                {"stride", s.stride},
                {"in_channels", s.in_channels},
                {"out_channels", s.out_channels},
                {"in_features", s.in_features},
                {"out_features", s.out_features},
                {"factor", s.factor},
                {"out_shape_hint", s.out_shape_hint},
                {"activation", s.activation == nn::Activation::LeakyRelu ? "leaky_relu" : "linear"},
                {"leaky_alpha", s.leaky_alpha}};
}

nn::LayerKind kind_from_name(const std::string& name) {
    using K = nn::LayerKind;
    for (K k : {K::Conv1D, K::Conv2D, K::AvgPool1D, K::MaxPool1D, K::Unfold, K::Dense, K::Fold,
                K::Upsample1D, K::TConv1D, K::TConv2D})
        if (nn::layer_kind_name(k) == name)
            return k;
    throw std::runtime_error("checkpoint: unknown layer kind '" + name + "'");
}

nn::LayerSpec spec_from_json(const json& j) {
    nn::LayerSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    s.kernel = j.at("kernel").get<std::size_t>();
    s.stride = j.at("stride").get<std::size_t>();
    s.in_channels = j.at("in_channels").get<std::size_t>();
    s.out_channels = j.at("out_channels").get<std::size_t>();
    s.in_features = j.at("in_features").get<std::size_t>();
    s.out_features = j.at("out_features").get<std::size_t>();
    s.factor = j.at("factor").get<std::size_t>();
    s.out_shape_hint = j.at("out_shape_hint").get<std::vector<std::size_t>>();
    s.activation = j.at("activation").get<std::string>() == "leaky_relu"
                       ? nn::Activation::LeakyRelu
                       : nn::Activation::Linear;
    s.leaky_alpha = j.at("leaky_alpha").get<double>();
    return s;
}

json config_to_json(const PipelineConfig& c) {
    return json{{"encoder", encoder_kind_name(c.encoder)},
                {"variant", encoder_variant_name(c.variant)},
                {"slice_len", c.slice_len},
                {"image_size", c.image_size},
                {"bounds_margin", c.bounds_margin},
                {"sax_bins", c.sax_bins},
                {"stft", {{"window_len", c.stft.window_len}, {"hop", c.stft.hop}}},
                {"cwt",
                 {{"num_scales", c.cwt.num_scales},
                  {"scale_exponent_step", c.cwt.scale_exponent_step},
                  {"pool_time", c.cwt.pool_time}}},
                {"gs",
                 {{"stride", c.gs.stride},
                  {"head_skip", c.gs.head_skip},
                  {"tail_skip", c.gs.tail_skip}}},
                {"conv1_channels", c.conv1_channels},
                {"conv2_channels", c.conv2_channels},
                {"conv3_channels", c.conv3_channels},
                {"bottleneck", c.bottleneck},
                {"leaky_alpha", c.leaky_alpha},
                {"pool_mode",
                 c.pool_mode == nn::NetworkConfig::PoolMode::Average ? "average" : "max"},
                {"train",
                 {{"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"lr", c.train.adam.lr},
                  {"beta1", c.train.adam.beta1},
                  {"beta2", c.train.adam.beta2},
                  {"epsilon", c.train.adam.epsilon}}},
                {"percentile", c.percentile},
                {"seed", c.seed},
                {"repetitions", c.repetitions},
                {"workers", c.workers}};
}

EncoderKind encoder_from_name(const std::string& name) {
    using E = EncoderKind;
    for (E e : {E::None, E::Gaf, E::Mtf, E::Rp, E::Gs, E::Sp, E::Sc})
        if (encoder_kind_name(e) == name)
            return e;
    throw std::runtime_error("checkpoint: unknown encoder '" + name + "'");
}

EncoderVariant variant_from_name(const std::string& name) {
    using V = EncoderVariant;
    for (V v : {V::Original, V::Modified, V::GsP255, V::GsP1, V::GsMinMax})
        if (encoder_variant_name(v) == name)
            return v;
    throw std::runtime_error("checkpoint: unknown variant '" + name + "'");
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    c.encoder = encoder_from_name(j.at("encoder").get<std::string>());
    c.variant = variant_from_name(j.at("variant").get<std::string>());
    c.slice_len = j.at("slice_len").get<std::size_t>();
    c.image_size = j.at("image_size").get<std::size_t>();
    c.bounds_margin = j.at("bounds_margin").get<double>();
    c.sax_bins = j.at("sax_bins").get<std::size_t>();
    c.stft.window_len = j.at("stft").at("window_len").get<std::size_t>();
    c.stft.hop = j.at("stft").at("hop").get<std::size_t>();
    c.cwt.num_scales = j.at("cwt").at("num_scales").get<std::size_t>();
    c.cwt.scale_exponent_step = j.at("cwt").at("scale_exponent_step").get<double>();
    c.cwt.pool_time = j.at("cwt").at("pool_time").get<std::size_t>();
    c.gs.stride = j.at("gs").at("stride").get<std::size_t>();
    c.gs.head_skip = j.at("gs").at("head_skip").get<std::size_t>();
    c.gs.tail_skip = j.at("gs").at("tail_skip").get<std::size_t>();
    c.conv1_channels = j.at("conv1_channels").get<std::size_t>();
    c.conv2_channels = j.at("conv2_channels").get<std::size_t>();
    c.conv3_channels = j.at("conv3_channels").get<std::size_t>();
    c.bottleneck = j.at("bottleneck").get<std::size_t>();
    c.leaky_alpha = j.at("leaky_alpha").get<double>();
    c.pool_mode = j.at("pool_mode").get<std::string>() == "max"
                      ? nn::NetworkConfig::PoolMode::Max
                      : nn::NetworkConfig::PoolMode::Average;
    c.train.epochs = j.at("train").at("epochs").get<std::size_t>();
    c.train.batch_size = j.at("train").at("batch_size").get<std::size_t>();
    c.train.adam.lr = j.at("train").at("lr").get<double>();
    c.train.adam.beta1 = j.at("train").at("beta1").get<double>();
    c.train.adam.beta2 = j.at("train").at("beta2").get<double>();
    c.train.adam.epsilon = j.at("train").at("epsilon").get<double>();
    c.percentile = j.at("percentile").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.repetitions = j.at("repetitions").get<std::size_t>();
    c.workers = j.at("workers").get<std::size_t>();
    c.train.seed = c.seed;
    return c;
}

void write_doubles(std::ofstream& out, const std::vector<double>& values) {
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count) {
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("checkpoint: truncated payload");
    return values;
}

}  // namespace

void save_checkpoint(const PipelineModel& model, const std::string& path) {
    json header;
    header["config"] = config_to_json(model.config);
    header["input_shape"] = model.network.input_shape();
    json layers = json::array();
    for (const auto& spec : model.network.specs())
        layers.push_back(spec_to_json(spec));
    header["layers"] = layers;
    header["threshold"] = {{"value", model.threshold.value},
                           {"percentile", model.threshold.percentile},
                           {"calibration_count", model.threshold.calibration_count}};
    header["fitted"] = {{"bounds", {{"lower", model.fitted.bounds.lower},
                                    {"upper", model.fitted.bounds.upper}}},
                        {"sax",
                         {{"bin_count", model.fitted.sax.bin_count},
                          {"train_mean", model.fitted.sax.train_mean},
                          {"train_std", model.fitted.sax.train_std}}},
                        {"mtf_bin_count", model.fitted.mtf.bin_count}};

    // Payload layout, all f64 LE: per-layer weights then bias, SAX
    // breakpoints, transition matrix.
    json blobs = json::array();
    for (std::size_t i = 0; i < model.network.layer_count(); ++i) {
        blobs.push_back({{"name", "w" + std::to_string(i)},
                         {"count", model.network.layer(i).weights().size()}});
        blobs.push_back(
            {{"name", "b" + std::to_string(i)}, {"count", model.network.layer(i).bias().size()}});
    }
    blobs.push_back({{"name", "sax_breakpoints"}, {"count", model.fitted.sax.breakpoints.size()}});
    blobs.push_back({{"name", "mtf_probs"}, {"count", model.fitted.mtf.probs.size()}});
    header["blobs"] = blobs;

    const std::string header_text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_checkpoint: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

    for (std::size_t i = 0; i < model.network.layer_count(); ++i) {
        write_doubles(out, model.network.layer(i).weights());
        write_doubles(out, model.network.layer(i).bias());
    }
    write_doubles(out, model.fitted.sax.breakpoints);
    write_doubles(out, model.fitted.mtf.probs);
    if (!out)
        throw std::runtime_error("save_checkpoint: write failed for " + path);
}

PipelineModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kVersion)
        throw std::runtime_error("load_checkpoint: unsupported version " + std::to_string(version));
    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (static_cast<std::uint64_t>(in.gcount()) != header_len)
        throw std::runtime_error("load_checkpoint: truncated header");
    const json header = json::parse(header_text);

    PipelineModel model;
    model.config = config_from_json(header.at("config"));
    std::vector<nn::LayerSpec> specs;
    for (const auto& j : header.at("layers"))
        specs.push_back(spec_from_json(j));
    model.network = nn::Network(std::move(specs),
                                header.at("input_shape").get<std::vector<std::size_t>>());
    model.threshold.value = header.at("threshold").at("value").get<double>();
    model.threshold.percentile = header.at("threshold").at("percentile").get<double>();
    model.threshold.calibration_count =
        header.at("threshold").at("calibration_count").get<std::size_t>();
    model.fitted.bounds.lower = header.at("fitted").at("bounds").at("lower").get<double>();
    model.fitted.bounds.upper = header.at("fitted").at("bounds").at("upper").get<double>();
    model.fitted.sax.bin_count = header.at("fitted").at("sax").at("bin_count").get<std::size_t>();
    model.fitted.sax.train_mean = header.at("fitted").at("sax").at("train_mean").get<double>();
    model.fitted.sax.train_std = header.at("fitted").at("sax").at("train_std").get<double>();
    model.fitted.mtf.bin_count = header.at("fitted").at("mtf_bin_count").get<std::size_t>();

    for (std::size_t i = 0; i < model.network.layer_count(); ++i) {
        model.network.layer(i).weights() =
            read_doubles(in, model.network.layer(i).weights().size());
        model.network.layer(i).bias() = read_doubles(in, model.network.layer(i).bias().size());
    }
    const std::size_t bp_count =
        model.fitted.sax.bin_count > 0 ? model.fitted.sax.bin_count - 1 : 0;
    model.fitted.sax.breakpoints = read_doubles(in, bp_count);
    model.fitted.mtf.probs =
        read_doubles(in, model.fitted.mtf.bin_count * model.fitted.mtf.bin_count);
    return model;
}

}  // namespace ts2img
