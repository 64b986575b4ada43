#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ts2img::nn {

struct Tensor {
    std::vector<std::size_t> shape;  // {c, len} for 1-D, {c, h, w} for 2-D, {n} for flat
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);

    std::size_t size() const { return data.size(); }
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

enum class Activation { Linear, LeakyRelu };

enum class LayerKind {
    Conv1D,
    Conv2D,
    AvgPool1D,
    MaxPool1D,
    Unfold,
    Dense,
    Fold,
    Upsample1D,
    TConv1D,
    TConv2D,
};

std::string layer_kind_name(LayerKind kind);

// Serializable description of one layer; enough to rebuild it from a
// checkpoint.
struct LayerSpec {
    LayerKind kind;
    std::size_t kernel = 0;
    std::size_t stride = 0;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t in_features = 0;   // Dense
    std::size_t out_features = 0;  // Dense
    std::size_t factor = 0;        // pooling / upsampling
    std::vector<std::size_t> out_shape_hint;  // Fold target, TConv pinned output
    Activation activation = Activation::Linear;
    double leaky_alpha = 0.3;
};

struct LayerCache {
    Tensor input;
    Tensor pre_act;
    std::vector<std::size_t> argmax;  // MaxPool only
};

class Layer {
public:
    explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
    virtual ~Layer() = default;

    const LayerSpec& spec() const { return spec_; }

    virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
    virtual void forward(const Tensor& in, Tensor& out, LayerCache& cache) const = 0;
    // grad_out is d(loss)/d(activation output); accumulates into the
    // layer's weight/bias gradient buffers and writes grad_in.
    virtual void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                          std::vector<double>& grad_w, std::vector<double>& grad_b) const = 0;

    std::vector<double>& weights() { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }

protected:
    double activate(double z) const;
    double activate_grad(double z) const;

    LayerSpec spec_;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

struct NetworkConfig {
    enum class Arch { OneD, TwoD };
    enum class PoolMode { Average, Max };

    Arch arch = Arch::TwoD;
    std::size_t input_len = 512;   // 1-D arch
    std::size_t image_size = 64;   // 2-D arch
    std::size_t conv1_channels = 64;
    std::size_t conv2_channels = 128;
    std::size_t conv3_channels = 256;  // 1-D arch only
    std::size_t bottleneck = 300;
    double leaky_alpha = 0.3;
    PoolMode pool_mode = PoolMode::Average;
};

class Network {
public:
    Network() = default;
    explicit Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape);

    void init_params(std::uint64_t seed);

    const std::vector<std::size_t>& input_shape() const { return input_shape_; }
    const std::vector<std::vector<std::size_t>>& shape_chain() const { return shape_chain_; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }

    struct Cache {
        std::vector<LayerCache> layers;
        Tensor output;
    };

    // Reconstruction of a single sample; deterministic.
    Tensor forward(const Tensor& input) const;
    void forward(const Tensor& input, Cache& cache) const;

    // Accumulates d(loss)/d(params) into grads given d(loss)/d(output).
    struct Gradients {
        std::vector<std::vector<double>> w;
        std::vector<std::vector<double>> b;
        void zero();
    };
    Gradients make_gradients() const;
    void backward(const Tensor& grad_output, const Cache& cache, Gradients& grads) const;

    std::size_t param_count() const;
    // Flat read/write access across every weight and bias, in layer order.
    double get_param(std::size_t flat_index) const;
    void set_param(std::size_t flat_index, double value);

    std::vector<LayerSpec> specs() const;

private:
    std::vector<std::unique_ptr<Layer>> layers_;
    std::vector<std::size_t> input_shape_;
    std::vector<std::vector<std::size_t>> shape_chain_;
};

// Assembles encoder + fully-connected block + exactly mirrored decoder.
// Throws if the mirrored decoder fails to restore the input shape.
Network build_network(const NetworkConfig& cfg);

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
    std::uint64_t t = 0;

    static AdamState make(const Network& net);
};

void adam_step(Network& net, const Network::Gradients& grads, AdamState& state,
               const AdamConfig& cfg);

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 200;
    std::uint64_t seed = 0;
    AdamConfig adam;
};

// MSE autoencoder training (mean over batch and elements) with
// per-epoch shuffling from the run seed. Returns the per-batch loss
// history, length epochs * ceil(n / batch_size).
std::vector<double> train(Network& net, const std::vector<Tensor>& dataset,
                          const TrainConfig& cfg);

}  // namespace ts2img::nn
