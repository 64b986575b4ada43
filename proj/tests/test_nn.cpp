#include <doctest.h>

#include <cmath>
#include <random>

#include "ts2img/nn.hpp"

using namespace ts2img::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor t(std::move(shape));
    for (double& v : t.data)
        v = dist(rng);
    return t;
}

double mse_loss(const Network& net, const Tensor& input) {
    const Tensor out = net.forward(input);
    double loss = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out.data[i] - input.data[i];
        loss += d * d;
    }
    return loss / static_cast<double>(out.size());
}

// Central finite differences on every parameter vs. the analytic path.
double max_gradient_error(Network& net, const Tensor& input, double h = 1e-4) {
    Network::Cache cache;
    net.forward(input, cache);
    Tensor grad_out;
    grad_out.shape = cache.output.shape;
    grad_out.data.resize(cache.output.size());
    const double scale = 2.0 / static_cast<double>(cache.output.size());
    for (std::size_t i = 0; i < cache.output.size(); ++i)
        grad_out.data[i] = scale * (cache.output.data[i] - input.data[i]);
    Network::Gradients grads = net.make_gradients();
    net.backward(grad_out, cache, grads);

    std::vector<double> analytic;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        analytic.insert(analytic.end(), grads.w[l].begin(), grads.w[l].end());
        analytic.insert(analytic.end(), grads.b[l].begin(), grads.b[l].end());
    }

    auto central = [&](std::size_t p, double step) {
        const double original = net.get_param(p);
        net.set_param(p, original + step);
        const double plus = mse_loss(net, input);
        net.set_param(p, original - step);
        const double minus = mse_loss(net, input);
        net.set_param(p, original);
        return (plus - minus) / (2.0 * step);
    };
    auto rel_err = [&](double numeric, double a) {
        return std::abs(numeric - a) / std::max({std::abs(numeric), std::abs(a), 1e-6});
    };

    double worst = 0.0;
    for (std::size_t p = 0; p < net.param_count(); ++p) {
        double err = rel_err(central(p, h), analytic[p]);
        // a leaky-relu kink inside +/-h invalidates the estimate itself;
        // retry with a smaller step before blaming the analytic gradient
        if (err > 1e-4)
            err = rel_err(central(p, h / 10.0), analytic[p]);
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace

TEST_CASE("1-D architecture reproduces the published shape chain") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::OneD;
    cfg.input_len = 512;
    const Network net = build_network(cfg);
    const auto& chain = net.shape_chain();
    const std::vector<std::vector<std::size_t>> expected{
        {1, 512},  {64, 128}, {64, 64},   {128, 32}, {128, 16}, {256, 8},
        {256, 4},  {1024},    {300},      {1024},    {256, 4},  {256, 8},
        {128, 16}, {128, 32}, {64, 64},   {64, 128}, {1, 512}};
    REQUIRE(chain.size() == expected.size());
    for (std::size_t i = 0; i < chain.size(); ++i)
        CHECK(chain[i] == expected[i]);
    CHECK(chain.back() == net.input_shape());
}

TEST_CASE("2-D architecture reproduces the published shape chain") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::TwoD;
    cfg.image_size = 64;
    const Network net = build_network(cfg);
    const auto& chain = net.shape_chain();
    const std::vector<std::vector<std::size_t>> expected{
        {1, 64, 64}, {64, 32, 32}, {128, 16, 16}, {32768},
        {300},       {32768},      {128, 16, 16}, {64, 32, 32}, {1, 64, 64}};
    REQUIRE(chain.size() == expected.size());
    for (std::size_t i = 0; i < chain.size(); ++i)
        CHECK(chain[i] == expected[i]);
}

TEST_CASE("forward with zero parameters reconstructs zero") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::TwoD;
    cfg.image_size = 8;
    cfg.conv1_channels = 2;
    cfg.conv2_channels = 3;
    cfg.bottleneck = 4;
    Network net = build_network(cfg);  // params default to zero
    std::mt19937_64 rng(1);
    const Tensor in = random_tensor({1, 8, 8}, rng);
    const Tensor out = net.forward(in);
    for (double v : out.data)
        CHECK(v == 0.0);
}

TEST_CASE("forward is deterministic") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::OneD;
    cfg.input_len = 128;
    cfg.conv1_channels = 3;
    cfg.conv2_channels = 4;
    cfg.conv3_channels = 5;
    cfg.bottleneck = 6;
    Network net = build_network(cfg);
    net.init_params(99);
    std::mt19937_64 rng(2);
    const Tensor in = random_tensor({1, 128}, rng);
    const Tensor a = net.forward(in);
    const Tensor b = net.forward(in);
    CHECK(a.data == b.data);
}

TEST_CASE("single 1x1 conv reproduces w*x + b per pixel") {
    LayerSpec spec;
    spec.kind = LayerKind::Conv2D;
    spec.kernel = 1;
    spec.stride = 1;
    spec.in_channels = 1;
    spec.out_channels = 1;
    spec.activation = Activation::Linear;
    Network net({spec}, {1, 3, 3});
    net.layer(0).weights()[0] = 2.5;
    net.layer(0).bias()[0] = 0.25;
    std::mt19937_64 rng(3);
    const Tensor in = random_tensor({1, 3, 3}, rng);
    const Tensor out = net.forward(in);
    for (std::size_t i = 0; i < in.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(2.5 * in.data[i] + 0.25));
}

TEST_CASE("analytic gradients match finite differences on tiny networks") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        NetworkConfig cfg;
        if (trial % 2 == 0) {
            cfg.arch = NetworkConfig::Arch::OneD;
            cfg.input_len = 128;
            cfg.conv1_channels = 2;
            cfg.conv2_channels = 3;
            cfg.conv3_channels = 2;
            cfg.bottleneck = 3;
            cfg.pool_mode = trial == 0 ? NetworkConfig::PoolMode::Average
                                       : NetworkConfig::PoolMode::Max;
        } else {
            cfg.arch = NetworkConfig::Arch::TwoD;
            cfg.image_size = 8;
            cfg.conv1_channels = 2;
            cfg.conv2_channels = 2;
            cfg.bottleneck = 3;
        }
        Network net = build_network(cfg);
        net.init_params(1000 + static_cast<std::uint64_t>(trial));
        const Tensor in = random_tensor(net.input_shape(), rng);
        CHECK(max_gradient_error(net, in) <= 1e-4);
    }
}

TEST_CASE("gradient of output bias vanishes at a perfect reconstruction") {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = 4;
    spec.out_features = 4;
    spec.activation = Activation::Linear;
    Network net({spec}, {4});
    for (std::size_t i = 0; i < 4; ++i)
        net.layer(0).weights()[i * 4 + i] = 1.0;  // identity

    std::mt19937_64 rng(5);
    const Tensor in = random_tensor({4}, rng);
    Network::Cache cache;
    net.forward(in, cache);
    Tensor grad_out;
    grad_out.shape = {4};
    grad_out.data.resize(4);
    for (std::size_t i = 0; i < 4; ++i)
        grad_out.data[i] = 2.0 * (cache.output.data[i] - in.data[i]);
    Network::Gradients grads = net.make_gradients();
    net.backward(grad_out, cache, grads);
    for (double g : grads.b[0])
        CHECK(g == doctest::Approx(0.0));
}

TEST_CASE("leaky relu derivative is 1 for positive, alpha otherwise") {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = 1;
    spec.out_features = 1;
    spec.activation = Activation::LeakyRelu;
    spec.leaky_alpha = 0.3;
    Network net({spec}, {1});
    net.layer(0).weights()[0] = 1.0;

    for (double x : {2.0, -2.0}) {
        Tensor in;
        in.shape = {1};
        in.data = {x};
        Network::Cache cache;
        net.forward(in, cache);
        CHECK(cache.output.data[0] == doctest::Approx(x > 0 ? x : 0.3 * x));
        Tensor grad_out;
        grad_out.shape = {1};
        grad_out.data = {1.0};
        Network::Gradients grads = net.make_gradients();
        net.backward(grad_out, cache, grads);
        CHECK(grads.w[0][0] == doctest::Approx(x * (x > 0 ? 1.0 : 0.3)));
    }
}

TEST_CASE("adam first step moves by about -lr * sign(g)") {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = 1;
    spec.out_features = 2;
    spec.activation = Activation::Linear;
    Network net({spec}, {1});
    net.layer(0).weights() = {0.5, -0.5};

    Network::Gradients grads = net.make_gradients();
    grads.w[0] = {3.0, -0.01};
    AdamState state = AdamState::make(net);
    AdamConfig cfg;
    adam_step(net, grads, state, cfg);
    CHECK(state.t == 1);
    CHECK(net.layer(0).weights()[0] == doctest::Approx(0.5 - cfg.lr).epsilon(1e-4));
    CHECK(net.layer(0).weights()[1] == doctest::Approx(-0.5 + cfg.lr).epsilon(1e-4));
}

TEST_CASE("adam leaves parameters unchanged on zero gradient") {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = 2;
    spec.out_features = 2;
    spec.activation = Activation::Linear;
    Network net({spec}, {2});
    net.init_params(7);
    const std::vector<double> before = net.layer(0).weights();
    Network::Gradients grads = net.make_gradients();
    AdamState state = AdamState::make(net);
    adam_step(net, grads, state, AdamConfig{});
    CHECK(net.layer(0).weights() == before);
    CHECK(state.t == 1);
}

TEST_CASE("duplicating a sample with mean reduction leaves gradients unchanged") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::TwoD;
    cfg.image_size = 4;
    cfg.conv1_channels = 2;
    cfg.conv2_channels = 2;
    cfg.bottleneck = 2;
    Network net = build_network(cfg);
    net.init_params(11);
    std::mt19937_64 rng(12);
    const Tensor sample = random_tensor(net.input_shape(), rng);

    auto batch_grads = [&](std::size_t copies) {
        Network::Gradients grads = net.make_gradients();
        Network::Cache cache;
        for (std::size_t c = 0; c < copies; ++c) {
            net.forward(sample, cache);
            Tensor grad_out;
            grad_out.shape = cache.output.shape;
            grad_out.data.resize(cache.output.size());
            const double scale =
                2.0 / (static_cast<double>(copies) * static_cast<double>(sample.size()));
            for (std::size_t i = 0; i < sample.size(); ++i)
                grad_out.data[i] = scale * (cache.output.data[i] - sample.data[i]);
            net.backward(grad_out, cache, grads);
        }
        return grads;
    };

    const auto once = batch_grads(1);
    const auto twice = batch_grads(2);
    for (std::size_t l = 0; l < net.layer_count(); ++l)
        for (std::size_t i = 0; i < once.w[l].size(); ++i)
            CHECK(twice.w[l][i] == doctest::Approx(once.w[l][i]).epsilon(1e-12));
}

TEST_CASE("training overfits a single repeated input") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::TwoD;
    cfg.image_size = 8;
    cfg.conv1_channels = 4;
    cfg.conv2_channels = 4;
    cfg.bottleneck = 16;
    Network net = build_network(cfg);
    net.init_params(21);

    std::mt19937_64 rng(22);
    const Tensor sample = random_tensor(net.input_shape(), rng);
    std::vector<Tensor> dataset(8, sample);

    TrainConfig tc;
    tc.epochs = 400;
    tc.batch_size = 8;
    tc.seed = 23;
    tc.adam.lr = 0.01;
    const auto history = ts2img::nn::train(net, dataset, tc);
    REQUIRE(history.size() == 400);
    CHECK(history.back() < history.front() * 0.02);
}

TEST_CASE("loss history length and determinism") {
    NetworkConfig cfg;
    cfg.arch = NetworkConfig::Arch::TwoD;
    cfg.image_size = 4;
    cfg.conv1_channels = 2;
    cfg.conv2_channels = 2;
    cfg.bottleneck = 2;

    std::mt19937_64 rng(31);
    std::vector<Tensor> dataset;
    for (int i = 0; i < 5; ++i)
        dataset.push_back(random_tensor({1, 4, 4}, rng));

    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 2;
    tc.seed = 77;

    Network net1 = build_network(cfg);
    net1.init_params(5);
    const auto h1 = ts2img::nn::train(net1, dataset, tc);
    CHECK(h1.size() == 3 * 3);  // epochs * ceil(5/2)

    Network net2 = build_network(cfg);
    net2.init_params(5);
    const auto h2 = ts2img::nn::train(net2, dataset, tc);
    CHECK(h1 == h2);  // bitwise identical
}
