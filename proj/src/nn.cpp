#include "ts2img/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ts2img::nn {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<std::size_t>());
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(shape_product(shape), 0.0);
}

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::AvgPool1D: return "avgpool1d";
    case LayerKind::MaxPool1D: return "maxpool1d";
    case LayerKind::Unfold: return "unfold";
    case LayerKind::Dense: return "dense";
    case LayerKind::Fold: return "fold";
    case LayerKind::Upsample1D: return "upsample1d";
    case LayerKind::TConv1D: return "tconv1d";
    case LayerKind::TConv2D: return "tconv2d";
    }
    throw std::invalid_argument("unknown layer kind");
}

double Layer::activate(double z) const {
    if (spec_.activation == Activation::LeakyRelu)
        return z >= 0.0 ? z : spec_.leaky_alpha * z;
    return z;
}

double Layer::activate_grad(double z) const {
    if (spec_.activation == Activation::LeakyRelu)
        return z >= 0.0 ? 1.0 : spec_.leaky_alpha;
    return 1.0;
}

namespace {

// TF-style "same" framing: output length ceil(in / stride), zero
// padding split begin-heavy on the right.
struct SamePad {
    std::size_t out_len;
    std::size_t pad_begin;
};

SamePad same_pad(std::size_t in_len, std::size_t kernel, std::size_t stride) {
    const std::size_t out_len = (in_len + stride - 1) / stride;
    const std::size_t needed = (out_len - 1) * stride + kernel;
    const std::size_t pad_total = needed > in_len ? needed - in_len : 0;
    return {out_len, pad_total / 2};
}

class Conv1DLayer final : public Layer {
public:
    explicit Conv1DLayer(LayerSpec spec) : Layer(std::move(spec)) {
        weights_.assign(spec_.out_channels * spec_.in_channels * spec_.kernel, 0.0);
        bias_.assign(spec_.out_channels, 0.0);
    }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2 || in[0] != spec_.in_channels)
            throw std::invalid_argument("conv1d: bad input shape");
        return {spec_.out_channels, same_pad(in[1], spec_.kernel, spec_.stride).out_len};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels;
        const std::size_t len = in.shape[1];
        const auto [out_len, pad] = same_pad(len, spec_.kernel, spec_.stride);
        cache.input = in;
        cache.pre_act.shape = {oc, out_len};
        cache.pre_act.data.assign(oc * out_len, 0.0);
        out.shape = cache.pre_act.shape;
        out.data.resize(oc * out_len);
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t x = 0; x < out_len; ++x) {
                double z = bias_[o];
                for (std::size_t i = 0; i < ic; ++i) {
                    const double* wrow = &weights_[(o * ic + i) * spec_.kernel];
                    const double* irow = &in.data[i * len];
                    for (std::size_t t = 0; t < spec_.kernel; ++t) {
                        const std::size_t src = x * spec_.stride + t;
                        if (src >= pad && src - pad < len)
                            z += wrow[t] * irow[src - pad];
                    }
                }
                cache.pre_act.data[o * out_len + x] = z;
                out.data[o * out_len + x] = activate(z);
            }
        }
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>& grad_w, std::vector<double>& grad_b) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels;
        const std::size_t len = cache.input.shape[1];
        const auto [out_len, pad] = same_pad(len, spec_.kernel, spec_.stride);
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(cache.input.size(), 0.0);
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t x = 0; x < out_len; ++x) {
                const double dz = grad_out.data[o * out_len + x] *
                                  activate_grad(cache.pre_act.data[o * out_len + x]);
                if (dz == 0.0)
                    continue;
                grad_b[o] += dz;
                for (std::size_t i = 0; i < ic; ++i) {
                    double* gw = &grad_w[(o * ic + i) * spec_.kernel];
                    const double* wrow = &weights_[(o * ic + i) * spec_.kernel];
                    for (std::size_t t = 0; t < spec_.kernel; ++t) {
                        const std::size_t src = x * spec_.stride + t;
                        if (src >= pad && src - pad < len) {
                            gw[t] += dz * cache.input.data[i * len + src - pad];
                            grad_in.data[i * len + src - pad] += dz * wrow[t];
                        }
                    }
                }
            }
        }
    }
};

class Conv2DLayer final : public Layer {
public:
    explicit Conv2DLayer(LayerSpec spec) : Layer(std::move(spec)) {
        weights_.assign(spec_.out_channels * spec_.in_channels * spec_.kernel * spec_.kernel, 0.0);
        bias_.assign(spec_.out_channels, 0.0);
    }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 3 || in[0] != spec_.in_channels)
            throw std::invalid_argument("conv2d: bad input shape");
        return {spec_.out_channels, same_pad(in[1], spec_.kernel, spec_.stride).out_len,
                same_pad(in[2], spec_.kernel, spec_.stride).out_len};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t h = in.shape[1], w = in.shape[2];
        const auto [oh, pad_y] = same_pad(h, k, spec_.stride);
        const auto [ow, pad_x] = same_pad(w, k, spec_.stride);
        cache.input = in;
        cache.pre_act.shape = {oc, oh, ow};
        cache.pre_act.data.assign(oc * oh * ow, 0.0);
        out.shape = cache.pre_act.shape;
        out.data.resize(oc * oh * ow);
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double z = bias_[o];
                    for (std::size_t i = 0; i < ic; ++i) {
                        const double* wblk = &weights_[((o * ic + i) * k) * k];
                        for (std::size_t ky = 0; ky < k; ++ky) {
                            const std::size_t sy = y * spec_.stride + ky;
                            if (sy < pad_y || sy - pad_y >= h)
                                continue;
                            const double* irow = &in.data[(i * h + (sy - pad_y)) * w];
                            for (std::size_t kx = 0; kx < k; ++kx) {
                                const std::size_t sx = x * spec_.stride + kx;
                                if (sx >= pad_x && sx - pad_x < w)
                                    z += wblk[ky * k + kx] * irow[sx - pad_x];
                            }
                        }
                    }
                    cache.pre_act.data[(o * oh + y) * ow + x] = z;
                    out.data[(o * oh + y) * ow + x] = activate(z);
                }
            }
        }
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>& grad_w, std::vector<double>& grad_b) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t h = cache.input.shape[1], w = cache.input.shape[2];
        const auto [oh, pad_y] = same_pad(h, k, spec_.stride);
        const auto [ow, pad_x] = same_pad(w, k, spec_.stride);
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(cache.input.size(), 0.0);
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    const std::size_t oi = (o * oh + y) * ow + x;
                    const double dz = grad_out.data[oi] * activate_grad(cache.pre_act.data[oi]);
                    if (dz == 0.0)
                        continue;
                    grad_b[o] += dz;
                    for (std::size_t i = 0; i < ic; ++i) {
                        double* gw = &grad_w[((o * ic + i) * k) * k];
                        const double* wblk = &weights_[((o * ic + i) * k) * k];
                        for (std::size_t ky = 0; ky < k; ++ky) {
                            const std::size_t sy = y * spec_.stride + ky;
                            if (sy < pad_y || sy - pad_y >= h)
                                continue;
                            for (std::size_t kx = 0; kx < k; ++kx) {
                                const std::size_t sx = x * spec_.stride + kx;
                                if (sx < pad_x || sx - pad_x >= w)
                                    continue;
                                const std::size_t ii = (i * h + (sy - pad_y)) * w + (sx - pad_x);
                                gw[ky * k + kx] += dz * cache.input.data[ii];
                                grad_in.data[ii] += dz * wblk[ky * k + kx];
                            }
                        }
                    }
                }
            }
        }
    }
};

class Pool1DLayer final : public Layer {
public:
    explicit Pool1DLayer(LayerSpec spec) : Layer(std::move(spec)) {}

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2 || in[1] % spec_.factor != 0)
            throw std::invalid_argument("pool1d: length not divisible by factor");
        return {in[0], in[1] / spec_.factor};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t c = in.shape[0], len = in.shape[1], f = spec_.factor;
        const std::size_t out_len = len / f;
        cache.input = in;
        out.shape = {c, out_len};
        out.data.resize(c * out_len);
        const bool is_max = spec_.kind == LayerKind::MaxPool1D;
        if (is_max)
            cache.argmax.assign(c * out_len, 0);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t x = 0; x < out_len; ++x) {
                if (is_max) {
                    std::size_t best = ch * len + x * f;
                    for (std::size_t t = 1; t < f; ++t)
                        if (in.data[ch * len + x * f + t] > in.data[best])
                            best = ch * len + x * f + t;
                    cache.argmax[ch * out_len + x] = best;
                    out.data[ch * out_len + x] = in.data[best];
                } else {
                    double sum = 0.0;
                    for (std::size_t t = 0; t < f; ++t)
                        sum += in.data[ch * len + x * f + t];
                    out.data[ch * out_len + x] = sum / static_cast<double>(f);
                }
            }
        }
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>&, std::vector<double>&) const override {
        const std::size_t c = cache.input.shape[0], len = cache.input.shape[1], f = spec_.factor;
        const std::size_t out_len = len / f;
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(cache.input.size(), 0.0);
        const bool is_max = spec_.kind == LayerKind::MaxPool1D;
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t x = 0; x < out_len; ++x) {
                const double g = grad_out.data[ch * out_len + x];
                if (is_max) {
                    grad_in.data[cache.argmax[ch * out_len + x]] += g;
                } else {
                    const double share = g / static_cast<double>(f);
                    for (std::size_t t = 0; t < f; ++t)
                        grad_in.data[ch * len + x * f + t] += share;
                }
            }
        }
    }
};

class ReshapeLayer final : public Layer {
public:
    explicit ReshapeLayer(LayerSpec spec) : Layer(std::move(spec)) {}

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (spec_.kind == LayerKind::Unfold)
            return {shape_product(in)};
        if (shape_product(spec_.out_shape_hint) != shape_product(in))
            throw std::invalid_argument("fold: element count mismatch");
        return spec_.out_shape_hint;
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        cache.input.shape = in.shape;  // data copy not needed, shape is enough
        out.shape = output_shape(in.shape);
        out.data = in.data;
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>&, std::vector<double>&) const override {
        grad_in.shape = cache.input.shape;
        grad_in.data = grad_out.data;
    }
};

class DenseLayer final : public Layer {
public:
    explicit DenseLayer(LayerSpec spec) : Layer(std::move(spec)) {
        weights_.assign(spec_.out_features * spec_.in_features, 0.0);
        bias_.assign(spec_.out_features, 0.0);
    }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (shape_product(in) != spec_.in_features)
            throw std::invalid_argument("dense: bad input size");
        return {spec_.out_features};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t ni = spec_.in_features, no = spec_.out_features;
        cache.input = in;
        cache.pre_act.shape = {no};
        cache.pre_act.data.resize(no);
        out.shape = {no};
        out.data.resize(no);
        for (std::size_t o = 0; o < no; ++o) {
            double z = bias_[o];
            const double* wrow = &weights_[o * ni];
            for (std::size_t i = 0; i < ni; ++i)
                z += wrow[i] * in.data[i];
            cache.pre_act.data[o] = z;
            out.data[o] = activate(z);
        }
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>& grad_w, std::vector<double>& grad_b) const override {
        const std::size_t ni = spec_.in_features, no = spec_.out_features;
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(ni, 0.0);
        for (std::size_t o = 0; o < no; ++o) {
            const double dz = grad_out.data[o] * activate_grad(cache.pre_act.data[o]);
            if (dz == 0.0)
                continue;
            grad_b[o] += dz;
            double* gw = &grad_w[o * ni];
            const double* wrow = &weights_[o * ni];
            for (std::size_t i = 0; i < ni; ++i) {
                gw[i] += dz * cache.input.data[i];
                grad_in.data[i] += dz * wrow[i];
            }
        }
    }
};

class Upsample1DLayer final : public Layer {
public:
    explicit Upsample1DLayer(LayerSpec spec) : Layer(std::move(spec)) {}

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2)
            throw std::invalid_argument("upsample1d: bad input shape");
        return {in[0], in[1] * spec_.factor};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t c = in.shape[0], len = in.shape[1], f = spec_.factor;
        cache.input.shape = in.shape;
        out.shape = {c, len * f};
        out.data.resize(c * len * f);
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t x = 0; x < len * f; ++x)
                out.data[ch * len * f + x] = in.data[ch * len + x / f];
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>&, std::vector<double>&) const override {
        const std::size_t c = cache.input.shape[0], len = cache.input.shape[1], f = spec_.factor;
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(c * len, 0.0);
        for (std::size_t ch = 0; ch < c; ++ch)
            for (std::size_t x = 0; x < len * f; ++x)
                grad_in.data[ch * len + x / f] += grad_out.data[ch * len * f + x];
    }
};

class TConv1DLayer final : public Layer {
public:
    explicit TConv1DLayer(LayerSpec spec) : Layer(std::move(spec)) {
        weights_.assign(spec_.in_channels * spec_.out_channels * spec_.kernel, 0.0);
        bias_.assign(spec_.out_channels, 0.0);
    }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 2 || in[0] != spec_.in_channels)
            throw std::invalid_argument("tconv1d: bad input shape");
        // Output length is pinned to the mirrored conv's input length.
        const std::size_t out_len = spec_.out_shape_hint[1];
        if (same_pad(out_len, spec_.kernel, spec_.stride).out_len != in[1])
            throw std::invalid_argument("tconv1d: pinned output incompatible with input length");
        return {spec_.out_channels, out_len};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t in_len = in.shape[1];
        const std::size_t out_len = spec_.out_shape_hint[1];
        const std::size_t pad = same_pad(out_len, k, spec_.stride).pad_begin;
        cache.input = in;
        cache.pre_act.shape = {oc, out_len};
        cache.pre_act.data.assign(oc * out_len, 0.0);
        for (std::size_t co = 0; co < oc; ++co)
            for (std::size_t y = 0; y < out_len; ++y)
                cache.pre_act.data[co * out_len + y] = bias_[co];
        for (std::size_t ci = 0; ci < ic; ++ci) {
            for (std::size_t o = 0; o < in_len; ++o) {
                const double v = in.data[ci * in_len + o];
                for (std::size_t co = 0; co < oc; ++co) {
                    const double* wrow = &weights_[(ci * oc + co) * k];
                    for (std::size_t t = 0; t < k; ++t) {
                        const std::size_t y = o * spec_.stride + t;
                        if (y >= pad && y - pad < out_len)
                            cache.pre_act.data[co * out_len + (y - pad)] += v * wrow[t];
                    }
                }
            }
        }
        out.shape = cache.pre_act.shape;
        out.data.resize(oc * out_len);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = activate(cache.pre_act.data[i]);
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>& grad_w, std::vector<double>& grad_b) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t in_len = cache.input.shape[1];
        const std::size_t out_len = spec_.out_shape_hint[1];
        const std::size_t pad = same_pad(out_len, k, spec_.stride).pad_begin;
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(cache.input.size(), 0.0);
        std::vector<double> dz(oc * out_len);
        for (std::size_t i = 0; i < dz.size(); ++i)
            dz[i] = grad_out.data[i] * activate_grad(cache.pre_act.data[i]);
        for (std::size_t co = 0; co < oc; ++co)
            for (std::size_t y = 0; y < out_len; ++y)
                grad_b[co] += dz[co * out_len + y];
        for (std::size_t ci = 0; ci < ic; ++ci) {
            for (std::size_t o = 0; o < in_len; ++o) {
                const double v = cache.input.data[ci * in_len + o];
                double gi = 0.0;
                for (std::size_t co = 0; co < oc; ++co) {
                    double* gw = &grad_w[(ci * oc + co) * k];
                    const double* wrow = &weights_[(ci * oc + co) * k];
                    for (std::size_t t = 0; t < k; ++t) {
                        const std::size_t y = o * spec_.stride + t;
                        if (y >= pad && y - pad < out_len) {
                            const double d = dz[co * out_len + (y - pad)];
                            gw[t] += d * v;
                            gi += d * wrow[t];
                        }
                    }
                }
                grad_in.data[ci * in_len + o] += gi;
            }
        }
    }
};

class TConv2DLayer final : public Layer {
public:
    explicit TConv2DLayer(LayerSpec spec) : Layer(std::move(spec)) {
        weights_.assign(spec_.in_channels * spec_.out_channels * spec_.kernel * spec_.kernel, 0.0);
        bias_.assign(spec_.out_channels, 0.0);
    }

    std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
        if (in.size() != 3 || in[0] != spec_.in_channels)
            throw std::invalid_argument("tconv2d: bad input shape");
        const std::size_t oh = spec_.out_shape_hint[1], ow = spec_.out_shape_hint[2];
        if (same_pad(oh, spec_.kernel, spec_.stride).out_len != in[1] ||
            same_pad(ow, spec_.kernel, spec_.stride).out_len != in[2])
            throw std::invalid_argument("tconv2d: pinned output incompatible with input shape");
        return {spec_.out_channels, oh, ow};
    }

    void forward(const Tensor& in, Tensor& out, LayerCache& cache) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t ih = in.shape[1], iw = in.shape[2];
        const std::size_t oh = spec_.out_shape_hint[1], ow = spec_.out_shape_hint[2];
        const std::size_t pad_y = same_pad(oh, k, spec_.stride).pad_begin;
        const std::size_t pad_x = same_pad(ow, k, spec_.stride).pad_begin;
        cache.input = in;
        cache.pre_act.shape = {oc, oh, ow};
        cache.pre_act.data.assign(oc * oh * ow, 0.0);
        for (std::size_t co = 0; co < oc; ++co)
            std::fill_n(&cache.pre_act.data[co * oh * ow], oh * ow, bias_[co]);
        for (std::size_t ci = 0; ci < ic; ++ci) {
            for (std::size_t oy = 0; oy < ih; ++oy) {
                for (std::size_t ox = 0; ox < iw; ++ox) {
                    const double v = in.data[(ci * ih + oy) * iw + ox];
                    if (v == 0.0)
                        continue;
                    for (std::size_t co = 0; co < oc; ++co) {
                        const double* wblk = &weights_[((ci * oc + co) * k) * k];
                        for (std::size_t ky = 0; ky < k; ++ky) {
                            const std::size_t y = oy * spec_.stride + ky;
                            if (y < pad_y || y - pad_y >= oh)
                                continue;
                            double* prow = &cache.pre_act.data[(co * oh + (y - pad_y)) * ow];
                            for (std::size_t kx = 0; kx < k; ++kx) {
                                const std::size_t x = ox * spec_.stride + kx;
                                if (x >= pad_x && x - pad_x < ow)
                                    prow[x - pad_x] += v * wblk[ky * k + kx];
                            }
                        }
                    }
                }
            }
        }
        out.shape = cache.pre_act.shape;
        out.data.resize(cache.pre_act.size());
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = activate(cache.pre_act.data[i]);
    }

    void backward(const Tensor& grad_out, const LayerCache& cache, Tensor& grad_in,
                  std::vector<double>& grad_w, std::vector<double>& grad_b) const override {
        const std::size_t ic = spec_.in_channels, oc = spec_.out_channels, k = spec_.kernel;
        const std::size_t ih = cache.input.shape[1], iw = cache.input.shape[2];
        const std::size_t oh = spec_.out_shape_hint[1], ow = spec_.out_shape_hint[2];
        const std::size_t pad_y = same_pad(oh, k, spec_.stride).pad_begin;
        const std::size_t pad_x = same_pad(ow, k, spec_.stride).pad_begin;
        grad_in.shape = cache.input.shape;
        grad_in.data.assign(cache.input.size(), 0.0);
        std::vector<double> dz(oc * oh * ow);
        for (std::size_t i = 0; i < dz.size(); ++i)
            dz[i] = grad_out.data[i] * activate_grad(cache.pre_act.data[i]);
        for (std::size_t co = 0; co < oc; ++co) {
            double sum = 0.0;
            for (std::size_t i = 0; i < oh * ow; ++i)
                sum += dz[co * oh * ow + i];
            grad_b[co] += sum;
        }
        for (std::size_t ci = 0; ci < ic; ++ci) {
            for (std::size_t oy = 0; oy < ih; ++oy) {
                for (std::size_t ox = 0; ox < iw; ++ox) {
                    const double v = cache.input.data[(ci * ih + oy) * iw + ox];
                    double gi = 0.0;
                    for (std::size_t co = 0; co < oc; ++co) {
                        double* gw = &grad_w[((ci * oc + co) * k) * k];
                        const double* wblk = &weights_[((ci * oc + co) * k) * k];
                        for (std::size_t ky = 0; ky < k; ++ky) {
                            const std::size_t y = oy * spec_.stride + ky;
                            if (y < pad_y || y - pad_y >= oh)
                                continue;
                            for (std::size_t kx = 0; kx < k; ++kx) {
                                const std::size_t x = ox * spec_.stride + kx;
                                if (x < pad_x || x - pad_x >= ow)
                                    continue;
                                const double d = dz[(co * oh + (y - pad_y)) * ow + (x - pad_x)];
                                gw[ky * k + kx] += d * v;
                                gi += d * wblk[ky * k + kx];
                            }
                        }
                    }
                    grad_in.data[(ci * ih + oy) * iw + ox] += gi;
                }
            }
        }
    }
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
    switch (spec.kind) {
    case LayerKind::Conv1D: return std::make_unique<Conv1DLayer>(spec);
    case LayerKind::Conv2D: return std::make_unique<Conv2DLayer>(spec);
    case LayerKind::AvgPool1D:
    case LayerKind::MaxPool1D: return std::make_unique<Pool1DLayer>(spec);
    case LayerKind::Unfold:
    case LayerKind::Fold: return std::make_unique<ReshapeLayer>(spec);
    case LayerKind::Dense: return std::make_unique<DenseLayer>(spec);
    case LayerKind::Upsample1D: return std::make_unique<Upsample1DLayer>(spec);
    case LayerKind::TConv1D: return std::make_unique<TConv1DLayer>(spec);
    case LayerKind::TConv2D: return std::make_unique<TConv2DLayer>(spec);
    }
    throw std::invalid_argument("make_layer: unknown layer kind");
}

Network::Network(std::vector<LayerSpec> specs, std::vector<std::size_t> input_shape)
    : input_shape_(std::move(input_shape)) {
    layers_.reserve(specs.size());
    shape_chain_.push_back(input_shape_);
    std::vector<std::size_t> shape = input_shape_;
    for (auto& spec : specs) {
        layers_.push_back(make_layer(spec));
        shape = layers_.back()->output_shape(shape);
        shape_chain_.push_back(shape);
    }
}

void Network::init_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& layer : layers_) {
        const auto& s = layer->spec();
        std::size_t fan_in = 1;
        switch (s.kind) {
        case LayerKind::Conv1D: fan_in = s.in_channels * s.kernel; break;
        case LayerKind::Conv2D: fan_in = s.in_channels * s.kernel * s.kernel; break;
        case LayerKind::TConv1D: fan_in = s.in_channels * s.kernel; break;
        case LayerKind::TConv2D: fan_in = s.in_channels * s.kernel * s.kernel; break;
        case LayerKind::Dense: fan_in = s.in_features; break;
        default: continue;  // no parameters
        }
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : layer->weights())
            w = dist(rng);
        std::fill(layer->bias().begin(), layer->bias().end(), 0.0);
    }
}

void Network::forward(const Tensor& input, Cache& cache) const {
    if (input.shape != input_shape_)
        throw std::invalid_argument("Network::forward: input shape mismatch");
    cache.layers.resize(layers_.size());
    // Ping-pong buffers so a layer never writes into the tensor it reads.
    Tensor buf_a, buf_b;
    const Tensor* cur = &input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Tensor& out = (i + 1 == layers_.size()) ? cache.output : (i % 2 == 0 ? buf_a : buf_b);
        layers_[i]->forward(*cur, out, cache.layers[i]);
        cur = &out;
    }
}

Tensor Network::forward(const Tensor& input) const {
    Cache cache;
    forward(input, cache);
    return cache.output;
}

void Network::Gradients::zero() {
    for (auto& g : w)
        std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : b)
        std::fill(g.begin(), g.end(), 0.0);
}

Network::Gradients Network::make_gradients() const {
    Gradients g;
    g.w.reserve(layers_.size());
    g.b.reserve(layers_.size());
    for (const auto& layer : layers_) {
        g.w.emplace_back(layer->weights().size(), 0.0);
        g.b.emplace_back(layer->bias().size(), 0.0);
    }
    return g;
}

void Network::backward(const Tensor& grad_output, const Cache& cache, Gradients& grads) const {
    Tensor grad = grad_output;
    Tensor grad_prev;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        layers_[i]->backward(grad, cache.layers[i], grad_prev, grads.w[i], grads.b[i]);
        std::swap(grad, grad_prev);
    }
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_)
        n += layer->weights().size() + layer->bias().size();
    return n;
}

double Network::get_param(std::size_t flat_index) const {
    for (const auto& layer : layers_) {
        if (flat_index < layer->weights().size())
            return layer->weights()[flat_index];
        flat_index -= layer->weights().size();
        if (flat_index < layer->bias().size())
            return layer->bias()[flat_index];
        flat_index -= layer->bias().size();
    }
    throw std::out_of_range("Network::get_param");
}

void Network::set_param(std::size_t flat_index, double value) {
    for (auto& layer : layers_) {
        if (flat_index < layer->weights().size()) {
            layer->weights()[flat_index] = value;
            return;
        }
        flat_index -= layer->weights().size();
        if (flat_index < layer->bias().size()) {
            layer->bias()[flat_index] = value;
            return;
        }
        flat_index -= layer->bias().size();
    }
    throw std::out_of_range("Network::set_param");
}

std::vector<LayerSpec> Network::specs() const {
    std::vector<LayerSpec> out;
    out.reserve(layers_.size());
    for (const auto& layer : layers_)
        out.push_back(layer->spec());
    return out;
}

namespace {

LayerSpec conv1d_spec(std::size_t k, std::size_t s, std::size_t ic, std::size_t oc, double alpha) {
    LayerSpec spec;
    spec.kind = LayerKind::Conv1D;
    spec.kernel = k;
    spec.stride = s;
    spec.in_channels = ic;
    spec.out_channels = oc;
    spec.activation = Activation::LeakyRelu;
    spec.leaky_alpha = alpha;
    return spec;
}

LayerSpec dense_spec(std::size_t ni, std::size_t no, double alpha) {
    LayerSpec spec;
    spec.kind = LayerKind::Dense;
    spec.in_features = ni;
    spec.out_features = no;
    spec.activation = Activation::LeakyRelu;
    spec.leaky_alpha = alpha;
    return spec;
}

}  // namespace

Network build_network(const NetworkConfig& cfg) {
    std::vector<LayerSpec> specs;
    std::vector<std::size_t> input_shape;
    const double alpha = cfg.leaky_alpha;

    if (cfg.arch == NetworkConfig::Arch::TwoD) {
        const std::size_t s = cfg.image_size;
        if (s % 4 != 0)
            throw std::invalid_argument("build_network: 2-D image size must be divisible by 4");
        input_shape = {1, s, s};
        const std::size_t c1 = cfg.conv1_channels, c2 = cfg.conv2_channels;
        const std::size_t unfolded = c2 * (s / 4) * (s / 4);

        LayerSpec conv1;
        conv1.kind = LayerKind::Conv2D;
        conv1.kernel = 2;
        conv1.stride = 2;
        conv1.in_channels = 1;
        conv1.out_channels = c1;
        conv1.activation = Activation::LeakyRelu;
        conv1.leaky_alpha = alpha;
        LayerSpec conv2 = conv1;
        conv2.in_channels = c1;
        conv2.out_channels = c2;
        specs.push_back(conv1);
        specs.push_back(conv2);

        specs.push_back({.kind = LayerKind::Unfold});
        specs.push_back(dense_spec(unfolded, cfg.bottleneck, alpha));
        specs.push_back(dense_spec(cfg.bottleneck, unfolded, alpha));
        LayerSpec fold;
        fold.kind = LayerKind::Fold;
        fold.out_shape_hint = {c2, s / 4, s / 4};
        specs.push_back(fold);

        LayerSpec tconv2;
        tconv2.kind = LayerKind::TConv2D;
        tconv2.kernel = 2;
        tconv2.stride = 2;
        tconv2.in_channels = c2;
        tconv2.out_channels = c1;
        tconv2.out_shape_hint = {c1, s / 2, s / 2};
        tconv2.activation = Activation::LeakyRelu;
        tconv2.leaky_alpha = alpha;
        LayerSpec tconv1 = tconv2;
        tconv1.in_channels = c1;
        tconv1.out_channels = 1;
        tconv1.out_shape_hint = {1, s, s};
        tconv1.activation = Activation::Linear;
        specs.push_back(tconv2);
        specs.push_back(tconv1);
    } else {
        const std::size_t len = cfg.input_len;
        if (len % 128 != 0)
            throw std::invalid_argument("build_network: 1-D input length must be divisible by 128");
        input_shape = {1, len};
        const std::size_t c1 = cfg.conv1_channels, c2 = cfg.conv2_channels, c3 = cfg.conv3_channels;
        const LayerKind pool_kind = cfg.pool_mode == NetworkConfig::PoolMode::Average
                                        ? LayerKind::AvgPool1D
                                        : LayerKind::MaxPool1D;
        auto pool = [&] {
            LayerSpec p;
            p.kind = pool_kind;
            p.factor = 2;
            return p;
        };

        specs.push_back(conv1d_spec(16, 4, 1, c1, alpha));   // len/4
        specs.push_back(pool());                             // len/8
        specs.push_back(conv1d_spec(8, 2, c1, c2, alpha));   // len/16
        specs.push_back(pool());                             // len/32
        specs.push_back(conv1d_spec(4, 2, c2, c3, alpha));   // len/64
        specs.push_back(pool());                             // len/128
        const std::size_t unfolded = c3 * (len / 128);

        specs.push_back({.kind = LayerKind::Unfold});
        specs.push_back(dense_spec(unfolded, cfg.bottleneck, alpha));
        specs.push_back(dense_spec(cfg.bottleneck, unfolded, alpha));
        LayerSpec fold;
        fold.kind = LayerKind::Fold;
        fold.out_shape_hint = {c3, len / 128};
        specs.push_back(fold);

        auto upsample = [] {
            LayerSpec u;
            u.kind = LayerKind::Upsample1D;
            u.factor = 2;
            return u;
        };
        auto tconv = [&](std::size_t k, std::size_t s, std::size_t ci, std::size_t co,
                         std::size_t out_len, Activation act) {
            LayerSpec t;
            t.kind = LayerKind::TConv1D;
            t.kernel = k;
            t.stride = s;
            t.in_channels = ci;
            t.out_channels = co;
            t.out_shape_hint = {co, out_len};
            t.activation = act;
            t.leaky_alpha = alpha;
            return t;
        };

        specs.push_back(upsample());                                              // len/64
        specs.push_back(tconv(4, 2, c3, c2, len / 32, Activation::LeakyRelu));
        specs.push_back(upsample());                                              // len/16
        specs.push_back(tconv(8, 2, c2, c1, len / 8, Activation::LeakyRelu));
        specs.push_back(upsample());                                              // len/4
        specs.push_back(tconv(16, 4, c1, 1, len, Activation::Linear));
    }

    Network net(std::move(specs), input_shape);
    if (net.shape_chain().back() != net.input_shape())
        throw std::logic_error("build_network: mirrored decoder does not restore the input shape");
    return net;
}

AdamState AdamState::make(const Network& net) {
    AdamState state;
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        state.m_w.emplace_back(net.layer(i).weights().size(), 0.0);
        state.v_w.emplace_back(net.layer(i).weights().size(), 0.0);
        state.m_b.emplace_back(net.layer(i).bias().size(), 0.0);
        state.v_b.emplace_back(net.layer(i).bias().size(), 0.0);
    }
    return state;
}

namespace {

void adam_update(std::vector<double>& params, const std::vector<double>& grads,
                 std::vector<double>& m, std::vector<double>& v, const AdamConfig& cfg,
                 double bias1, double bias2) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grads[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace

void adam_step(Network& net, const Network::Gradients& grads, AdamState& state,
               const AdamConfig& cfg) {
    state.t += 1;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < net.layer_count(); ++i) {
        adam_update(net.layer(i).weights(), grads.w[i], state.m_w[i], state.v_w[i], cfg, bias1,
                    bias2);
        adam_update(net.layer(i).bias(), grads.b[i], state.m_b[i], state.v_b[i], cfg, bias1, bias2);
    }
}

std::vector<double> train(Network& net, const std::vector<Tensor>& dataset,
                          const TrainConfig& cfg) {
    if (dataset.empty())
        throw std::invalid_argument("train: empty dataset");
    if (cfg.epochs == 0 || cfg.batch_size == 0)
        throw std::invalid_argument("train: epochs and batch size must be positive");

    AdamState adam = AdamState::make(net);
    Network::Gradients grads = net.make_gradients();
    std::vector<double> history;
    const std::size_t n = dataset.size();
    const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
    history.reserve(cfg.epochs * batches);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    Network::Cache cache;
    Tensor grad_out;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t begin = b * cfg.batch_size;
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            const auto batch_n = static_cast<double>(end - begin);
            grads.zero();
            double loss = 0.0;
            for (std::size_t s = begin; s < end; ++s) {
                const Tensor& sample = dataset[order[s]];
                net.forward(sample, cache);
                const double scale = 2.0 / (batch_n * static_cast<double>(sample.size()));
                grad_out.shape = cache.output.shape;
                grad_out.data.resize(cache.output.size());
                for (std::size_t i = 0; i < sample.size(); ++i) {
                    const double diff = cache.output.data[i] - sample.data[i];
                    loss += diff * diff / (batch_n * static_cast<double>(sample.size()));
                    grad_out.data[i] = scale * diff;
                }
                net.backward(grad_out, cache, grads);
            }
            adam_step(net, grads, adam, cfg.adam);
            history.push_back(loss);
        }
    }
    return history;
}

}  // namespace ts2img::nn
