#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ts2img/spectral.hpp"

using namespace ts2img;

namespace {

// Naive windowed-DFT magnitude of a single frame; independent oracle.
std::vector<double> oracle_frame(const std::vector<double>& signal, std::size_t start,
                                 const std::vector<double>& window, std::size_t bins) {
    const std::size_t win = window.size();
    std::vector<double> out(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < win; ++m) {
            const double x = (start + m < signal.size() ? signal[start + m] : 0.0) * window[m];
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * m) /
                               static_cast<double>(win);
            acc += x * std::polar(1.0, ang);
        }
        out[k] = std::abs(acc);
    }
    return out;
}

// Direct O(n^2) zero-extension convolution oracle.
std::vector<double> oracle_convolve_same(const std::vector<double>& x,
                                         const std::vector<double>& kernel) {
    const std::size_t n = x.size();
    const std::size_t half = (kernel.size() - 1) / 2;
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t k = 0; k < kernel.size(); ++k) {
            const auto src = static_cast<std::ptrdiff_t>(t + half) - static_cast<std::ptrdiff_t>(k);
            if (src >= 0 && src < static_cast<std::ptrdiff_t>(n))
                out[t] += kernel[k] * x[static_cast<std::size_t>(src)];
        }
    return out;
}

StftConfig small_stft() {
    StftConfig cfg;
    cfg.window_len = 126;
    cfg.hop = 8;
    cfg.image_size = 64;
    return cfg;
}

}  // namespace

TEST_CASE("stft config validates the 126/64 relation") {
    CHECK_NOTHROW(small_stft().validate());
    StftConfig bad = small_stft();
    bad.window_len = 100;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("stft of zero series is all zero") {
    TimeSeries s;
    s.values.assign(4096, 0.0);
    const auto images = stft_spectrogram(s, small_stft());
    REQUIRE(images.size() == 8);  // 4096/8 = 512 frames -> 8 images
    for (const auto& img : images)
        for (double v : img.pixels.values())
            CHECK(v == 0.0);
}

TEST_CASE("stft of constant series concentrates energy in the DC row") {
    TimeSeries s;
    s.values.assign(2048, 2.0);
    const auto images = stft_spectrogram(s, small_stft());
    REQUIRE(!images.empty());
    const auto& img = images.front().pixels;
    for (std::size_t t = 0; t < 32; ++t) {  // interior frames, no tail padding
        CHECK(img(0, t) > 1.0);
        // the symmetric Hann taper is not bin-periodic, so a little
        // leakage remains even for pure DC input
        for (std::size_t k = 8; k < img.rows(); ++k)
            CHECK(img(k, t) < img(0, t) * 1e-3);
    }
}

TEST_CASE("stft frames match the naive windowed-DFT oracle") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    TimeSeries s;
    s.values.resize(1024);
    // bin-centred cosine plus noise
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.values[i] = std::cos(2.0 * std::numbers::pi * 10.0 * static_cast<double>(i) / 126.0) +
                      0.1 * dist(rng);
    const StftConfig cfg = small_stft();
    const auto images = stft_spectrogram(s, cfg);
    REQUIRE(images.size() == 2);  // 128 frames
    const auto window = hanning_window(cfg.window_len);

    for (std::size_t frame : {std::size_t{0}, std::size_t{5}, std::size_t{77}, std::size_t{127}}) {
        const auto expected = oracle_frame(s.values, frame * cfg.hop, window, cfg.freq_bins());
        const auto& img = images[frame / cfg.image_size].pixels;
        const std::size_t col = frame % cfg.image_size;
        for (std::size_t k = 0; k < cfg.freq_bins(); ++k) {
            if (expected[k] > 1e-9)
                CHECK(img(k, col) == doctest::Approx(expected[k]).epsilon(1e-6));
            else
                CHECK(std::abs(img(k, col) - expected[k]) < 1e-9);
        }
    }

    // the cosine's energy is localised in bin 10 for interior frames
    const auto& img = images[0].pixels;
    double best = 0.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < cfg.freq_bins(); ++k)
        if (img(k, 20) > best) {
            best = img(k, 20);
            best_k = k;
        }
    CHECK(best_k == 10);
}

TEST_CASE("stft per-frame Parseval identity with unnormalised DFT") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> signal(126);
    for (double& v : signal)
        v = dist(rng);
    TimeSeries s;
    s.values = signal;
    s.values.resize(1024, 0.0);
    const StftConfig cfg = small_stft();
    const auto images = stft_spectrogram(s, cfg);
    const auto window = hanning_window(cfg.window_len);

    // frame 0 covers the whole random segment
    double time_energy = 0.0;
    for (std::size_t m = 0; m < 126; ++m)
        time_energy += signal[m] * window[m] * signal[m] * window[m];
    // even-length DFT: bins 1..62 have conjugate partners, 0 and 63 do not
    const auto& img = images[0].pixels;
    double spec_energy = img(0, 0) * img(0, 0) + img(63, 0) * img(63, 0);
    for (std::size_t k = 1; k < 63; ++k)
        spec_energy += 2.0 * img(k, 0) * img(k, 0);
    CHECK(spec_energy == doctest::Approx(126.0 * time_energy).epsilon(1e-6));
}

TEST_CASE("stft rejects series shorter than one window") {
    TimeSeries s;
    s.values.assign(100, 1.0);
    CHECK_THROWS_AS(stft_spectrogram(s, small_stft()), std::invalid_argument);
}

TEST_CASE("ricker wavelet shape") {
    const auto psi = ricker(101, 4.0);
    REQUIRE(psi.size() == 101);

    SUBCASE("peak at the origin") {
        const double centre = psi[50];
        for (double v : psi)
            CHECK(v <= centre);
    }

    SUBCASE("even symmetry") {
        for (std::size_t i = 0; i < 50; ++i)
            CHECK(psi[i] == doctest::Approx(psi[100 - i]));
    }

    SUBCASE("zero mean over wide support") {
        const auto wide = ricker(201, 4.0);  // support > 10 * scale each side
        double sum = 0.0;
        for (double v : wide)
            sum += v;
        CHECK(std::abs(sum) < 1e-8);
    }

    SUBCASE("rejects non-positive scale") {
        CHECK_THROWS_AS(ricker(11, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(ricker(11, -1.0), std::invalid_argument);
    }
}

TEST_CASE("cwt scale ladder is 2^(j/4), j = 1..64") {
    CwtConfig cfg;
    const auto scales = cfg.scales();
    REQUIRE(scales.size() == 64);
    CHECK(scales.front() == doctest::Approx(std::pow(2.0, 0.25)));
    CHECK(scales.back() == doctest::Approx(65536.0));
    for (std::size_t j = 1; j < scales.size(); ++j)
        CHECK(scales[j] > scales[j - 1]);
}

TEST_CASE("cwt of zero slice is zero") {
    CwtConfig cfg;
    cfg.num_scales = 8;
    const std::vector<double> zeros(128, 0.0);
    cfg.pool_time = 8;
    const EncodedImage img = cwt_scalogram(zeros, cfg);
    REQUIRE(img.pixels.rows() == 8);
    REQUIRE(img.pixels.cols() == 16);
    for (double v : img.pixels.values())
        CHECK(v == 0.0);
}

TEST_CASE("cwt rows match the direct convolution oracle") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> slice(64);
    for (double& v : slice)
        v = dist(rng);

    CwtConfig cfg;
    cfg.num_scales = 12;
    cfg.pool_time = 1;  // keep raw rows for comparison
    const EncodedImage img = cwt_scalogram(slice, cfg);
    const auto scales = cfg.scales();
    for (std::size_t row = 0; row < cfg.num_scales; ++row) {
        const auto half = static_cast<std::size_t>(
            std::min(std::ceil(10.0 * scales[row]), static_cast<double>(slice.size())));
        const auto kernel = ricker(2 * half + 1, scales[row]);
        const auto expected = oracle_convolve_same(slice, kernel);
        for (std::size_t t = 0; t < slice.size(); ++t)
            CHECK(img.pixels(row, t) ==
                  doctest::Approx(expected[t]).epsilon(1e-9).scale(std::abs(expected[t]) + 1.0));
    }
}

TEST_CASE("cwt is linear in its input") {
    std::mt19937_64 rng(54);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> slice(64), scaled(64);
    for (std::size_t i = 0; i < slice.size(); ++i) {
        slice[i] = dist(rng);
        scaled[i] = 3.5 * slice[i];
    }
    CwtConfig cfg;
    cfg.num_scales = 6;
    cfg.pool_time = 8;
    const EncodedImage a = cwt_scalogram(slice, cfg);
    const EncodedImage b = cwt_scalogram(scaled, cfg);
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        CHECK(b.pixels.values()[i] == doctest::Approx(3.5 * a.pixels.values()[i]));
}

TEST_CASE("gaussian bump response peaks near the matching scale") {
    // bump of width ~6 samples
    std::vector<double> slice(512, 0.0);
    for (std::size_t i = 0; i < slice.size(); ++i) {
        const double t = (static_cast<double>(i) - 256.0) / 6.0;
        slice[i] = std::exp(-0.5 * t * t);
    }
    CwtConfig cfg;  // full 64-scale ladder
    cfg.pool_time = 8;
    const EncodedImage img = cwt_scalogram(slice, cfg);
    const auto scales = cfg.scales();
    double best = 0.0;
    std::size_t best_row = 0;
    for (std::size_t row = 0; row < cfg.num_scales; ++row) {
        const double centre = img.pixels(row, 32);
        if (centre > best) {
            best = centre;
            best_row = row;
        }
    }
    // matching scale is within a factor of ~3 of the bump width
    CHECK(scales[best_row] > 3.0);
    CHECK(scales[best_row] < 20.0);
}
