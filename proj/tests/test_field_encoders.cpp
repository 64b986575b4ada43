#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ts2img/field_encoders.hpp"

using namespace ts2img;

namespace {

// Naive double-loop references, kept deliberately independent of the
// library implementations.

std::vector<std::vector<double>> ref_gaf(const std::vector<double>& slice, double lb, double ub) {
    const std::size_t n = slice.size();
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::min(std::max(slice[i], lb), ub);
        double norm = ((x - ub) + (x - lb)) / (ub - lb);
        norm = std::min(1.0, std::max(-1.0, norm));
        phi[i] = std::acos(norm);
    }
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[i][j] = std::cos(phi[i] + phi[j]);
    return out;
}

std::vector<std::vector<double>> ref_rp(const std::vector<double>& slice, bool modified) {
    const std::size_t n = slice.size();
    double mean = 0.0;
    for (double v : slice)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[i][j] = std::abs(slice[i] - slice[j]) + (modified ? mean : 0.0);
    return out;
}

// Uniform-bin per-slice MTF from first principles.
std::vector<std::vector<double>> ref_mtf_original(const std::vector<double>& slice,
                                                  std::size_t bins) {
    const std::size_t n = slice.size();
    const double lo = *std::min_element(slice.begin(), slice.end());
    const double hi = *std::max_element(slice.begin(), slice.end());
    const double span = (hi > lo) ? hi - lo : 2e-6;
    const double base = (hi > lo) ? lo : lo - 1e-6;
    auto assign = [&](double v) {
        auto b = static_cast<long>((v - base) / span * static_cast<double>(bins));
        return static_cast<std::size_t>(std::min<long>(std::max<long>(b, 0),
                                                       static_cast<long>(bins) - 1));
    };
    std::vector<std::vector<double>> counts(bins, std::vector<double>(bins, 0.0));
    for (std::size_t t = 0; t + 1 < n; ++t)
        counts[assign(slice[t])][assign(slice[t + 1])] += 1.0;
    for (auto& row : counts) {
        double sum = 0.0;
        for (double c : row)
            sum += c;
        if (sum > 0.0)
            for (double& c : row)
                c /= sum;
    }
    std::vector<std::vector<double>> out(n, std::vector<double>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            out[a][b] = counts[assign(slice[a])][assign(slice[b])];
    return out;
}

std::vector<double> random_slice(std::mt19937_64& rng, std::size_t max_len = 16) {
    std::uniform_int_distribution<std::size_t> len_dist(2, max_len);
    std::uniform_real_distribution<double> val_dist(-3.0, 3.0);
    std::vector<double> slice(len_dist(rng));
    for (double& v : slice)
        v = val_dist(rng);
    return slice;
}

}  // namespace

TEST_CASE("gaf golden values") {
    const ScalingBounds unit{-1.0, 1.0};

    SUBCASE("all-zero slice maps every entry to -1") {
        const std::vector<double> zeros(5, 0.0);
        const EncodedImage img = gaf_encode(zeros, unit, EncoderVariant::Modified);
        for (double v : img.pixels.values())
            CHECK(v == doctest::Approx(-1.0));
    }

    SUBCASE("slice [1,0,-1] with bounds (-1,1)") {
        const std::vector<double> slice{1.0, 0.0, -1.0};
        const EncodedImage img = gaf_encode(slice, unit, EncoderVariant::Modified);
        const double expected[3][3] = {{1, 0, -1}, {0, -1, 0}, {-1, 0, 1}};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(img.pixels(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-12));
    }

    SUBCASE("upper-bound sample gives diagonal entry 1") {
        const std::vector<double> slice{1.0, 0.3};
        const EncodedImage img = gaf_encode(slice, unit, EncoderVariant::Modified);
        CHECK(img.pixels(0, 0) == doctest::Approx(1.0));
    }
}

TEST_CASE("gaf invariants: symmetry, diagonal, range") {
    std::mt19937_64 rng(21);
    const ScalingBounds b{-4.0, 4.0};
    for (int t = 0; t < 50; ++t) {
        const auto slice = random_slice(rng);
        const EncodedImage img = gaf_encode(slice, b, EncoderVariant::Modified);
        const std::size_t n = slice.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double norm = ((slice[i] - b.upper) + (slice[i] - b.lower)) / (b.upper - b.lower);
            CHECK(img.pixels(i, i) == doctest::Approx(2.0 * norm * norm - 1.0).epsilon(1e-10));
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(img.pixels(i, j) == img.pixels(j, i));
                CHECK(img.pixels(i, j) >= -1.0 - 1e-12);
                CHECK(img.pixels(i, j) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("gaf matches the naive reference on random slices") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        const auto slice = random_slice(rng);
        const ScalingBounds b{-3.5, 3.5};
        const EncodedImage img = gaf_encode(slice, b, EncoderVariant::Modified);
        const auto ref = ref_gaf(slice, b.lower, b.upper);
        for (std::size_t i = 0; i < slice.size(); ++i)
            for (std::size_t j = 0; j < slice.size(); ++j)
                CHECK(img.pixels(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-12));
    }
}

TEST_CASE("gaf original variant handles constant slices via widened bounds") {
    const std::vector<double> constant(4, 2.0);
    const EncodedImage img =
        gaf_encode(constant, ScalingBounds{0.0, 1.0}, EncoderVariant::Original);
    for (double v : img.pixels.values())
        CHECK(std::isfinite(v));
}

TEST_CASE("sax_fit breakpoints") {
    SUBCASE("Q=2 gives a single breakpoint at the mean") {
        std::vector<double> data{1.0, 2.0, 3.0, 4.0};
        const SaxQuantizer q = sax_fit(data, 2);
        REQUIRE(q.breakpoints.size() == 1);
        CHECK(q.breakpoints[0] == doctest::Approx(2.5));
    }

    SUBCASE("Q=4 on standard-normal data gives quartile breakpoints") {
        std::mt19937_64 rng(42);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> data(200000);
        for (double& v : data)
            v = gauss(rng);
        const SaxQuantizer q = sax_fit(data, 4);
        REQUIRE(q.breakpoints.size() == 3);
        CHECK(q.breakpoints[0] == doctest::Approx(-0.674).epsilon(0.02));
        CHECK(q.breakpoints[1] == doctest::Approx(0.0).epsilon(0.02));
        CHECK(q.breakpoints[2] == doctest::Approx(0.674).epsilon(0.02));
    }

    SUBCASE("rejects constant training data") {
        std::vector<double> flat(10, 1.0);
        CHECK_THROWS_AS(sax_fit(flat, 4), std::invalid_argument);
    }

    SUBCASE("bin frequencies are balanced on Gaussian data") {
        std::mt19937_64 rng(43);
        std::normal_distribution<double> gauss(2.0, 3.0);
        std::vector<double> data(100000);
        for (double& v : data)
            v = gauss(rng);
        const SaxQuantizer q = sax_fit(data, 8);
        std::vector<std::size_t> counts(8, 0);
        for (double v : data)
            counts[q.assign(v)]++;
        for (std::size_t c : counts)
            CHECK(static_cast<double>(c) ==
                  doctest::Approx(static_cast<double>(data.size()) / 8.0).epsilon(0.05));
    }
}

TEST_CASE("sax out-of-range values fall into extreme bins") {
    std::vector<double> data{0.0, 1.0, 2.0, 3.0, 4.0};
    const SaxQuantizer q = sax_fit(data, 4);
    CHECK(q.assign(-100.0) == 0);
    CHECK(q.assign(100.0) == 3);
}

TEST_CASE("mtf_fit hand case") {
    // training series [1,1,2,2], 2 bins -> W = [[0.5,0.5],[0,1]]
    std::vector<std::vector<double>> seqs{{1.0, 1.0, 2.0, 2.0}};
    UniformQuantizer q{2, 1.0, 2.0};
    const MarkovTransitionMatrix w = mtf_fit<UniformQuantizer>(seqs, q);
    CHECK(w.at(0, 0) == doctest::Approx(0.5));
    CHECK(w.at(0, 1) == doctest::Approx(0.5));
    CHECK(w.at(1, 0) == 0.0);
    CHECK(w.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("mtf rows with observed transitions sum to one") {
    std::mt19937_64 rng(31);
    std::vector<std::vector<double>> seqs;
    for (int s = 0; s < 5; ++s)
        seqs.push_back(random_slice(rng, 12));
    std::vector<double> all;
    for (const auto& s : seqs)
        all.insert(all.end(), s.begin(), s.end());
    const SaxQuantizer q = sax_fit(all, 5);
    const MarkovTransitionMatrix w = mtf_fit<SaxQuantizer>(seqs, q);
    for (std::size_t i = 0; i < w.bin_count; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < w.bin_count; ++j) {
            row += w.at(i, j);
            CHECK(w.at(i, j) >= 0.0);
            CHECK(w.at(i, j) <= 1.0);
        }
        if (row > 0.0)
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("mtf_encode looks up transition probabilities per point pair") {
    std::vector<std::vector<double>> seqs{{1.0, 1.0, 2.0, 2.0}};
    UniformQuantizer q{2, 1.0, 2.0};
    const MarkovTransitionMatrix w = mtf_fit<UniformQuantizer>(seqs, q);
    const std::vector<double> slice{1.0, 2.0};
    const Matrix img = mtf_encode_matrix(slice, q, w);
    CHECK(img(0, 0) == doctest::Approx(0.5));
    CHECK(img(0, 1) == doctest::Approx(0.5));
    CHECK(img(1, 0) == 0.0);
    CHECK(img(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("mtf original variant matches the naive per-slice reference") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 100; ++t) {
        const auto slice = random_slice(rng);
        const EncodedImage img = mtf_encode_original(slice, 4);
        const auto ref = ref_mtf_original(slice, 4);
        for (std::size_t a = 0; a < slice.size(); ++a)
            for (std::size_t b = 0; b < slice.size(); ++b)
                CHECK(img.pixels(a, b) == doctest::Approx(ref[a][b]).epsilon(1e-12));
    }
}

TEST_CASE("mtf image values stay in [0,1]") {
    const std::vector<double> constant(6, 3.0);
    const EncodedImage img = mtf_encode_original(constant, 3);
    for (double v : img.pixels.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("rp golden values") {
    SUBCASE("constant slice") {
        const std::vector<double> c(4, 2.5);
        const EncodedImage orig = rp_encode(c, EncoderVariant::Original);
        const EncodedImage mod = rp_encode(c, EncoderVariant::Modified);
        for (double v : orig.pixels.values())
            CHECK(v == 0.0);
        for (double v : mod.pixels.values())
            CHECK(v == doctest::Approx(2.5));
    }

    SUBCASE("slice [0,1]") {
        const std::vector<double> slice{0.0, 1.0};
        const EncodedImage orig = rp_encode(slice, EncoderVariant::Original);
        CHECK(orig.pixels(0, 0) == 0.0);
        CHECK(orig.pixels(0, 1) == 1.0);
        CHECK(orig.pixels(1, 0) == 1.0);
        CHECK(orig.pixels(1, 1) == 0.0);
        const EncodedImage mod = rp_encode(slice, EncoderVariant::Modified);
        CHECK(mod.pixels(0, 0) == doctest::Approx(0.5));
        CHECK(mod.pixels(0, 1) == doctest::Approx(1.5));
    }
}

TEST_CASE("rp invariants and reference equivalence") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 100; ++t) {
        const auto slice = random_slice(rng);
        const EncodedImage orig = rp_encode(slice, EncoderVariant::Original);
        const EncodedImage mod = rp_encode(slice, EncoderVariant::Modified);
        const auto ref_o = ref_rp(slice, false);
        const auto ref_m = ref_rp(slice, true);
        double mean = 0.0;
        for (double v : slice)
            mean += v;
        mean /= static_cast<double>(slice.size());
        for (std::size_t i = 0; i < slice.size(); ++i) {
            CHECK(orig.pixels(i, i) == 0.0);
            for (std::size_t j = 0; j < slice.size(); ++j) {
                CHECK(orig.pixels(i, j) == orig.pixels(j, i));
                CHECK(orig.pixels(i, j) == doctest::Approx(ref_o[i][j]));
                CHECK(mod.pixels(i, j) == doctest::Approx(ref_m[i][j]));
                CHECK(mod.pixels(i, j) - mean == doctest::Approx(orig.pixels(i, j)));
            }
        }
    }
}

TEST_CASE("gs golden values") {
    std::vector<double> slice(512, 0.5);
    const ScalingBounds b{0.0, 1.0};

    SUBCASE("constant 0.5 with P=255 rounds half away from zero to 128") {
        const EncodedImage img = gs_encode(slice, b, EncoderVariant::GsP255);
        REQUIRE(img.pixels.rows() == 64);
        REQUIRE(img.pixels.cols() == 64);
        for (double v : img.pixels.values())
            CHECK(v == 128.0);
    }

    SUBCASE("constant 0.5 minmax variant keeps exact values") {
        const EncodedImage img = gs_encode(slice, b, EncoderVariant::GsMinMax);
        for (double v : img.pixels.values())
            CHECK(v == 0.5);
    }

    SUBCASE("P=1 variant rounds to {0,1}") {
        const EncodedImage img = gs_encode(slice, b, EncoderVariant::GsP1);
        for (double v : img.pixels.values())
            CHECK(v == 1.0);  // 0.5 rounds away from zero
    }
}

TEST_CASE("gs window layout: pixel (i,j) is sample 3 + 7i + j") {
    std::vector<double> slice(512);
    for (std::size_t i = 0; i < slice.size(); ++i)
        slice[i] = static_cast<double>(i);
    const ScalingBounds b{0.0, 511.0};
    const EncodedImage img = gs_encode(slice, b, EncoderVariant::GsMinMax);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t j = 0; j < 64; ++j)
            CHECK(img.pixels(i, j) ==
                  doctest::Approx(static_cast<double>(3 + 7 * i + j) / 511.0));
    // discarded samples: 0..2 head, 508..511 tail
    CHECK(img.pixels(0, 0) == doctest::Approx(3.0 / 511.0));
    CHECK(img.pixels(63, 63) == doctest::Approx(507.0 / 511.0));
}

TEST_CASE("gs minmax variant is invertible on the used samples") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> slice(512);
    for (double& v : slice)
        v = dist(rng);
    const ScalingBounds b{-2.0, 2.0};
    const EncodedImage img = gs_encode(slice, b, EncoderVariant::GsMinMax);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t j = 0; j < 64; ++j) {
            const double recovered = img.pixels(i, j) * b.range() + b.lower;
            CHECK(recovered == doctest::Approx(slice[3 + 7 * i + j]).epsilon(1e-12));
        }
}

TEST_CASE("gs rejects wrong slice lengths") {
    std::vector<double> bad(500, 0.0);
    CHECK_THROWS_AS(gs_encode(bad, ScalingBounds{0.0, 1.0}, EncoderVariant::GsP1),
                    std::invalid_argument);
}
