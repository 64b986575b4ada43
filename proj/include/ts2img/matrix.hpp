#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace ts2img {

// Dense row-major matrix of doubles. All encoder outputs and pooled
// images use this type.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class EncoderKind { None, Gaf, Mtf, Rp, Gs, Sp, Sc };

enum class EncoderVariant { Original, Modified, GsP255, GsP1, GsMinMax };

std::string encoder_kind_name(EncoderKind kind);
std::string encoder_variant_name(EncoderVariant variant);

struct EncodedImage {
    Matrix pixels;
    EncoderKind kind = EncoderKind::None;
    EncoderVariant variant = EncoderVariant::Original;
};

}  // namespace ts2img
