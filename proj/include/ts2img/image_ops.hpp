#pragma once

#include <cstddef>
#include <string>

#include "ts2img/matrix.hpp"

namespace ts2img {

struct PoolSpec {
    std::size_t factor_rows = 8;
    std::size_t factor_cols = 8;
};

// Each output pixel is the arithmetic mean of its factor_rows x
// factor_cols block. Dimensions must divide exactly; trimming is the
// caller's responsibility.
Matrix average_pool(const Matrix& image, const PoolSpec& spec);

// Affine map of [min, max] onto [0, 1]. A constant image maps to 0.5.
Matrix minmax_stretch(const Matrix& image);

// 8-bit grayscale PNG, row-major. Input values are expected in [0, 1];
// they are clamped and quantised to 0..255.
void write_png_gray(const Matrix& image01, const std::string& path);

}  // namespace ts2img
