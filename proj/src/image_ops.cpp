#include "ts2img/image_ops.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace ts2img {

Matrix average_pool(const Matrix& image, const PoolSpec& spec) {
    if (spec.factor_rows == 0 || spec.factor_cols == 0)
        throw std::invalid_argument("average_pool: pooling factors must be positive");
    if (image.rows() % spec.factor_rows != 0 || image.cols() % spec.factor_cols != 0)
        throw std::invalid_argument("average_pool: image dimensions not divisible by pooling factors");
    const std::size_t out_rows = image.rows() / spec.factor_rows;
    const std::size_t out_cols = image.cols() / spec.factor_cols;
    Matrix out(out_rows, out_cols);
    const double inv_area = 1.0 / static_cast<double>(spec.factor_rows * spec.factor_cols);
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t c = 0; c < out_cols; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < spec.factor_rows; ++i)
                for (std::size_t j = 0; j < spec.factor_cols; ++j)
                    sum += image(r * spec.factor_rows + i, c * spec.factor_cols + j);
            out(r, c) = sum * inv_area;
        }
    }
    return out;
}

Matrix minmax_stretch(const Matrix& image) {
    if (image.size() == 0)
        throw std::invalid_argument("minmax_stretch: empty image");
    for (double v : image.values())
        if (!std::isfinite(v))
            throw std::invalid_argument("minmax_stretch: non-finite pixel");
    auto [mn_it, mx_it] = std::minmax_element(image.values().begin(), image.values().end());
    const double mn = *mn_it, mx = *mx_it;
    Matrix out(image.rows(), image.cols());
    if (mn == mx) {
        std::fill(out.values().begin(), out.values().end(), 0.5);
        return out;
    }
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < image.size(); ++i)
        out.values()[i] = (image.values()[i] - mn) * inv;
    return out;
}

void write_png_gray(const Matrix& image01, const std::string& path) {
    if (image01.size() == 0)
        throw std::invalid_argument("write_png_gray: empty image");
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp)
        throw std::runtime_error("write_png_gray: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw std::runtime_error("write_png_gray: png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("write_png_gray: png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("write_png_gray: libpng error writing " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image01.cols()),
                 static_cast<png_uint_32>(image01.rows()), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> row(image01.cols());
    for (std::size_t r = 0; r < image01.rows(); ++r) {
        for (std::size_t c = 0; c < image01.cols(); ++c) {
            const double v = std::clamp(image01(r, c), 0.0, 1.0);
            row[c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

}  // namespace ts2img
