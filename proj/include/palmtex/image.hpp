#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace palmtex {

//! 8-bit single-channel raster, row-major, immutable after construction.
class GrayImage {
public:
    GrayImage() = default;
    //! throws InvalidArgument unless data.size() == width * height and both are positive
    GrayImage(int width, int height, std::vector<std::uint8_t> data);
    //! constant-valued image
    GrayImage(int width, int height, std::uint8_t fill);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::uint8_t at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

struct PixelSite {
    int x = 0;
    int y = 0;
};

//! Real-valued raster, the output of linear filtering.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
};

//! Square real matrix, row-major: value(row, col) = coeffs[row * side + col].
struct Kernel {
    int side = 0;
    std::vector<double> coeffs;

    double operator()(int row, int col) const noexcept { return coeffs[static_cast<std::size_t>(row) * side + col]; }
    double sum() const noexcept;
    double abs_sum() const noexcept;

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

//! Loads binary PGM (P5), ASCII PGM (P2), PNG or uncompressed BMP. Color
//! inputs are reduced by Rec.601 luminance; gray inputs keep exact values.
GrayImage load_image(const std::filesystem::path& path);

//! Writes binary PGM (P5, maxval 255).
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

//! `count` bilinear samples on the circle of `radius` around `center`, at
//! angles 2*pi*p/count counter-clockwise from +x as seen on screen (image
//! y grows downward, so sample p sits at (x + r cos, y - r sin)).
//! Throws OutOfBounds when the circle leaves the image.
std::vector<double> sample_circular(const GrayImage& img, PixelSite center, double radius, int count);

//! Offsets and bilinear weights for one circular sample relative to a center pixel.
struct CircularTap {
    int dx0 = 0;
    int dy0 = 0;
    double fx = 0.0;
    double fy = 0.0;
};

std::vector<CircularTap> circular_taps(double radius, int count);

//! Bilinear read at integer base + fractional offset. Weights that are
//! exactly zero never touch their pixel, so on-grid taps read one pixel.
double bilinear_at(const GrayImage& img, int x0, int y0, double fx, double fy) noexcept;

//! Valid-region correlation:
//!   out(x, y) = sum_{i,j} kernel(i, j) * img(x + j, y + i)
//! Output is (width - side + 1) x (height - side + 1); no padding.
//! Throws KernelTooLarge when side exceeds either image dimension and
//! InvalidArgument for an even or empty kernel.
RealImage convolve_valid(const GrayImage& img, const Kernel& kernel);

}  // namespace palmtex
