#pragma once

#include "palmtex/image.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

namespace palmtex {

//! Per-pixel descriptor codes over the valid region of the source image.
//! Code (x, y) belongs to source pixel (x + margin, y + margin).
struct CodeImage {
    int width = 0;
    int height = 0;
    int margin = 0;
    std::vector<std::uint8_t> codes;

    std::uint8_t at(int x, int y) const noexcept { return codes[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const CodeImage&, const CodeImage&) = default;
};

enum class LbpTopology { circle, square3x3 };

struct LbpParams {
    int neighbors = 8;
    double radius = 1.0;
    LbpTopology topology = LbpTopology::circle;
};

enum class LtpSplit { upper_only, concat_upper_lower };

struct LtpParams {
    double threshold = 5.0;
    LtpSplit split = LtpSplit::concat_upper_lower;
};

struct LdpParams {
    int active_bits = 3;
};

struct LpqParams {
    int window = 7;
};

// Responses whose magnitude is at most this fraction of the largest value
// the filter can produce on 8-bit input (255 * sum|w|) count as zero.
// Floating-point summation order then cannot flip a bit that is
// mathematically zero, e.g. zero-mean filters on flat regions.
inline constexpr double kResponseZeroTolerance = 1e-9;

//! Ordered set of square real kernels; kernel i drives bit i of the BSIF code.
class FilterBank {
public:
    FilterBank() = default;
    //! throws InvalidFilterBank (empty, > 8 kernels, even side, non zero-mean)
    //! or MixedKernelSizes
    explicit FilterBank(std::vector<Kernel> kernels);

    int count() const noexcept { return static_cast<int>(kernels_.size()); }
    int side() const noexcept { return kernels_.empty() ? 0 : kernels_.front().side; }
    const std::vector<Kernel>& kernels() const noexcept { return kernels_; }

    //! Text format: `BSIF <count> <side>` then count blocks of side x side
    //! reals, row-major, least-significant-bit kernel first.
    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static FilterBank read(std::istream& in);
    static FilterBank load(const std::filesystem::path& path);

    static constexpr double kZeroMeanTolerance = 1e-6;

    friend bool operator==(const FilterBank&, const FilterBank&) = default;

private:
    std::vector<Kernel> kernels_;
};

//! The eight Kirsch compass masks, index 0 = east, rotating counter-clockwise
//! on screen (1 = north-east, 2 = north, ... 7 = south-east).
const std::array<std::array<int, 9>, 8>& kirsch_masks();

//! Offsets of the 3x3 neighbors in sample order (east first, counter-clockwise).
const std::array<std::pair<int, int>, 8>& square_neighbors();

//! bit p set iff neighbor p >= center.
CodeImage lbp_encode(const GrayImage& img, const LbpParams& params = {});

//! Ternary 3x3 pattern split into (upper, lower) binary codes:
//! upper bit p iff v > c + t, lower bit p iff v < c - t.
std::pair<CodeImage, CodeImage> ltp_encode(const GrayImage& img, const LtpParams& params = {});

//! Bits of the `active_bits` strongest absolute Kirsch responses; ties go to
//! the lower direction index, so every code has exactly active_bits bits set.
CodeImage ldp_encode(const GrayImage& img, const LdpParams& params = {});

//! Sign bits of the windowed Fourier coefficients at (a,0), (0,a), (a,a),
//! (a,-a), a = 1/window, ordered [Re F1..F4, Im F1..F4]. The coefficient at
//! pixel (x, y) is sum over |dx|,|dy| <= r of I(x+dx, y+dy) exp(-2 pi i (u.dx + v.dy)).
CodeImage lpq_encode(const GrayImage& img, const LpqParams& params = {});

//! bit i set iff the correlation response of kernel i is positive.
CodeImage bsif_encode(const GrayImage& img, const FilterBank& bank);

}  // namespace palmtex
