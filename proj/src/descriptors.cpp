#include "palmtex/descriptors.hpp"

#include "palmtex/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace palmtex {

namespace {

CodeImage valid_region(const GrayImage& img, int margin, const char* who) {
    CodeImage out;
    out.margin = margin;
    out.width = img.width() - 2 * margin;
    out.height = img.height() - 2 * margin;
    if (img.empty() || out.width <= 0 || out.height <= 0)
        throw Error(ErrorCode::ImageTooSmall, std::string(who) + " needs an image larger than " +
                                                  std::to_string(2 * margin) + " pixels per side");
    out.codes.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    return out;
}

}  // namespace

const std::array<std::array<int, 9>, 8>& kirsch_masks() {
    static const std::array<std::array<int, 9>, 8> masks = {{
        {-3, -3, 5, -3, 0, 5, -3, -3, 5},    // east
        {-3, 5, 5, -3, 0, 5, -3, -3, -3},    // north-east
        {5, 5, 5, -3, 0, -3, -3, -3, -3},    // north
        {5, 5, -3, 5, 0, -3, -3, -3, -3},    // north-west
        {5, -3, -3, 5, 0, -3, 5, -3, -3},    // west
        {-3, -3, -3, 5, 0, -3, 5, 5, -3},    // south-west
        {-3, -3, -3, -3, 0, -3, 5, 5, 5},    // south
        {-3, -3, -3, -3, 0, 5, -3, 5, 5},    // south-east
    }};
    return masks;
}

const std::array<std::pair<int, int>, 8>& square_neighbors() {
    static const std::array<std::pair<int, int>, 8> offsets = {{
        {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1},
    }};
    return offsets;
}

CodeImage lbp_encode(const GrayImage& img, const LbpParams& params) {
    if (params.neighbors < 4 || params.neighbors > 8)
        throw Error(ErrorCode::InvalidArgument, "LBP supports 4..8 neighbors for 8-bit codes");

    if (params.topology == LbpTopology::square3x3) {
        if (params.neighbors != 8) throw Error(ErrorCode::InvalidArgument, "square 3x3 LBP uses exactly 8 neighbors");
        CodeImage out = valid_region(img, 1, "LBP");
        const auto& nb = square_neighbors();
        for (int y = 0; y < out.height; ++y) {
            for (int x = 0; x < out.width; ++x) {
                const int cx = x + 1, cy = y + 1;
                const int center = img.at(cx, cy);
                unsigned code = 0;
                for (int p = 0; p < 8; ++p) {
                    if (img.at(cx + nb[p].first, cy + nb[p].second) >= center) code |= 1u << p;
                }
                out.codes[static_cast<std::size_t>(y) * out.width + x] = static_cast<std::uint8_t>(code);
            }
        }
        return out;
    }

    if (!(params.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "LBP radius must be positive");
    const auto taps = circular_taps(params.radius, params.neighbors);
    const int margin = static_cast<int>(std::ceil(params.radius));
    CodeImage out = valid_region(img, margin, "LBP");
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const int cx = x + margin, cy = y + margin;
            const double center = img.at(cx, cy);
            unsigned code = 0;
            for (std::size_t p = 0; p < taps.size(); ++p) {
                const auto& t = taps[p];
                if (bilinear_at(img, cx + t.dx0, cy + t.dy0, t.fx, t.fy) >= center) code |= 1u << p;
            }
            out.codes[static_cast<std::size_t>(y) * out.width + x] = static_cast<std::uint8_t>(code);
        }
    }
    return out;
}

std::pair<CodeImage, CodeImage> ltp_encode(const GrayImage& img, const LtpParams& params) {
    if (!(params.threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "LTP threshold must be non-negative");
    CodeImage upper = valid_region(img, 1, "LTP");
    CodeImage lower = upper;
    const auto& nb = square_neighbors();
    for (int y = 0; y < upper.height; ++y) {
        for (int x = 0; x < upper.width; ++x) {
            const int cx = x + 1, cy = y + 1;
            const double hi = img.at(cx, cy) + params.threshold;
            const double lo = img.at(cx, cy) - params.threshold;
            unsigned up = 0, down = 0;
            for (int p = 0; p < 8; ++p) {
                const double v = img.at(cx + nb[p].first, cy + nb[p].second);
                if (v > hi) up |= 1u << p;
                if (v < lo) down |= 1u << p;
            }
            const auto i = static_cast<std::size_t>(y) * upper.width + x;
            upper.codes[i] = static_cast<std::uint8_t>(up);
            lower.codes[i] = static_cast<std::uint8_t>(down);
        }
    }
    return {std::move(upper), std::move(lower)};
}

CodeImage ldp_encode(const GrayImage& img, const LdpParams& params) {
    if (params.active_bits < 1 || params.active_bits > 8)
        throw Error(ErrorCode::InvalidArgument, "LDP active bits must be in 1..8");
    CodeImage out = valid_region(img, 1, "LDP");
    const auto& masks = kirsch_masks();
    std::array<int, 8> magnitude{};
    std::array<int, 8> order{};
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            std::array<int, 9> patch;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) patch[r * 3 + c] = img.at(x + c, y + r);
            for (int d = 0; d < 8; ++d) {
                int m = 0;
                for (int i = 0; i < 9; ++i) m += masks[d][i] * patch[i];
                magnitude[d] = std::abs(m);
                order[d] = d;
            }
            std::partial_sort(order.begin(), order.begin() + params.active_bits, order.end(), [&](int a, int b) {
                return magnitude[a] != magnitude[b] ? magnitude[a] > magnitude[b] : a < b;
            });
            unsigned code = 0;
            for (int i = 0; i < params.active_bits; ++i) code |= 1u << order[i];
            out.codes[static_cast<std::size_t>(y) * out.width + x] = static_cast<std::uint8_t>(code);
        }
    }
    return out;
}

CodeImage lpq_encode(const GrayImage& img, const LpqParams& params) {
    const int m = params.window;
    if (m < 3 || m % 2 == 0) throw Error(ErrorCode::InvalidArgument, "LPQ window must be odd and >= 3");
    const int r = m / 2;
    CodeImage out = valid_region(img, r, "LPQ");

    using cplx = std::complex<double>;
    std::vector<cplx> basis(static_cast<std::size_t>(m));  // exp(-2 pi i d / m), d = -r..r
    for (int d = -r; d <= r; ++d) {
        const double phase = -2.0 * std::numbers::pi * d / m;
        basis[static_cast<std::size_t>(d + r)] = {std::cos(phase), std::sin(phase)};
    }

    // Horizontal pass over every source row: plain window sum and first harmonic.
    const int h = img.height();
    const int ow = out.width;
    std::vector<double> row_sum(static_cast<std::size_t>(ow) * h);
    std::vector<cplx> row_harm(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            cplx f = 0.0;
            for (int d = 0; d < m; ++d) {
                const double v = img.at(x + d, y);
                s += v;
                f += v * basis[static_cast<std::size_t>(d)];
            }
            row_sum[static_cast<std::size_t>(y) * ow + x] = s;
            row_harm[static_cast<std::size_t>(y) * ow + x] = f;
        }
    }

    const double tol = kResponseZeroTolerance * 255.0 * m * m;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < ow; ++x) {
            cplx f1 = 0.0, f2 = 0.0, f3 = 0.0, f4 = 0.0;
            for (int d = 0; d < m; ++d) {
                const auto i = static_cast<std::size_t>(y + d) * ow + x;
                const cplx b = basis[static_cast<std::size_t>(d)];
                f1 += row_harm[i];
                f2 += row_sum[i] * b;
                f3 += row_harm[i] * b;
                f4 += row_harm[i] * std::conj(b);
            }
            const std::array<double, 8> comp = {f1.real(), f2.real(), f3.real(), f4.real(),
                                                f1.imag(), f2.imag(), f3.imag(), f4.imag()};
            unsigned code = 0;
            for (int j = 0; j < 8; ++j) {
                if (comp[j] > tol) code |= 1u << j;
            }
            out.codes[static_cast<std::size_t>(y) * ow + x] = static_cast<std::uint8_t>(code);
        }
    }
    return out;
}

CodeImage bsif_encode(const GrayImage& img, const FilterBank& bank) {
    if (bank.count() == 0) throw Error(ErrorCode::InvalidFilterBank, "empty filter bank");
    const int side = bank.side();
    if (img.empty() || side > img.width() || side > img.height())
        throw Error(ErrorCode::ImageTooSmall, "BSIF needs an image at least " + std::to_string(side) + " pixels per side");
    CodeImage out = valid_region(img, side / 2, "BSIF");
    for (int i = 0; i < bank.count(); ++i) {
        const Kernel& k = bank.kernels()[static_cast<std::size_t>(i)];
        const RealImage response = convolve_valid(img, k);
        const double tol = kResponseZeroTolerance * 255.0 * k.abs_sum();
        const auto bit = static_cast<std::uint8_t>(1u << i);
        for (std::size_t p = 0; p < out.codes.size(); ++p) {
            if (response.values[p] > tol) out.codes[p] |= bit;
        }
    }
    return out;
}

}  // namespace palmtex
