#include "palmtex/image.hpp"

#include "palmtex/error.hpp"

#include <png.h>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

namespace palmtex {

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width <= 0 || height <= 0)
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match width x height");
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill)) {}

double Kernel::sum() const noexcept {
    double s = 0.0;
    for (double c : coeffs) s += c;
    return s;
}

double Kernel::abs_sum() const noexcept {
    double s = 0.0;
    for (double c : coeffs) s += std::abs(c);
    return s;
}

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint8_t luminance(unsigned r, unsigned g, unsigned b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::lround(std::min(255.0, y)));
}

// Netpbm header tokens: whitespace separated, '#' comments to end of line.
class PnmHeader {
public:
    explicit PnmHeader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    long next_int(const std::string& path) {
        skip_space_and_comments();
        long value = 0;
        bool any = false;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) throw Error(ErrorCode::UnsupportedFormat, "implausible PGM header in " + path);
            ++pos_;
            any = true;
        }
        if (!any) throw Error(ErrorCode::UnreadableFile, "truncated or malformed PGM header in " + path);
        return value;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 2;
};

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    const bool binary = bytes[1] == '5';
    PnmHeader header(bytes);
    const long width = header.next_int(path);
    const long height = header.next_int(path);
    const long maxval = header.next_int(path);
    if (width <= 0 || height <= 0) throw Error(ErrorCode::UnsupportedFormat, "empty PGM in " + path);
    if (maxval <= 0) throw Error(ErrorCode::UnsupportedFormat, "bad PGM maxval in " + path);
    if (maxval > 255) throw Error(ErrorCode::NotGrayConvertible, "16-bit PGM is not an 8-bit gray raster: " + path);

    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> data(n);
    if (binary) {
        header.advance(1);  // single whitespace byte after maxval
        if (bytes.size() < header.pos() + n) throw Error(ErrorCode::UnreadableFile, "truncated PGM raster in " + path);
        std::memcpy(data.data(), bytes.data() + header.pos(), n);
    } else {
        for (auto& v : data) v = static_cast<std::uint8_t>(header.next_int(path));
    }
    if (maxval != 255) {
        for (auto& v : data) {
            if (v > maxval) throw Error(ErrorCode::UnsupportedFormat, "PGM sample above maxval in " + path);
        }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw Error(ErrorCode::UnreadableFile, "bad PNG " + path + ": " + image.message);

    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    const bool linear = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
    if (gray && linear) {
        png_image_free(&image);
        throw Error(ErrorCode::NotGrayConvertible, "16-bit PNG is not an 8-bit gray raster: " + path);
    }
    const int width = static_cast<int>(image.width);
    const int height = static_cast<int>(image.height);
    if (gray) {
        image.format = PNG_FORMAT_GRAY;
        std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
        if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr))
            throw Error(ErrorCode::UnreadableFile, "bad PNG " + path + ": " + image.message);
        return GrayImage(width, height, std::move(data));
    }
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr))
        throw Error(ErrorCode::UnreadableFile, "bad PNG " + path + ": " + image.message);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = luminance(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    return GrayImage(width, height, std::move(data));
}

std::uint32_t le32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t le16(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

GrayImage decode_bmp(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    if (bytes.size() < 54) throw Error(ErrorCode::UnreadableFile, "truncated BMP header in " + path);
    const std::uint32_t offset = le32(bytes, 10);
    const std::uint32_t info_size = le32(bytes, 14);
    if (info_size < 40) throw Error(ErrorCode::UnsupportedFormat, "BMP core headers are not supported: " + path);
    const auto width = static_cast<std::int32_t>(le32(bytes, 18));
    const auto raw_height = static_cast<std::int32_t>(le32(bytes, 22));
    const std::uint16_t bpp = le16(bytes, 28);
    const std::uint32_t compression = le32(bytes, 30);
    if (compression != 0 && !(compression == 3 && bpp == 32))
        throw Error(ErrorCode::UnsupportedFormat, "compressed BMP is not supported: " + path);
    if (bpp != 8 && bpp != 24 && bpp != 32)
        throw Error(ErrorCode::NotGrayConvertible, "BMP bit depth " + std::to_string(bpp) + " is not supported: " + path);
    if (width <= 0 || raw_height == 0) throw Error(ErrorCode::UnsupportedFormat, "empty BMP in " + path);

    const bool top_down = raw_height < 0;
    const int height = top_down ? -raw_height : raw_height;
    const std::size_t stride = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
    if (bytes.size() < offset + stride * height) throw Error(ErrorCode::UnreadableFile, "truncated BMP raster in " + path);

    std::array<std::uint8_t, 256> palette{};
    if (bpp == 8) {
        std::uint32_t colors = le32(bytes, 46);
        if (colors == 0 || colors > 256) colors = 256;
        const std::size_t table = 14 + info_size;
        if (bytes.size() < table + 4 * colors) throw Error(ErrorCode::UnreadableFile, "truncated BMP palette in " + path);
        for (std::uint32_t i = 0; i < colors; ++i) {
            const std::size_t e = table + 4 * i;  // stored as B, G, R, reserved
            palette[i] = luminance(bytes[e + 2], bytes[e + 1], bytes[e]);
        }
    }

    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        const int src_row = top_down ? y : height - 1 - y;
        const std::uint8_t* row = bytes.data() + offset + stride * src_row;
        for (int x = 0; x < width; ++x) {
            std::uint8_t v;
            if (bpp == 8) {
                v = palette[row[x]];
            } else {
                const std::uint8_t* px = row + static_cast<std::size_t>(x) * (bpp / 8);
                v = luminance(px[2], px[1], px[0]);
            }
            data[static_cast<std::size_t>(y) * width + x] = v;
        }
    }
    return GrayImage(width, height, std::move(data));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    const std::string name = path.string();
    if (bytes.size() < 2) throw Error(ErrorCode::UnreadableFile, "file too short: " + name);
    if (bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '2')) return decode_pgm(bytes, name);
    if (bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '7')
        throw Error(ErrorCode::UnsupportedFormat, "only graymap Netpbm files are supported: " + name);
    static constexpr std::uint8_t png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_magic, 8) == 0) return decode_png(bytes, name);
    if (bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes, name);
    throw Error(ErrorCode::UnsupportedFormat, "unrecognized raster format: " + name);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

std::vector<CircularTap> circular_taps(double radius, int count) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    auto snap = [](double v) {
        const double r = std::round(v);
        return std::abs(v - r) < 1e-9 ? r : v;
    };
    std::vector<CircularTap> taps(static_cast<std::size_t>(count));
    for (int p = 0; p < count; ++p) {
        const double angle = 2.0 * std::numbers::pi * p / count;
        const double sx = snap(radius * std::cos(angle));
        const double sy = snap(-radius * std::sin(angle));
        auto& t = taps[static_cast<std::size_t>(p)];
        t.dx0 = static_cast<int>(std::floor(sx));
        t.dy0 = static_cast<int>(std::floor(sy));
        t.fx = sx - t.dx0;
        t.fy = sy - t.dy0;
    }
    return taps;
}

double bilinear_at(const GrayImage& img, int x0, int y0, double fx, double fy) noexcept {
    // Lerp form: a flat neighborhood reproduces its value exactly.
    const double a = img.at(x0, y0);
    if (fx == 0.0 && fy == 0.0) return a;
    if (fy == 0.0) return a + fx * (img.at(x0 + 1, y0) - a);
    if (fx == 0.0) return a + fy * (img.at(x0, y0 + 1) - a);
    const double top = a + fx * (img.at(x0 + 1, y0) - a);
    const double c = img.at(x0, y0 + 1);
    const double bottom = c + fx * (img.at(x0 + 1, y0 + 1) - c);
    return top + fy * (bottom - top);
}

std::vector<double> sample_circular(const GrayImage& img, PixelSite center, double radius, int count) {
    const auto taps = circular_taps(radius, count);
    const int reach = static_cast<int>(std::ceil(radius));
    if (center.x - reach < 0 || center.y - reach < 0 || center.x + reach >= img.width() ||
        center.y + reach >= img.height()) {
        std::ostringstream msg;
        msg << "circle of radius " << radius << " around (" << center.x << ", " << center.y << ") leaves the "
            << img.width() << "x" << img.height() << " image";
        throw Error(ErrorCode::OutOfBounds, msg.str());
    }
    std::vector<double> values;
    values.reserve(taps.size());
    for (const auto& t : taps) values.push_back(bilinear_at(img, center.x + t.dx0, center.y + t.dy0, t.fx, t.fy));
    return values;
}

RealImage convolve_valid(const GrayImage& img, const Kernel& kernel) {
    const int k = kernel.side;
    if (k <= 0 || k % 2 == 0 || kernel.coeffs.size() != static_cast<std::size_t>(k) * k)
        throw Error(ErrorCode::InvalidArgument, "kernel must be square with an odd side");
    if (k > img.width() || k > img.height())
        throw Error(ErrorCode::KernelTooLarge, "kernel side " + std::to_string(k) + " exceeds image " +
                                                   std::to_string(img.width()) + "x" + std::to_string(img.height()));
    RealImage out;
    out.width = img.width() - k + 1;
    out.height = img.height() - k + 1;
    out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);

    // Row-at-a-time accumulation keeps the inner loop contiguous.
    std::vector<double> src_row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < out.height; ++y) {
        double* dst = out.values.data() + static_cast<std::size_t>(y) * out.width;
        for (int i = 0; i < k; ++i) {
            const auto* row = img.data().data() + static_cast<std::size_t>(y + i) * img.width();
            for (int x = 0; x < img.width(); ++x) src_row[static_cast<std::size_t>(x)] = row[x];
            for (int j = 0; j < k; ++j) {
                const double w = kernel(i, j);
                const double* src = src_row.data() + j;
                for (int x = 0; x < out.width; ++x) dst[x] += w * src[x];
            }
        }
    }
    return out;
}

}  // namespace palmtex
