#include "palmtex/synthgen.hpp"

#include "palmtex/error.hpp"
#include "palmtex/parallel.hpp"
#include "palmtex/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace palmtex {

void SynthConfig::validate() const {
    if (subjects < 2) throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs >= 2 subjects");
    if (samples_per_subject < 3) throw Error(ErrorCode::InvalidArgument, "synthetic dataset needs >= 3 samples per subject");
    if (sessions != 1 && sessions != 2) throw Error(ErrorCode::InvalidArgument, "sessions must be 1 or 2");
    if (image_side < 64) throw Error(ErrorCode::InvalidArgument, "image side must be >= 64");
    if (!(noise_sigma >= 0.0) || !(jitter >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "noise and jitter must be non-negative");
}

namespace {

struct Point {
    double x, y;
};

Point catmull_rom(const Point& p0, const Point& p1, const Point& p2, const Point& p3, double t) {
    const double t2 = t * t, t3 = t2 * t;
    auto blend = [&](double a, double b, double c, double d) {
        return 0.5 * ((2 * b) + (-a + c) * t + (2 * a - 5 * b + 4 * c - d) * t2 + (-a + 3 * b - 3 * c + d) * t3);
    };
    return {blend(p0.x, p1.x, p2.x, p3.x), blend(p0.y, p1.y, p2.y, p3.y)};
}

double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Darkness field of one subject in canonical coordinates.
std::vector<double> subject_pattern(int side, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> field(static_cast<std::size_t>(side) * side, 0.0);
    const int curves = 3 + static_cast<int>(uniform_below(rng, 4));
    for (int c = 0; c < curves; ++c) {
        std::array<Point, 5> ctrl;
        // Start and end near opposite borders so curves cross the ROI.
        const bool horizontal = uniform_below(rng, 2) == 0;
        for (int i = 0; i < 5; ++i) {
            const double along = (i / 4.0) * 1.2 - 0.1;
            const double across = uniform(rng, 0.1, 0.9);
            ctrl[static_cast<std::size_t>(i)] = horizontal ? Point{along * side, across * side} : Point{across * side, along * side};
        }
        const double width = uniform(rng, 1.2, 2.8);
        const double depth = uniform(rng, 35.0, 70.0);
        const int reach = static_cast<int>(std::ceil(3.0 * width));

        for (int seg = 0; seg < 4; ++seg) {
            const Point& p0 = ctrl[static_cast<std::size_t>(std::max(seg - 1, 0))];
            const Point& p1 = ctrl[static_cast<std::size_t>(seg)];
            const Point& p2 = ctrl[static_cast<std::size_t>(seg + 1)];
            const Point& p3 = ctrl[static_cast<std::size_t>(std::min(seg + 2, 4))];
            const double span = std::hypot(p2.x - p1.x, p2.y - p1.y);
            const int steps = std::max(8, static_cast<int>(span * 2.0));
            for (int s = 0; s <= steps; ++s) {
                const Point p = catmull_rom(p0, p1, p2, p3, static_cast<double>(s) / steps);
                const int cx = static_cast<int>(std::lround(p.x));
                const int cy = static_cast<int>(std::lround(p.y));
                for (int y = std::max(0, cy - reach); y <= std::min(side - 1, cy + reach); ++y) {
                    for (int x = std::max(0, cx - reach); x <= std::min(side - 1, cx + reach); ++x) {
                        const double d2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
                        const double v = depth * std::exp(-d2 / (2.0 * width * width));
                        auto& cell = field[static_cast<std::size_t>(y) * side + x];
                        cell = std::max(cell, v);
                    }
                }
            }
        }
    }
    return field;
}

double sample_field(const std::vector<double>& field, int side, double x, double y) {
    const double fx0 = std::floor(x), fy0 = std::floor(y);
    const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
    const double ax = x - fx0, ay = y - fy0;
    auto at = [&](int xi, int yi) {
        if (xi < 0 || yi < 0 || xi >= side || yi >= side) return 0.0;
        return field[static_cast<std::size_t>(yi) * side + xi];
    };
    return (1 - ax) * (1 - ay) * at(x0, y0) + ax * (1 - ay) * at(x0 + 1, y0) + (1 - ax) * ay * at(x0, y0 + 1) +
           ax * ay * at(x0 + 1, y0 + 1);
}

GrayImage render_sample(const std::vector<double>& field, const SynthConfig& cfg, int session, std::uint64_t seed) {
    Rng rng(seed);
    const int side = cfg.image_side;
    const double j = cfg.jitter;
    double tx = uniform(rng, -j, j);
    double ty = uniform(rng, -j, j);
    const double angle = uniform(rng, -1.0, 1.0) * j * 0.5 * 3.14159265358979323846 / 180.0;
    const double scale = 1.0 + uniform(rng, -1.0, 1.0) * j * 0.005;
    double gx = uniform(rng, -1.0, 1.0) * 4.0 * j;
    double gy = uniform(rng, -1.0, 1.0) * 4.0 * j;
    if (session == 2) {
        tx += j;
        ty -= 0.5 * j;
        gx += 3.0 * j;
    }

    const double c = (side - 1) / 2.0;
    const double ca = std::cos(angle) * scale, sa = std::sin(angle) * scale;
    std::vector<std::uint8_t> data(static_cast<std::size_t>(side) * side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double px = x - c, py = y - c;
            const double sx = ca * px - sa * py + c + tx;
            const double sy = sa * px + ca * py + c + ty;
            double v = 128.0 + gx * px / side + gy * py / side - sample_field(field, side, sx, sy);
            if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * standard_normal(rng);
            data[static_cast<std::size_t>(y) * side + x] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return GrayImage(side, side, std::move(data));
}

std::string subject_name(int s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%03d", s + 1);
    return buf;
}

}  // namespace

std::vector<SynthSample> synthesize(const SynthConfig& cfg, unsigned threads) {
    cfg.validate();
    const auto per = static_cast<std::size_t>(cfg.samples_per_subject);
    std::vector<SynthSample> out(static_cast<std::size_t>(cfg.subjects) * per);
    parallel_for(static_cast<std::size_t>(cfg.subjects), threads, [&](std::size_t s) {
        const std::uint64_t subject_seed = mix_seed(cfg.seed, s);
        const auto field = subject_pattern(cfg.image_side, subject_seed);
        const int first_session_count = cfg.sessions == 2 ? (cfg.samples_per_subject + 1) / 2 : cfg.samples_per_subject;
        for (std::size_t i = 0; i < per; ++i) {
            const int session = static_cast<int>(i) < first_session_count ? 1 : 2;
            const int index = session == 1 ? static_cast<int>(i) + 1 : static_cast<int>(i) - first_session_count + 1;
            auto& sample = out[s * per + i];
            sample.key = {subject_name(static_cast<int>(s)), session, index};
            sample.image = render_sample(field, cfg, session, mix_seed(subject_seed, 1000 + i));
        }
    });
    return out;
}

std::vector<ManifestRow> generate(const SynthConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
    const auto samples = synthesize(cfg, threads);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<ManifestRow> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        const std::filesystem::path rel = std::filesystem::path(s.key.subject_id) /
                                          (std::to_string(s.key.session) + "_" + std::to_string(s.key.sample_index) + ".pgm");
        std::filesystem::create_directories(out_dir / rel.parent_path(), ec);
        if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (out_dir / rel.parent_path()).string());
        save_pgm(s.image, out_dir / rel);
        rows.push_back({s.key, rel, ""});
    }
    write_manifest(rows, out_dir / "manifest.csv");
    return rows;
}

}  // namespace palmtex
