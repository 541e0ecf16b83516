#include "test_util.hpp"

#include "palmtex/error.hpp"
#include "palmtex/fusion.hpp"

#include <algorithm>

using namespace palmtex;

namespace {

FeatureVector random_hist(std::mt19937& rng, const std::string& tag = "t", std::size_t n = 256) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureVector v{tag, std::vector<double>(n)};
    double s = 0;
    for (auto& b : v.bins) s += (b = u(rng));
    for (auto& b : v.bins) b /= s;
    return v;
}

FeatureVector delta(int at) {
    FeatureVector v{"t", std::vector<double>(256, 0.0)};
    v.bins[static_cast<std::size_t>(at)] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("fuse_pairs cardinality is n choose 2") {
    std::mt19937 rng(1);
    const std::vector<std::pair<int, std::size_t>> table = {{2, 1}, {3, 3}, {4, 6}, {8, 28}, {9, 36}, {10, 45}};
    for (auto [n, expected] : table) {
        std::vector<FeatureVector> vs;
        for (int i = 0; i < n; ++i) vs.push_back(random_hist(rng));
        CHECK(fuse_pairs(vs).size() == expected);
    }
    for (int n = 2; n <= 12; ++n) {
        std::vector<FeatureVector> vs(static_cast<std::size_t>(n), delta(0));
        CHECK(fuse_pairs(vs).size() == static_cast<std::size_t>(n * (n - 1) / 2));
    }
}

TEST_CASE("fuse_pairs values and order") {
    std::mt19937 rng(2);
    std::vector<FeatureVector> vs = {random_hist(rng), random_hist(rng), random_hist(rng), random_hist(rng)};
    const auto fused = fuse_pairs(vs);
    const std::vector<std::pair<int, int>> order = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto [i, j] = order[k];
        for (std::size_t b = 0; b < 256; ++b) {
            CHECK(fused[k].bins[b] == (vs[i].bins[b] + vs[j].bins[b]) / 2.0);
            const double lo = std::min({vs[0].bins[b], vs[1].bins[b], vs[2].bins[b], vs[3].bins[b]});
            const double hi = std::max({vs[0].bins[b], vs[1].bins[b], vs[2].bins[b], vs[3].bins[b]});
            CHECK(fused[k].bins[b] >= lo);
            CHECK(fused[k].bins[b] <= hi);
        }
        CHECK(std::abs(fused[k].sum() - 1.0) <= 1e-9);
    }
    const FeatureVector v = random_hist(rng);
    CHECK(fuse_pairs({v, v}).front() == v);
}

TEST_CASE("fuse_pairs errors") {
    std::mt19937 rng(3);
    CHECK_THROWS_CODE(fuse_pairs({random_hist(rng)}), ErrorCode::TooFewVectors);
    CHECK_THROWS_CODE(fuse_pairs({random_hist(rng, "a"), random_hist(rng, "b")}), ErrorCode::TagMismatch);
}

TEST_CASE("pairwise means reduce per-bin variance") {
    // i.i.d. bins: each of 8 snapshots draws every bin independently.
    std::mt19937 rng(4);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int draws = 1000;
    std::vector<double> raw, fused;
    for (int d = 0; d < draws; ++d) {
        std::vector<FeatureVector> vs;
        for (int s = 0; s < 8; ++s) {
            FeatureVector v{"t", std::vector<double>(4)};
            for (auto& b : v.bins) b = 1.0 + noise(rng);
            raw.push_back(v.bins[0]);
            vs.push_back(std::move(v));
        }
        for (const auto& f : fuse_pairs(vs)) fused.push_back(f.bins[0]);
    }
    auto variance = [](const std::vector<double>& x) {
        double m = 0, s = 0;
        for (double v : x) m += v;
        m /= x.size();
        for (double v : x) s += (v - m) * (v - m);
        return s / (x.size() - 1);
    };
    CHECK(variance(fused) < variance(raw));
}

TEST_CASE("fuse_probe") {
    std::mt19937 rng(5);
    const FeatureVector a = random_hist(rng);
    CHECK(fuse_probe(a, a) == a);
    const FeatureVector m = fuse_probe(delta(0), delta(1));
    CHECK(m.bins[0] == 0.5);
    CHECK(m.bins[1] == 0.5);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(fuse_probe(random_hist(rng), random_hist(rng)).sum() - 1.0) <= 1e-9);
    CHECK_THROWS_CODE(fuse_probe(random_hist(rng, "a"), random_hist(rng, "b")), ErrorCode::TagMismatch);
}

TEST_CASE("combine rules") {
    std::mt19937 rng(6);
    const FeatureVector a = random_hist(rng), b = random_hist(rng);
    CHECK(combine(a, a, CombineRule::mean) == a);
    CHECK_THROWS_CODE(combine(a, a, CombineRule::absdiff), ErrorCode::DegenerateZeroVector);
    CHECK_THROWS_CODE(combine(delta(1), delta(2), CombineRule::product), ErrorCode::DegenerateZeroVector);
    const FeatureVector p = combine(delta(3), delta(3), CombineRule::product);
    CHECK(p == delta(3));
    for (auto rule : {CombineRule::sqrt, CombineRule::product, CombineRule::absdiff}) {
        const FeatureVector c = combine(a, b, rule);
        CHECK(std::abs(c.sum() - 1.0) <= 1e-9);
        CHECK(std::all_of(c.bins.begin(), c.bins.end(), [](double v) { return v >= 0.0; }));
    }
    const FeatureVector g = combine(a, b, CombineRule::sqrt);
    double s = 0;
    for (std::size_t i = 0; i < 256; ++i) s += std::sqrt(a.bins[i] * b.bins[i]);
    CHECK(g.bins[7] == doctest::Approx(std::sqrt(a.bins[7] * b.bins[7]) / s).epsilon(1e-12));
    CHECK(parse_combine_rule("absdiff") == CombineRule::absdiff);
    CHECK_FALSE(parse_combine_rule("max").has_value());
}
