#include "test_util.hpp"

#include "palmtex/error.hpp"
#include "palmtex/matching.hpp"

#include <algorithm>
#include <cmath>

using namespace palmtex;

namespace {

FeatureVector random_hist(std::mt19937& rng, const std::string& tag = "t") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureVector v{tag, std::vector<double>(256)};
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

TEST_CASE("euclidean") {
    std::mt19937 rng(1);
    const FeatureVector v = random_hist(rng);
    CHECK(euclidean(v, v) == 0.0);
    CHECK(euclidean(delta(0), delta(1)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    for (int i = 0; i < 20; ++i) {
        const FeatureVector a = random_hist(rng), b = random_hist(rng), c = random_hist(rng);
        double s = 0;
        for (std::size_t k = 0; k < 256; ++k) s += (a.bins[k] - b.bins[k]) * (a.bins[k] - b.bins[k]);
        CHECK(std::abs(euclidean(a, b) - std::sqrt(s)) <= 1e-12);
        CHECK(euclidean(a, b) == euclidean(b, a));
        CHECK(euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-9);
    }
    CHECK_THROWS_CODE(euclidean(random_hist(rng, "a"), random_hist(rng, "b")), ErrorCode::TagMismatch);
}

TEST_CASE("verify") {
    std::mt19937 rng(2);
    const FeatureVector p = random_hist(rng);
    const TemplateSet with_probe{"S1", {random_hist(rng), p, random_hist(rng)}, false};
    CHECK(verify(p, with_probe) == 0.0);
    const TemplateSet single{"S1", {random_hist(rng)}, false};
    CHECK(verify(p, single) == euclidean(p, single.vectors[0]));

    for (int i = 0; i < 10; ++i) {
        TemplateSet four{"S", {random_hist(rng), random_hist(rng), random_hist(rng), random_hist(rng)}, false};
        double best = 1e9;
        for (const auto& t : four.vectors) best = std::min(best, euclidean(p, t));
        CHECK(verify(p, four) == best);
        const double before = verify(p, four);
        four.vectors.push_back(random_hist(rng));
        CHECK(verify(p, four) <= before);
    }
    CHECK_THROWS_CODE(verify(p, TemplateSet{"S", {}, false}), ErrorCode::EmptyTemplateSet);
    CHECK_THROWS_CODE(verify(p, TemplateSet{"S", {random_hist(rng, "x")}, false}), ErrorCode::TagMismatch);
}

TEST_CASE("identify") {
    std::mt19937 rng(3);
    SUBCASE("probe equal to a template is rank 1") {
        std::vector<TemplateSet> g;
        for (int s = 0; s < 5; ++s) g.push_back({"S" + std::to_string(s), {random_hist(rng), random_hist(rng)}, false});
        CHECK(identify(g[3].vectors[1], g, 1) == std::vector<std::string>{"S3"});
    }
    SUBCASE("equidistant subjects: lower id first") {
        const std::vector<TemplateSet> g = {{"B", {delta(1)}, false}, {"A", {delta(2)}, false}};
        CHECK(identify(delta(0), g, 2) == std::vector<std::string>{"A", "B"});
    }
    SUBCASE("10-subject gallery matches the exhaustive sort, any gallery order") {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<TemplateSet> g;
            for (int s = 0; s < 10; ++s)
                g.push_back({"S" + std::to_string(s), {random_hist(rng), random_hist(rng), random_hist(rng)}, false});
            const FeatureVector p = random_hist(rng);
            std::vector<std::pair<double, std::string>> ref;
            for (const auto& t : g) {
                double best = 1e9;
                for (const auto& v : t.vectors) best = std::min(best, euclidean(p, v));
                ref.push_back({best, t.subject_id});
            }
            std::sort(ref.begin(), ref.end());
            std::vector<std::string> expected;
            for (const auto& r : ref) expected.push_back(r.second);
            CHECK(identify(p, g, 10) == expected);
            CHECK(identify(p, g, 3) == std::vector<std::string>(expected.begin(), expected.begin() + 3));
            std::shuffle(g.begin(), g.end(), rng);
            CHECK(identify(p, g, 10) == expected);
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS_CODE(identify(delta(0), std::vector<TemplateSet>{}, 1), ErrorCode::EmptyGallery);
    }
}
