#include "palmtex/fusion.hpp"

#include "palmtex/error.hpp"

#include <cmath>

namespace palmtex {

std::string_view to_string(CombineRule rule) {
    switch (rule) {
        case CombineRule::mean: return "mean";
        case CombineRule::sqrt: return "sqrt";
        case CombineRule::product: return "product";
        case CombineRule::absdiff: return "absdiff";
    }
    return "?";
}

std::optional<CombineRule> parse_combine_rule(std::string_view name) {
    for (auto r : {CombineRule::mean, CombineRule::sqrt, CombineRule::product, CombineRule::absdiff}) {
        if (to_string(r) == name) return r;
    }
    return std::nullopt;
}

FeatureVector combine(const FeatureVector& a, const FeatureVector& b, CombineRule rule) {
    require_comparable(a, b);
    FeatureVector out{a.tag, std::vector<double>(a.bins.size())};
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
        const double x = a.bins[i], y = b.bins[i];
        switch (rule) {
            case CombineRule::mean: out.bins[i] = (x + y) / 2.0; break;
            case CombineRule::sqrt: out.bins[i] = std::sqrt(x * y); break;
            case CombineRule::product: out.bins[i] = x * y; break;
            case CombineRule::absdiff: out.bins[i] = std::abs(x - y); break;
        }
    }
    if (rule == CombineRule::mean) return out;
    const double total = out.sum();
    if (!(total > 0.0))
        throw Error(ErrorCode::DegenerateZeroVector, std::string(to_string(rule)) + " rule produced the zero vector");
    for (double& v : out.bins) v /= total;
    return out;
}

FeatureVector fuse_probe(const FeatureVector& a, const FeatureVector& b) {
    return combine(a, b, CombineRule::mean);
}

std::vector<FeatureVector> fuse_pairs(const std::vector<FeatureVector>& vectors, CombineRule rule) {
    if (vectors.size() < 2)
        throw Error(ErrorCode::TooFewVectors, "pairwise fusion needs at least 2 vectors, got " +
                                                  std::to_string(vectors.size()));
    std::vector<FeatureVector> out;
    out.reserve(vectors.size() * (vectors.size() - 1) / 2);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) out.push_back(combine(vectors[i], vectors[j], rule));
    }
    return out;
}

}  // namespace palmtex
