#pragma once

#include "palmtex/features.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palmtex {

//! One subject's enrolled vectors; `fused` marks pairwise-averaged sets.
struct TemplateSet {
    std::string subject_id;
    std::vector<FeatureVector> vectors;
    bool fused = false;
};

enum class CombineRule { mean, sqrt, product, absdiff };

std::string_view to_string(CombineRule rule);
std::optional<CombineRule> parse_combine_rule(std::string_view name);

//! Elementwise combination of two vectors. Non-mean rules are re-normalized
//! to sum 1; a zero result throws DegenerateZeroVector.
FeatureVector combine(const FeatureVector& a, const FeatureVector& b, CombineRule rule);

//! Mean of two probe snapshots.
FeatureVector fuse_probe(const FeatureVector& a, const FeatureVector& b);

//! One combined vector per unordered pair (i, j), i < j, in lexicographic
//! order: C(n, 2) outputs. Throws TooFewVectors for n < 2.
std::vector<FeatureVector> fuse_pairs(const std::vector<FeatureVector>& vectors,
                                      CombineRule rule = CombineRule::mean);

}  // namespace palmtex
