#pragma once

#include "palmtex/descriptors.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace palmtex {

//! Normalized code histogram. Vectors are comparable only when tags match.
struct FeatureVector {
    std::string tag;
    std::vector<double> bins;

    double sum() const noexcept;
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

//! bins[c] = count(code == c) / total. `bin_count` must cover every code.
FeatureVector histogram(const CodeImage& codes, std::string tag, int bin_count = 256);

//! Joins LTP halves into one 2n-bin vector [upper / 2, lower / 2]. The tags
//! must be `<base>/upper` and `<base>/lower`; the result is tagged `<base>`.
FeatureVector concat_normalize(const FeatureVector& upper, const FeatureVector& lower);

//! Subtracts the bin mean. The result no longer sums to 1; since every
//! L1-normalized vector of a given length has the same mean, Euclidean
//! distances between centered vectors are unchanged.
FeatureVector center_zero_mean(FeatureVector v);

//! Throws TagMismatch unless a and b share tag and length.
void require_comparable(const FeatureVector& a, const FeatureVector& b);

//! One CSV line: `tag,bin_0,...,bin_{n-1}` with 12 significant digits.
std::string to_csv(const FeatureVector& v);
FeatureVector from_csv(const std::string& line);

}  // namespace palmtex
