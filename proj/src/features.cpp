#include "palmtex/features.hpp"

#include "palmtex/error.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace palmtex {

double FeatureVector::sum() const noexcept {
    return std::accumulate(bins.begin(), bins.end(), 0.0);
}

FeatureVector histogram(const CodeImage& codes, std::string tag, int bin_count) {
    if (codes.codes.empty()) throw Error(ErrorCode::EmptyCodeImage, "cannot histogram an empty code image");
    if (bin_count < 1 || bin_count > 256) throw Error(ErrorCode::InvalidArgument, "bin count must be in 1..256");
    std::vector<std::size_t> counts(static_cast<std::size_t>(bin_count), 0);
    for (std::uint8_t c : codes.codes) {
        if (c >= bin_count) throw Error(ErrorCode::InvalidArgument, "code " + std::to_string(c) + " exceeds bin range");
        ++counts[c];
    }
    FeatureVector v{std::move(tag), std::vector<double>(counts.size())};
    const double total = static_cast<double>(codes.codes.size());
    for (std::size_t i = 0; i < counts.size(); ++i) v.bins[i] = static_cast<double>(counts[i]) / total;
    return v;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

FeatureVector concat_normalize(const FeatureVector& upper, const FeatureVector& lower) {
    if (!ends_with(upper.tag, "/upper") || !ends_with(lower.tag, "/lower"))
        throw Error(ErrorCode::TagMismatch, "expected LTP upper/lower halves, got '" + upper.tag + "' and '" +
                                                lower.tag + "'");
    const std::string base = upper.tag.substr(0, upper.tag.size() - 6);
    if (base.rfind("ltp", 0) != 0 || lower.tag.substr(0, lower.tag.size() - 6) != base)
        throw Error(ErrorCode::TagMismatch, "LTP halves come from different descriptors");
    if (upper.bins.size() != lower.bins.size())
        throw Error(ErrorCode::TagMismatch, "LTP halves differ in length");
    FeatureVector out{base, {}};
    out.bins.reserve(upper.bins.size() * 2);
    for (double b : upper.bins) out.bins.push_back(b / 2.0);
    for (double b : lower.bins) out.bins.push_back(b / 2.0);
    return out;
}

FeatureVector center_zero_mean(FeatureVector v) {
    if (v.bins.empty()) return v;
    const double mean = v.sum() / static_cast<double>(v.bins.size());
    for (double& b : v.bins) b -= mean;
    return v;
}

void require_comparable(const FeatureVector& a, const FeatureVector& b) {
    if (a.tag != b.tag) throw Error(ErrorCode::TagMismatch, "'" + a.tag + "' vs '" + b.tag + "'");
    if (a.bins.size() != b.bins.size())
        throw Error(ErrorCode::TagMismatch, "length " + std::to_string(a.bins.size()) + " vs " +
                                                std::to_string(b.bins.size()));
}

std::string to_csv(const FeatureVector& v) {
    std::string line = v.tag;
    char buf[32];
    for (double b : v.bins) {
        const int n = std::snprintf(buf, sizeof buf, "%.12g", b);
        line += ',';
        line.append(buf, static_cast<std::size_t>(n));
    }
    return line;
}

FeatureVector from_csv(const std::string& line) {
    FeatureVector v;
    std::istringstream in(line);
    std::string field;
    if (!std::getline(in, v.tag, ',') || v.tag.empty())
        throw Error(ErrorCode::InvalidArgument, "feature line lacks a tag");
    while (std::getline(in, field, ',')) {
        try {
            std::size_t used = 0;
            v.bins.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad feature value '" + field + "'");
        }
    }
    if (v.bins.empty()) throw Error(ErrorCode::InvalidArgument, "feature line has no bins");
    return v;
}

}  // namespace palmtex
