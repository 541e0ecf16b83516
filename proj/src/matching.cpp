#include "palmtex/matching.hpp"

#include "palmtex/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace palmtex {

double euclidean(const FeatureVector& a, const FeatureVector& b) {
    require_comparable(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
        const double d = a.bins[i] - b.bins[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double verify(const FeatureVector& probe, const TemplateSet& templates) {
    if (templates.vectors.empty())
        throw Error(ErrorCode::EmptyTemplateSet, "subject '" + templates.subject_id + "' has no templates");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : templates.vectors) best = std::min(best, euclidean(probe, t));
    return best;
}

std::vector<SubjectScore> rank_subjects(const FeatureVector& probe, std::span<const TemplateSet> gallery) {
    if (gallery.empty()) throw Error(ErrorCode::EmptyGallery, "identification needs a non-empty gallery");
    std::vector<SubjectScore> scores;
    scores.reserve(gallery.size());
    for (const auto& subject : gallery) scores.push_back({subject.subject_id, verify(probe, subject)});
    std::sort(scores.begin(), scores.end(), [](const SubjectScore& a, const SubjectScore& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.subject_id < b.subject_id;
    });
    // A subject split over several sets keeps only its best entry.
    std::vector<SubjectScore> distinct;
    distinct.reserve(scores.size());
    std::unordered_set<std::string> seen;
    for (auto& s : scores) {
        if (seen.insert(s.subject_id).second) distinct.push_back(std::move(s));
    }
    return distinct;
}

std::vector<std::string> identify(const FeatureVector& probe, std::span<const TemplateSet> gallery, int rank) {
    if (rank < 1) throw Error(ErrorCode::InvalidArgument, "rank must be >= 1");
    const auto scores = rank_subjects(probe, gallery);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < scores.size() && ids.size() < static_cast<std::size_t>(rank); ++i)
        ids.push_back(scores[i].subject_id);
    return ids;
}

}  // namespace palmtex
