#pragma once

#include "palmtex/fusion.hpp"

#include <span>
#include <string>
#include <vector>

namespace palmtex {

//! sqrt(sum (a_i - b_i)^2); throws TagMismatch for incomparable vectors.
double euclidean(const FeatureVector& a, const FeatureVector& b);

//! Distance from probe to the closest template of the claimed subject.
//! Accept iff the returned distance <= threshold.
double verify(const FeatureVector& probe, const TemplateSet& templates);

struct SubjectScore {
    std::string subject_id;
    double distance = 0.0;
};

//! Every gallery subject scored by its best template, ascending distance,
//! ties broken by ascending subject id.
std::vector<SubjectScore> rank_subjects(const FeatureVector& probe, std::span<const TemplateSet> gallery);

//! The first `rank` subject ids of rank_subjects.
std::vector<std::string> identify(const FeatureVector& probe, std::span<const TemplateSet> gallery, int rank);

}  // namespace palmtex
