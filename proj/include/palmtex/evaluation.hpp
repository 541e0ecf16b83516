#pragma once

#include "palmtex/fusion.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace palmtex {

struct SampleKey {
    std::string subject_id;
    int session = 1;
    int sample_index = 0;
};

struct Sample {
    SampleKey key;
    FeatureVector features;
};

enum class Protocol { holdout, session_split };

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

struct ProtocolConfig {
    Protocol protocol = Protocol::holdout;
    int templates_per_subject = 4;
    int repetitions = 10;
    bool fusion_enabled = false;
    CombineRule fusion_rule = CombineRule::mean;
    std::uint64_t rng_seed = 0;
    unsigned threads = 1;

    //! Holdout scenarios used in the reference experiments: 2, 3 or 4 templates.
    bool canonical() const noexcept;
};

//! Checks protocol preconditions on sample keys alone, so a manifest can be
//! rejected before any feature extraction. Throws InsufficientSamples or
//! MissingSession.
void validate_protocol(std::span<const SampleKey> keys, const ProtocolConfig& cfg);

struct ProbeSet {
    std::string subject_id;
    std::vector<FeatureVector> vectors;
};

//! Template/probe split of one run, after optional fusion on both sides.
//! Subjects appear in ascending id order on both sides.
struct Partition {
    int run_id = 0;
    std::vector<TemplateSet> gallery;
    std::vector<ProbeSet> probes;
};

//! One partition per run. Holdout: run r shuffles each subject's samples
//! (sorted by session, index) with mt19937_64 seeded by rng_seed + r; the
//! first T become templates, the rest probes. Session split: exactly two
//! runs, session 1 -> templates in run 0 and the swap in run 1.
std::vector<Partition> make_partitions(std::span<const Sample> samples, const ProtocolConfig& cfg);

struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    int run_id = 0;
};

struct RunScores {
    ScoreSet scores;
    //! 1-based rank of the true subject for every probe, genuine order.
    std::vector<int> true_ranks;
};

//! Genuine: each probe against its own subject. Impostor: each probe against
//! every other subject, probe-major then subject order. Output does not
//! depend on the thread count.
RunScores score_partition(const Partition& partition, unsigned threads = 1);

//! Partitions and scores every run.
std::vector<RunScores> run_protocol_detailed(std::span<const Sample> samples, const ProtocolConfig& cfg);
std::vector<ScoreSet> run_protocol(std::span<const Sample> samples, const ProtocolConfig& cfg);

struct RocPoint {
    double threshold = 0.0;
    double far = 0.0;
    double frr = 0.0;
};

//! Thresholds: sorted distinct scores with sentinels min - 1 and max + 1.
//! far = #{impostor <= t} / #impostor, frr = #{genuine > t} / #genuine.
std::vector<RocPoint> roc(const ScoreSet& scores);

struct EerResult {
    double eer = 0.0;  // percent
    double threshold = 0.0;
};

//! FAR/FRR crossing, linearly interpolated between the bracketing
//! thresholds. Throws DegenerateRoc when every score is identical.
EerResult eer(std::span<const RocPoint> points);

//! min over thresholds of (far + frr) / 2, in percent.
double min_hter(std::span<const RocPoint> points);

//! Percentage of probes whose nearest subject is the true one.
double rank1(const Partition& partition);
double rank1(std::span<const int> true_ranks);

//! Identification rate (percent) at ranks 1..max_rank.
std::vector<double> cmc(std::span<const int> true_ranks, int max_rank);

struct Interval {
    double mean = 0.0;
    double half_width = 0.0;
    bool degenerate = false;  // fewer than two runs
};

inline constexpr double kZ90 = 1.6449;

//! mean +- z * s / sqrt(n), s with n - 1 denominator.
Interval confidence_interval(std::span<const double> values, double z = kZ90);

struct RunIndicators {
    int run_id = 0;
    double eer = 0.0;
    double gar_at_eer = 0.0;
    double min_hter = 0.0;
    double rank1 = 0.0;
    double eer_threshold = 0.0;
    std::size_t genuine_count = 0;
    std::size_t impostor_count = 0;
};

struct IndicatorReport {
    std::vector<RunIndicators> runs;
    Interval eer, gar_at_eer, min_hter, rank1;
};

RunIndicators indicators(const RunScores& run);
IndicatorReport summarize(std::span<const RunScores> runs);

}  // namespace palmtex
