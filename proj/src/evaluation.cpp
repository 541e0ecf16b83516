#include "palmtex/evaluation.hpp"

#include "palmtex/error.hpp"
#include "palmtex/matching.hpp"
#include "palmtex/parallel.hpp"
#include "palmtex/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace palmtex {

std::string_view to_string(Protocol p) {
    return p == Protocol::holdout ? "holdout" : "session_split";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
    if (name == "holdout") return Protocol::holdout;
    if (name == "session_split") return Protocol::session_split;
    return std::nullopt;
}

bool ProtocolConfig::canonical() const noexcept {
    return protocol != Protocol::holdout || (templates_per_subject >= 2 && templates_per_subject <= 4);
}

namespace {

// subject id -> (session, index) pairs, both levels sorted.
std::map<std::string, std::vector<std::pair<int, int>>> group_keys(std::span<const SampleKey> keys) {
    std::map<std::string, std::vector<std::pair<int, int>>> groups;
    for (const auto& k : keys) groups[k.subject_id].emplace_back(k.session, k.sample_index);
    for (auto& [id, v] : groups) std::sort(v.begin(), v.end());
    return groups;
}

std::string count_message(const std::string& subject, std::size_t have, std::size_t need, const char* what) {
    return "subject '" + subject + "' has " + std::to_string(have) + " " + what + ", needs " + std::to_string(need);
}

}  // namespace

void validate_protocol(std::span<const SampleKey> keys, const ProtocolConfig& cfg) {
    const auto groups = group_keys(keys);
    if (groups.size() < 2)
        throw Error(ErrorCode::InsufficientSamples, "impostor scoring needs at least 2 subjects");
    const std::size_t min_side = cfg.fusion_enabled ? 2 : 1;

    if (cfg.protocol == Protocol::holdout) {
        if (cfg.repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
        if (cfg.templates_per_subject < static_cast<int>(min_side))
            throw Error(ErrorCode::InsufficientSamples,
                        cfg.fusion_enabled ? "fusion needs at least 2 templates per subject"
                                           : "at least 1 template per subject is required");
        const auto need = static_cast<std::size_t>(cfg.templates_per_subject) + min_side;
        for (const auto& [id, samples] : groups) {
            if (samples.size() < need) throw Error(ErrorCode::InsufficientSamples, count_message(id, samples.size(), need, "samples"));
        }
        return;
    }

    for (const auto& [id, samples] : groups) {
        std::size_t first = 0, second = 0;
        for (const auto& [session, index] : samples) {
            if (session == 1) ++first;
            else if (session == 2) ++second;
            else throw Error(ErrorCode::MissingSession, "session split expects sessions 1 and 2; subject '" + id +
                                                            "' has session " + std::to_string(session));
        }
        if (first == 0 || second == 0)
            throw Error(ErrorCode::MissingSession, "subject '" + id + "' lacks session " + (first == 0 ? "1" : "2"));
        if (first < min_side || second < min_side)
            throw Error(ErrorCode::InsufficientSamples, count_message(id, std::min(first, second), min_side, "samples in a session"));
    }
}

std::vector<Partition> make_partitions(std::span<const Sample> samples, const ProtocolConfig& cfg) {
    std::vector<SampleKey> keys;
    keys.reserve(samples.size());
    for (const auto& s : samples) keys.push_back(s.key);
    validate_protocol(keys, cfg);

    std::map<std::string, std::vector<const Sample*>> by_subject;
    for (const auto& s : samples) by_subject[s.key.subject_id].push_back(&s);
    for (auto& [id, v] : by_subject) {
        std::sort(v.begin(), v.end(), [](const Sample* a, const Sample* b) {
            return std::tie(a->key.session, a->key.sample_index) < std::tie(b->key.session, b->key.sample_index);
        });
    }

    auto expand = [&](std::vector<FeatureVector> v) {
        return cfg.fusion_enabled ? fuse_pairs(v, cfg.fusion_rule) : v;
    };
    auto add_subject = [&](Partition& part, const std::string& id, std::vector<FeatureVector> templates,
                           std::vector<FeatureVector> probes) {
        part.gallery.push_back({id, expand(std::move(templates)), cfg.fusion_enabled});
        part.probes.push_back({id, expand(std::move(probes))});
    };

    std::vector<Partition> parts;
    if (cfg.protocol == Protocol::holdout) {
        for (int r = 0; r < cfg.repetitions; ++r) {
            Partition part;
            part.run_id = r;
            Rng rng(cfg.rng_seed + static_cast<std::uint64_t>(r));
            for (const auto& [id, list] : by_subject) {
                std::vector<std::size_t> order(list.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                shuffle(std::span<std::size_t>(order), rng);
                const auto split = order.begin() + cfg.templates_per_subject;
                std::sort(order.begin(), split);
                std::sort(split, order.end());
                std::vector<FeatureVector> templates, probes;
                for (auto it = order.begin(); it != order.end(); ++it)
                    (it < split ? templates : probes).push_back(list[*it]->features);
                add_subject(part, id, std::move(templates), std::move(probes));
            }
            parts.push_back(std::move(part));
        }
        return parts;
    }

    for (int r = 0; r < 2; ++r) {
        Partition part;
        part.run_id = r;
        const int template_session = r == 0 ? 1 : 2;
        for (const auto& [id, list] : by_subject) {
            std::vector<FeatureVector> templates, probes;
            for (const Sample* s : list) (s->key.session == template_session ? templates : probes).push_back(s->features);
            add_subject(part, id, std::move(templates), std::move(probes));
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

RunScores score_partition(const Partition& partition, unsigned threads) {
    const auto& gallery = partition.gallery;
    if (gallery.empty()) throw Error(ErrorCode::EmptyGallery, "partition has no enrolled subjects");

    std::map<std::string, std::size_t> subject_index;
    for (std::size_t i = 0; i < gallery.size(); ++i) subject_index.emplace(gallery[i].subject_id, i);

    struct ProbeRef {
        std::size_t subject;
        const FeatureVector* vector;
    };
    std::vector<ProbeRef> flat;
    for (const auto& set : partition.probes) {
        const auto it = subject_index.find(set.subject_id);
        if (it == subject_index.end())
            throw Error(ErrorCode::InvalidArgument, "probe subject '" + set.subject_id + "' is not enrolled");
        for (const auto& v : set.vectors) flat.push_back({it->second, &v});
    }

    const std::size_t subjects = gallery.size();
    std::vector<double> distances(flat.size() * subjects);
    parallel_for(flat.size(), threads, [&](std::size_t p) {
        for (std::size_t s = 0; s < subjects; ++s) distances[p * subjects + s] = verify(*flat[p].vector, gallery[s]);
    });

    RunScores out;
    out.scores.run_id = partition.run_id;
    out.scores.genuine.reserve(flat.size());
    out.scores.impostor.reserve(flat.size() * (subjects - 1));
    out.true_ranks.reserve(flat.size());
    for (std::size_t p = 0; p < flat.size(); ++p) {
        const std::size_t own = flat[p].subject;
        const double* row = distances.data() + p * subjects;
        const double d_own = row[own];
        out.scores.genuine.push_back(d_own);
        int rank = 1;
        for (std::size_t s = 0; s < subjects; ++s) {
            if (s == own) continue;
            out.scores.impostor.push_back(row[s]);
            if (row[s] < d_own || (row[s] == d_own && gallery[s].subject_id < gallery[own].subject_id)) ++rank;
        }
        out.true_ranks.push_back(rank);
    }
    return out;
}

std::vector<RunScores> run_protocol_detailed(std::span<const Sample> samples, const ProtocolConfig& cfg) {
    const auto parts = make_partitions(samples, cfg);
    std::vector<RunScores> runs;
    runs.reserve(parts.size());
    for (const auto& part : parts) runs.push_back(score_partition(part, cfg.threads));
    return runs;
}

std::vector<ScoreSet> run_protocol(std::span<const Sample> samples, const ProtocolConfig& cfg) {
    std::vector<ScoreSet> out;
    for (auto& run : run_protocol_detailed(samples, cfg)) out.push_back(std::move(run.scores));
    return out;
}

std::vector<RocPoint> roc(const ScoreSet& scores) {
    if (scores.genuine.empty() || scores.impostor.empty())
        throw Error(ErrorCode::EmptyScores, "ROC needs genuine and impostor scores");
    std::vector<double> genuine = scores.genuine;
    std::vector<double> impostor = scores.impostor;
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());

    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + impostor.size() + 2);
    std::merge(genuine.begin(), genuine.end(), impostor.begin(), impostor.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const double lo = thresholds.front() - 1.0;
    const double hi = thresholds.back() + 1.0;
    thresholds.insert(thresholds.begin(), lo);
    thresholds.push_back(hi);

    const auto n_gen = static_cast<double>(genuine.size());
    const auto n_imp = static_cast<double>(impostor.size());
    std::vector<RocPoint> points;
    points.reserve(thresholds.size());
    auto gen_it = genuine.begin();
    auto imp_it = impostor.begin();
    for (double t : thresholds) {
        while (gen_it != genuine.end() && *gen_it <= t) ++gen_it;
        while (imp_it != impostor.end() && *imp_it <= t) ++imp_it;
        const auto accepted_gen = static_cast<double>(gen_it - genuine.begin());
        const auto accepted_imp = static_cast<double>(imp_it - impostor.begin());
        points.push_back({t, accepted_imp / n_imp, (n_gen - accepted_gen) / n_gen});
    }
    return points;
}

namespace {

void require_usable(std::span<const RocPoint> points) {
    if (points.size() <= 3)
        throw Error(ErrorCode::DegenerateRoc, "all scores are identical; no operating point separates them");
}

}  // namespace

EerResult eer(std::span<const RocPoint> points) {
    require_usable(points);
    std::size_t k = 0;
    while (k < points.size() && points[k].far - points[k].frr < 0.0) ++k;
    if (k == points.size()) throw Error(ErrorCode::DegenerateRoc, "FAR never reaches FRR");
    const auto& hi = points[k];
    const double d_hi = hi.far - hi.frr;
    if (d_hi == 0.0 || k == 0) return {100.0 * hi.far, hi.threshold};
    const auto& lo = points[k - 1];
    const double d_lo = lo.far - lo.frr;
    const double t = -d_lo / (d_hi - d_lo);
    const double far = lo.far + t * (hi.far - lo.far);
    const double frr = lo.frr + t * (hi.frr - lo.frr);
    return {100.0 * 0.5 * (far + frr), lo.threshold + t * (hi.threshold - lo.threshold)};
}

double min_hter(std::span<const RocPoint> points) {
    require_usable(points);
    double best = 1.0;
    for (const auto& p : points) best = std::min(best, 0.5 * (p.far + p.frr));
    return 100.0 * best;
}

double rank1(const Partition& partition) {
    std::size_t total = 0, correct = 0;
    for (const auto& set : partition.probes) {
        for (const auto& v : set.vectors) {
            ++total;
            if (identify(v, partition.gallery, 1).front() == set.subject_id) ++correct;
        }
    }
    if (total == 0) throw Error(ErrorCode::InsufficientSamples, "partition has no probes");
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

double rank1(std::span<const int> true_ranks) {
    if (true_ranks.empty()) throw Error(ErrorCode::InsufficientSamples, "no probes were scored");
    const auto hits = std::count(true_ranks.begin(), true_ranks.end(), 1);
    return 100.0 * static_cast<double>(hits) / static_cast<double>(true_ranks.size());
}

std::vector<double> cmc(std::span<const int> true_ranks, int max_rank) {
    if (true_ranks.empty()) throw Error(ErrorCode::InsufficientSamples, "no probes were scored");
    std::vector<double> rates(static_cast<std::size_t>(std::max(max_rank, 0)), 0.0);
    for (int r : true_ranks) {
        for (int k = r; k <= max_rank; ++k) rates[static_cast<std::size_t>(k - 1)] += 1.0;
    }
    for (double& v : rates) v = 100.0 * v / static_cast<double>(true_ranks.size());
    return rates;
}

Interval confidence_interval(std::span<const double> values, double z) {
    Interval out;
    if (values.empty()) {
        out.degenerate = true;
        return out;
    }
    const auto n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) {
        out.degenerate = true;
        return out;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.half_width = z * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

RunIndicators indicators(const RunScores& run) {
    const auto points = roc(run.scores);
    const auto e = eer(points);
    RunIndicators out;
    out.run_id = run.scores.run_id;
    out.eer = e.eer;
    out.gar_at_eer = 100.0 - e.eer;
    out.min_hter = min_hter(points);
    out.rank1 = rank1(run.true_ranks);
    out.eer_threshold = e.threshold;
    out.genuine_count = run.scores.genuine.size();
    out.impostor_count = run.scores.impostor.size();
    return out;
}

IndicatorReport summarize(std::span<const RunScores> runs) {
    IndicatorReport report;
    std::vector<double> e, g, h, r;
    for (const auto& run : runs) {
        report.runs.push_back(indicators(run));
        const auto& ri = report.runs.back();
        e.push_back(ri.eer);
        g.push_back(ri.gar_at_eer);
        h.push_back(ri.min_hter);
        r.push_back(ri.rank1);
    }
    report.eer = confidence_interval(e);
    report.gar_at_eer = confidence_interval(g);
    report.min_hter = confidence_interval(h);
    report.rank1 = confidence_interval(r);
    return report;
}

}  // namespace palmtex
