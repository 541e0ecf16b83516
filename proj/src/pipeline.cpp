#include "palmtex/pipeline.hpp"

#include "palmtex/error.hpp"
#include "palmtex/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace palmtex {

std::string_view to_string(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::lbp: return "lbp";
        case DescriptorKind::ltp: return "ltp";
        case DescriptorKind::ldp: return "ldp";
        case DescriptorKind::lpq: return "lpq";
        case DescriptorKind::bsif: return "bsif";
    }
    return "?";
}

std::optional<DescriptorKind> parse_descriptor(std::string_view name) {
    for (auto k : {DescriptorKind::lbp, DescriptorKind::ltp, DescriptorKind::ldp, DescriptorKind::lpq, DescriptorKind::bsif}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

namespace {

std::string fmt_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string descriptor_tag(const DescriptorConfig& cfg) {
    std::string tag;
    switch (cfg.kind) {
        case DescriptorKind::lbp:
            tag = "lbp:P=" + std::to_string(cfg.lbp.neighbors) + ":R=" + fmt_real(cfg.lbp.radius) +
                  (cfg.lbp.topology == LbpTopology::circle ? ":circle" : ":square3x3");
            break;
        case DescriptorKind::ltp:
            tag = "ltp:t=" + fmt_real(cfg.ltp.threshold) +
                  (cfg.ltp.split == LtpSplit::upper_only ? ":upper_only" : ":concat");
            break;
        case DescriptorKind::ldp: tag = "ldp:k=" + std::to_string(cfg.ldp.active_bits); break;
        case DescriptorKind::lpq: tag = "lpq:M=" + std::to_string(cfg.lpq.window); break;
        case DescriptorKind::bsif:
            tag = "bsif:n=" + std::to_string(cfg.bank ? cfg.bank->count() : 0) + ":side=" +
                  std::to_string(cfg.bank ? cfg.bank->side() : 0);
            break;
    }
    if (cfg.zero_mean) tag += ":zero_mean";
    return tag;
}

FeatureVector extract_features(const GrayImage& img, const DescriptorConfig& cfg) {
    const std::string tag = descriptor_tag(cfg);
    FeatureVector v;
    switch (cfg.kind) {
        case DescriptorKind::lbp: v = histogram(lbp_encode(img, cfg.lbp), tag, 1 << cfg.lbp.neighbors); break;
        case DescriptorKind::ltp: {
            auto [upper, lower] = ltp_encode(img, cfg.ltp);
            if (cfg.ltp.split == LtpSplit::upper_only) {
                v = histogram(upper, tag);
            } else {
                // Halves are tagged without the zero-mean suffix; it is reapplied below.
                std::string base = tag;
                if (cfg.zero_mean) base.resize(base.size() - std::string_view(":zero_mean").size());
                v = concat_normalize(histogram(upper, base + "/upper"), histogram(lower, base + "/lower"));
                v.tag = tag;
            }
            break;
        }
        case DescriptorKind::ldp: v = histogram(ldp_encode(img, cfg.ldp), tag); break;
        case DescriptorKind::lpq: v = histogram(lpq_encode(img, cfg.lpq), tag); break;
        case DescriptorKind::bsif:
            if (!cfg.bank) throw Error(ErrorCode::InvalidArgument, "bsif needs a filter bank");
            v = histogram(bsif_encode(img, *cfg.bank), tag, 1 << cfg.bank->count());
            break;
    }
    return cfg.zero_mean ? center_zero_mean(std::move(v)) : v;
}

std::vector<Sample> extract_all(const std::vector<ManifestRow>& rows, const DescriptorConfig& cfg, unsigned threads) {
    std::vector<Sample> out(rows.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const auto& row = rows[i];
        try {
            out[i] = {row.key, extract_features(load_image(row.path), cfg)};
        } catch (const Error& e) {
            throw Error(e.code(), "manifest row " + std::to_string(i + 1) + " (" + row.key.subject_id + ", session " +
                                      std::to_string(row.key.session) + ", sample " +
                                      std::to_string(row.key.sample_index) + ", " + row.path.string() + "): " + e.what());
        }
    });
    return out;
}

std::string feature_file_line(const Sample& s) {
    return s.key.subject_id + "," + std::to_string(s.key.session) + "," + std::to_string(s.key.sample_index) + "," +
           to_csv(s.features);
}

void validate_experiment(const ExperimentConfig& cfg, std::span<const SampleKey> keys) {
    if (cfg.descriptor.kind == DescriptorKind::bsif && !cfg.descriptor.bank && !cfg.filter_bank_path)
        throw Error(ErrorCode::InvalidArgument, "bsif requires a filter bank path");
    if (cfg.protocol.fusion_enabled && cfg.protocol.protocol == Protocol::holdout && cfg.protocol.templates_per_subject < 2)
        throw Error(ErrorCode::InsufficientSamples, "fusion needs at least 2 templates per subject");
    validate_protocol(keys, cfg.protocol);
}

ExperimentOutputs run_experiment(std::span<const Sample> samples, const ProtocolConfig& cfg) {
    const auto runs = run_protocol_detailed(samples, cfg);
    ExperimentOutputs out;
    out.report = summarize(runs);

    ScoreSet pooled;
    std::size_t subjects = 0;
    for (const auto& r : runs) {
        pooled.genuine.insert(pooled.genuine.end(), r.scores.genuine.begin(), r.scores.genuine.end());
        pooled.impostor.insert(pooled.impostor.end(), r.scores.impostor.begin(), r.scores.impostor.end());
        if (!r.scores.genuine.empty()) subjects = r.scores.impostor.size() / r.scores.genuine.size() + 1;
    }
    out.roc = roc(pooled);

    out.cmc.assign(subjects, 0.0);
    for (const auto& r : runs) {
        const auto rates = cmc(r.true_ranks, static_cast<int>(subjects));
        for (std::size_t i = 0; i < subjects; ++i) out.cmc[i] += rates[i] / static_cast<double>(runs.size());
    }
    return out;
}

namespace {

nlohmann::ordered_json interval_json(const Interval& i) {
    nlohmann::ordered_json j;
    j["mean"] = i.mean;
    j["half_width"] = i.half_width;
    if (i.degenerate) j["degenerate"] = true;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string report_json(const ExperimentConfig& cfg, const ExperimentOutputs& out, bool with_metadata) {
    using nlohmann::ordered_json;
    const auto& d = cfg.descriptor;
    const auto& p = cfg.protocol;

    ordered_json config;
    config["descriptor"] = std::string(to_string(d.kind));
    config["descriptor_tag"] = descriptor_tag(d);
    ordered_json params;
    switch (d.kind) {
        case DescriptorKind::lbp:
            params["neighbors"] = d.lbp.neighbors;
            params["radius"] = d.lbp.radius;
            params["topology"] = d.lbp.topology == LbpTopology::circle ? "circle" : "square3x3";
            break;
        case DescriptorKind::ltp:
            params["threshold"] = d.ltp.threshold;
            params["split_mode"] = d.ltp.split == LtpSplit::upper_only ? "upper_only" : "concat_upper_lower";
            break;
        case DescriptorKind::ldp: params["active_bits"] = d.ldp.active_bits; break;
        case DescriptorKind::lpq: params["window"] = d.lpq.window; break;
        case DescriptorKind::bsif:
            params["filters"] = d.bank ? d.bank->count() : 0;
            params["side"] = d.bank ? d.bank->side() : 0;
            params["filter_bank"] = cfg.filter_bank_path ? cfg.filter_bank_path->generic_string() : "";
            break;
    }
    config["parameters"] = params;
    config["zero_mean"] = d.zero_mean;
    config["fusion"] = p.fusion_enabled ? std::string(to_string(p.fusion_rule)) : "none";
    config["protocol"] = std::string(to_string(p.protocol));
    config["templates_per_subject"] = p.templates_per_subject;
    config["repetitions"] = p.protocol == Protocol::holdout ? p.repetitions : 2;
    config["canonical"] = p.canonical();
    config["manifest"] = cfg.manifest.generic_string();

    ordered_json report;
    report["config"] = config;
    report["seed"] = p.rng_seed;

    ordered_json runs = ordered_json::array();
    for (const auto& r : out.report.runs) {
        ordered_json j;
        j["run_id"] = r.run_id;
        j["eer"] = r.eer;
        j["gar_at_eer"] = r.gar_at_eer;
        j["min_hter"] = r.min_hter;
        j["rank1"] = r.rank1;
        j["eer_threshold"] = r.eer_threshold;
        j["genuine_scores"] = r.genuine_count;
        j["impostor_scores"] = r.impostor_count;
        runs.push_back(j);
    }
    report["runs"] = runs;

    ordered_json ind;
    ind["confidence_level"] = 0.90;
    ind["eer"] = interval_json(out.report.eer);
    ind["gar_at_eer"] = interval_json(out.report.gar_at_eer);
    ind["min_hter"] = interval_json(out.report.min_hter);
    ind["rank1"] = interval_json(out.report.rank1);
    report["indicators"] = ind;

    if (with_metadata) {
        char host[256] = {};
        gethostname(host, sizeof host - 1);
        report["metadata"] = {{"timestamp", utc_timestamp()}, {"hostname", std::string(host)}};
    }
    return report.dump(2) + "\n";
}

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "threshold,far,frr\n";
    char buf[96];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", p.threshold, p.far, p.frr);
        out << buf;
    }
}

void write_cmc_csv(const std::vector<double>& rates, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << "rank,identification_rate\n";
    char buf[64];
    for (std::size_t i = 0; i < rates.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, rates[i]);
        out << buf;
    }
}

}  // namespace palmtex
