#pragma once

#include "palmtex/descriptors.hpp"
#include "palmtex/evaluation.hpp"
#include "palmtex/features.hpp"
#include "palmtex/manifest.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace palmtex {

enum class DescriptorKind { lbp, ltp, ldp, lpq, bsif };

std::string_view to_string(DescriptorKind kind);
std::optional<DescriptorKind> parse_descriptor(std::string_view name);

struct DescriptorConfig {
    DescriptorKind kind = DescriptorKind::bsif;
    LbpParams lbp;
    LtpParams ltp;
    LdpParams ldp;
    LpqParams lpq;
    std::shared_ptr<const FilterBank> bank;  // required for bsif
    bool zero_mean = false;
};

//! Identifies descriptor and parameters, e.g. `lbp:P=8:R=1:circle`.
std::string descriptor_tag(const DescriptorConfig& cfg);

//! Code raster(s) -> histogram; LTP in concat mode yields 512 bins.
FeatureVector extract_features(const GrayImage& img, const DescriptorConfig& cfg);

//! Loads and describes every manifest row. Failures name the offending row.
std::vector<Sample> extract_all(const std::vector<ManifestRow>& rows, const DescriptorConfig& cfg, unsigned threads);

//! `subject_id,session,sample_index,tag,bin_0,...` per sample.
std::string feature_file_line(const Sample& s);

struct ExperimentConfig {
    DescriptorConfig descriptor;
    std::optional<std::filesystem::path> filter_bank_path;
    ProtocolConfig protocol;
    std::filesystem::path manifest;
    std::filesystem::path output_dir;
};

struct ExperimentOutputs {
    IndicatorReport report;
    std::vector<RocPoint> roc;  // pooled over runs
    std::vector<double> cmc;    // mean over runs, ranks 1..#subjects
};

//! Precondition check; throws before any image is read.
void validate_experiment(const ExperimentConfig& cfg, std::span<const SampleKey> keys);

ExperimentOutputs run_experiment(std::span<const Sample> samples, const ProtocolConfig& cfg);

//! JSON report; `metadata` holds the timestamp and host and is the only
//! field that changes between identical runs.
std::string report_json(const ExperimentConfig& cfg, const ExperimentOutputs& out, bool with_metadata = true);

void write_roc_csv(const std::vector<RocPoint>& points, const std::filesystem::path& path);
void write_cmc_csv(const std::vector<double>& rates, const std::filesystem::path& path);

}  // namespace palmtex
