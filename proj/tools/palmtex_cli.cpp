// palmtex: batch front-end for descriptor extraction, filter learning,
// synthetic data generation and protocol evaluation.
//
// Exit codes: 0 success, 1 invalid configuration or dataset, 2 runtime failure.

#include "palmtex/bsif_learn.hpp"
#include "palmtex/error.hpp"
#include "palmtex/manifest.hpp"
#include "palmtex/parallel.hpp"
#include "palmtex/pipeline.hpp"
#include "palmtex/synthgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace palmtex;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// Raised for problems detected before any work starts.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DescriptorFlags {
    std::string name = "bsif";
    int lbp_points = 8;
    double lbp_radius = 1.0;
    std::string lbp_topology = "circle";
    double ltp_threshold = 5.0;
    std::string ltp_split = "concat_upper_lower";
    int ldp_bits = 3;
    int lpq_window = 7;
    std::string filter_bank;
    bool zero_mean = false;

    void attach(CLI::App& app) {
        app.add_option("-d,--descriptor", name, "lbp | ltp | ldp | lpq | bsif")
            ->check(CLI::IsMember({"lbp", "ltp", "ldp", "lpq", "bsif"}))
            ->capture_default_str();
        app.add_option("--lbp-points", lbp_points, "LBP neighbor count (4..8)")->capture_default_str();
        app.add_option("--lbp-radius", lbp_radius, "LBP circle radius")->capture_default_str();
        app.add_option("--lbp-topology", lbp_topology, "circle | square3x3")
            ->check(CLI::IsMember({"circle", "square3x3"}))
            ->capture_default_str();
        app.add_option("--ltp-threshold", ltp_threshold, "LTP dead-zone half width")->capture_default_str();
        app.add_option("--ltp-split", ltp_split, "upper_only | concat_upper_lower")
            ->check(CLI::IsMember({"upper_only", "concat_upper_lower"}))
            ->capture_default_str();
        app.add_option("--ldp-bits", ldp_bits, "LDP active bits (1..8)")->capture_default_str();
        app.add_option("--lpq-window", lpq_window, "LPQ window side (odd, >= 3)")->capture_default_str();
        app.add_option("--filter-bank", filter_bank, "BSIF filter bank file");
        app.add_flag("--zero-mean", zero_mean, "center feature vectors after L1 normalization");
    }

    DescriptorConfig build() const {
        DescriptorConfig cfg;
        cfg.kind = *parse_descriptor(name);
        cfg.lbp = {lbp_points, lbp_radius, lbp_topology == "circle" ? LbpTopology::circle : LbpTopology::square3x3};
        cfg.ltp = {ltp_threshold, ltp_split == "upper_only" ? LtpSplit::upper_only : LtpSplit::concat_upper_lower};
        cfg.ldp = {ldp_bits};
        cfg.lpq = {lpq_window};
        cfg.zero_mean = zero_mean;
        if (lbp_points < 4 || lbp_points > 8) throw ValidationError("--lbp-points must be in 4..8");
        if (lbp_topology == "square3x3" && lbp_points != 8) throw ValidationError("square3x3 LBP needs --lbp-points 8");
        if (!(lbp_radius > 0)) throw ValidationError("--lbp-radius must be positive");
        if (!(ltp_threshold >= 0)) throw ValidationError("--ltp-threshold must be non-negative");
        if (ldp_bits < 1 || ldp_bits > 8) throw ValidationError("--ldp-bits must be in 1..8");
        if (lpq_window < 3 || lpq_window % 2 == 0) throw ValidationError("--lpq-window must be odd and >= 3");
        if (cfg.kind == DescriptorKind::bsif) {
            if (filter_bank.empty()) throw ValidationError("bsif requires --filter-bank");
            try {
                cfg.bank = std::make_shared<FilterBank>(FilterBank::load(filter_bank));
            } catch (const Error& e) {
                throw ValidationError(e.what());
            }
        }
        return cfg;
    }
};

std::vector<ManifestRow> load_manifest_or_invalid(const std::string& path) {
    try {
        return read_manifest(path);
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
}

int cmd_extract(const std::string& manifest, const DescriptorFlags& flags, const std::string& out_path, unsigned threads) {
    const auto cfg = flags.build();
    const auto rows = load_manifest_or_invalid(manifest);
    const auto samples = extract_all(rows, cfg, threads);
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + out_path);
    for (const auto& s : samples) out << feature_file_line(s) << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + out_path);
    std::cerr << "extracted " << samples.size() << " feature vectors (" << descriptor_tag(cfg) << ")\n";
    return 0;
}

struct EvaluateFlags {
    std::string manifest;
    std::string fusion = "none";
    std::string protocol = "holdout";
    int templates = 4;
    int repetitions = 10;
    std::uint64_t seed = 0;
    std::string out_dir = "palmtex_out";
};

int cmd_evaluate(const EvaluateFlags& ef, const DescriptorFlags& df, unsigned threads) {
    ExperimentConfig cfg;
    cfg.descriptor = df.build();
    if (!df.filter_bank.empty()) cfg.filter_bank_path = df.filter_bank;
    cfg.manifest = ef.manifest;
    cfg.output_dir = ef.out_dir;
    cfg.protocol.protocol = *parse_protocol(ef.protocol);
    cfg.protocol.templates_per_subject = ef.templates;
    cfg.protocol.repetitions = ef.repetitions;
    cfg.protocol.fusion_enabled = ef.fusion != "none";
    if (cfg.protocol.fusion_enabled) cfg.protocol.fusion_rule = *parse_combine_rule(ef.fusion);
    cfg.protocol.rng_seed = ef.seed;
    cfg.protocol.threads = threads;

    const auto rows = load_manifest_or_invalid(ef.manifest);
    try {
        validate_experiment(cfg, keys_of(rows));
    } catch (const Error& e) {
        throw ValidationError(e.what());
    }
    if (!cfg.protocol.canonical())
        std::cerr << "warning: " << ef.templates << " templates per subject is outside the canonical 2..4 scenarios\n";

    const auto samples = extract_all(rows, cfg.descriptor, threads);
    const auto outputs = run_experiment(samples, cfg.protocol);

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + cfg.output_dir.string());
    {
        std::ofstream out(cfg.output_dir / "report.json");
        out << report_json(cfg, outputs);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write report.json");
    }
    write_roc_csv(outputs.roc, cfg.output_dir / "roc.csv");
    write_cmc_csv(outputs.cmc, cfg.output_dir / "cmc.csv");

    const auto& r = outputs.report;
    std::cout << "EER      " << r.eer.mean << " +- " << r.eer.half_width << " %\n"
              << "GAR@EER  " << r.gar_at_eer.mean << " +- " << r.gar_at_eer.half_width << " %\n"
              << "minHTER  " << r.min_hter.mean << " +- " << r.min_hter.half_width << " %\n"
              << "Rank-1   " << r.rank1.mean << " +- " << r.rank1.half_width << " %\n";
    return 0;
}

struct LearnFlags {
    std::string corpus;
    int filters = 8;
    int side = 17;
    int patches = 50000;
    int max_iter = 200;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_learn_filters(const LearnFlags& lf) {
    if (lf.filters < 1 || lf.filters > 8) throw ValidationError("--filters must be in 1..8");
    if (lf.side < 1 || lf.side % 2 == 0) throw ValidationError("--side must be odd");
    if (lf.patches < 10 * lf.filters) throw ValidationError("--patches must be at least 10 x --filters");
    if (!fs::is_directory(lf.corpus)) throw ValidationError("corpus directory not found: " + lf.corpus);

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(lf.corpus)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".pgm" || ext == ".png" || ext == ".bmp") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<GrayImage> corpus;
    for (const auto& f : files) {
        try {
            GrayImage img = load_image(f);
            if (img.width() >= lf.side && img.height() >= lf.side) corpus.push_back(std::move(img));
        } catch (const Error& e) {
            std::cerr << "skipping " << f.string() << ": " << e.what() << '\n';
        }
    }
    if (corpus.empty()) {
        std::cerr << "error: " << to_string(ErrorCode::EmptyCorpus) << ": no loadable image of at least " << lf.side
                  << "x" << lf.side << " under " << lf.corpus << '\n';
        return kExitInvalid;
    }

    LearnOptions opt;
    opt.filters = lf.filters;
    opt.side = lf.side;
    opt.patches = lf.patches;
    opt.seed = lf.seed;
    opt.max_iter = lf.max_iter;
    opt.tol = lf.tol;
    const auto result = learn_filter_bank(corpus, opt);
    result.bank.save(lf.out_path);
    std::cout << "learned " << lf.filters << " filters of " << lf.side << "x" << lf.side << " from " << corpus.size()
              << " images, " << lf.patches << " patches; ICA " << (result.ica.converged ? "converged" : "did not converge")
              << " after " << result.ica.iterations << " iterations\n";
    if (!result.ica.converged) std::cerr << "warning: NoConvergence; filter bank written from the last iterate\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"palmtex: texture descriptors, multi-snapshot fusion and biometric evaluation"};
    app.require_subcommand(1);
    unsigned threads = default_thread_count();
    app.add_option("-j,--threads", threads, "worker threads (default: PALMTEX_THREADS or hardware)");

    DescriptorFlags extract_desc;
    std::string extract_manifest, extract_out;
    auto* extract = app.add_subcommand("extract", "describe every manifest sample as a feature vector");
    extract->add_option("-m,--manifest", extract_manifest, "manifest CSV")->required();
    extract->add_option("-o,--out", extract_out, "feature CSV to write")->required();
    extract_desc.attach(*extract);

    DescriptorFlags eval_desc;
    EvaluateFlags ef;
    auto* evaluate = app.add_subcommand("evaluate", "run a protocol and report EER, GAR@EER, minHTER, Rank-1");
    evaluate->add_option("-m,--manifest", ef.manifest, "manifest CSV")->required();
    evaluate->add_option("--fusion", ef.fusion, "none | mean | sqrt | product | absdiff")
        ->check(CLI::IsMember({"none", "mean", "sqrt", "product", "absdiff"}))
        ->capture_default_str();
    evaluate->add_option("--protocol", ef.protocol, "holdout | session_split")
        ->check(CLI::IsMember({"holdout", "session_split"}))
        ->capture_default_str();
    evaluate->add_option("--templates", ef.templates, "templates per subject (holdout)")->capture_default_str();
    evaluate->add_option("--repetitions", ef.repetitions, "holdout repartitions")->capture_default_str();
    evaluate->add_option("--seed", ef.seed, "partition seed")->required();
    evaluate->add_option("-o,--out-dir", ef.out_dir, "report directory")->capture_default_str();
    eval_desc.attach(*evaluate);

    LearnFlags lf;
    auto* learn = app.add_subcommand("learn-filters", "learn a BSIF filter bank by ICA on image patches");
    learn->add_option("-c,--corpus", lf.corpus, "directory of PGM/PNG/BMP images")->required();
    learn->add_option("-k,--filters", lf.filters, "number of filters (bits)")->capture_default_str();
    learn->add_option("-s,--side", lf.side, "filter side (odd)")->capture_default_str();
    learn->add_option("--patches", lf.patches, "patches sampled from the corpus")->capture_default_str();
    learn->add_option("--max-iter", lf.max_iter, "FastICA iteration cap")->capture_default_str();
    learn->add_option("--tol", lf.tol, "FastICA convergence tolerance")->capture_default_str();
    learn->add_option("--seed", lf.seed, "sampling and initialization seed")->required();
    learn->add_option("-o,--out", lf.out_path, "filter bank file to write")->required();

    SynthConfig sc;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate a synthetic vein-texture dataset");
    synth->add_option("-o,--out-dir", synth_out, "output directory")->required();
    synth->add_option("--subjects", sc.subjects)->capture_default_str();
    synth->add_option("--samples", sc.samples_per_subject, "samples per subject")->capture_default_str();
    synth->add_option("--sessions", sc.sessions, "1 or 2")->capture_default_str();
    synth->add_option("--side", sc.image_side, "image side in pixels")->capture_default_str();
    synth->add_option("--noise", sc.noise_sigma, "Gaussian noise sigma")->capture_default_str();
    synth->add_option("--jitter", sc.jitter, "per-sample geometric jitter (pixels)")->capture_default_str();
    synth->add_option("--seed", sc.seed, "generator seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }
    threads = std::max(1u, threads);

    try {
        if (*extract) return cmd_extract(extract_manifest, extract_desc, extract_out, threads);
        if (*evaluate) return cmd_evaluate(ef, eval_desc, threads);
        if (*learn) return cmd_learn_filters(lf);
        if (*synth) {
            try {
                sc.validate();
            } catch (const Error& e) {
                throw ValidationError(e.what());
            }
            const auto rows = generate(sc, synth_out, threads);
            std::cout << "wrote " << rows.size() << " images and " << (fs::path(synth_out) / "manifest.csv").string() << '\n';
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}
