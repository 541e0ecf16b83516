#include "palmtex/bsif_learn.hpp"

#include "palmtex/error.hpp"
#include "palmtex/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace palmtex {

PatchMatrix sample_patches(std::span<const GrayImage> corpus, int side, int count, std::uint64_t seed) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no images to sample patches from");
    if (side < 1) throw Error(ErrorCode::InvalidArgument, "patch side must be >= 1");
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "patch count must be >= 1");
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].width() < side || corpus[i].height() < side)
            throw Error(ErrorCode::ImageTooSmall, "corpus image " + std::to_string(i) + " is smaller than " +
                                                      std::to_string(side) + "x" + std::to_string(side));
    }

    PatchMatrix out;
    out.side = side;
    out.columns.resize(side * side, count);
    Rng rng(seed);
    for (int c = 0; c < count; ++c) {
        const GrayImage& img = corpus[uniform_below(rng, corpus.size())];
        const int x0 = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(img.width() - side + 1)));
        const int y0 = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(img.height() - side + 1)));
        auto col = out.columns.col(c);
        for (int r = 0; r < side; ++r)
            for (int q = 0; q < side; ++q) col(r * side + q) = img.at(x0 + q, y0 + r);
        col.array() -= col.mean();
    }
    const Eigen::VectorXd mean_patch = out.columns.rowwise().mean();
    out.columns.colwise() -= mean_patch;
    return out;
}

WhitenResult whiten(const Eigen::MatrixXd& data, int k) {
    const Eigen::Index dim = data.rows();
    if (k < 1 || k > dim) throw Error(ErrorCode::DimensionMismatch, "whitening rank must be in 1..dim");
    if (data.cols() < 1) throw Error(ErrorCode::InvalidArgument, "no data to whiten");

    const Eigen::MatrixXd cov = (data * data.transpose()) / static_cast<double>(data.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::RankDeficient, "covariance eigendecomposition failed");

    WhitenResult out;
    out.whitener.projection.resize(k, dim);
    out.whitener.eigenvalues.resize(k);
    for (int i = 0; i < k; ++i) {
        const Eigen::Index src = dim - 1 - i;  // eigenvalues come ascending
        const double lambda = solver.eigenvalues()(src);
        if (!(lambda > 1e-10))
            throw Error(ErrorCode::RankDeficient, "only " + std::to_string(i) + " eigenvalues above 1e-10, need " +
                                                      std::to_string(k));
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        out.whitener.eigenvalues(i) = lambda;
        out.whitener.projection.row(i) = v.transpose() / std::sqrt(lambda);
    }
    out.data = out.whitener.projection * data;
    return out;
}

namespace {

// W <- (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelate(const Eigen::MatrixXd& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w * w.transpose());
    const Eigen::VectorXd inv_sqrt = solver.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose() * w;
}

}  // namespace

IcaResult fast_ica(const Eigen::MatrixXd& whitened, int k, std::uint64_t seed, int max_iter, double tol) {
    if (k < 1 || k != whitened.rows())
        throw Error(ErrorCode::DimensionMismatch, "unmixing size must equal the whitened dimension");
    if (whitened.cols() < 1) throw Error(ErrorCode::InvalidArgument, "no data for ICA");
    const double n = static_cast<double>(whitened.cols());

    Rng rng(seed);
    Eigen::MatrixXd w(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) w(r, c) = standard_normal(rng);
    w = symmetric_decorrelate(w);

    IcaResult out;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::MatrixXd g = (w * whitened).array().tanh().matrix();
        const Eigen::VectorXd g_prime_mean = (1.0 - g.array().square()).rowwise().mean();
        Eigen::MatrixXd next = (g * whitened.transpose()) / n - g_prime_mean.asDiagonal() * w;
        next = symmetric_decorrelate(next);

        const double change = (1.0 - (next * w.transpose()).diagonal().array().abs()).maxCoeff();
        w = std::move(next);
        out.iterations = it;
        if (change < tol) {
            out.converged = true;
            break;
        }
    }
    out.unmixing = std::move(w);
    return out;
}

FilterBank build_bank(const Whitener& whitener, const Eigen::MatrixXd& unmixing, int side) {
    const Eigen::Index k = whitener.projection.rows();
    if (unmixing.rows() != k || unmixing.cols() != k || whitener.projection.cols() != static_cast<Eigen::Index>(side) * side)
        throw Error(ErrorCode::DimensionMismatch, "unmixing, whitener and side are inconsistent");
    const Eigen::MatrixXd filters = unmixing * whitener.projection;
    std::vector<Kernel> kernels(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        auto& kern = kernels[static_cast<std::size_t>(i)];
        kern.side = side;
        kern.coeffs.resize(static_cast<std::size_t>(side) * side);
        for (int j = 0; j < side * side; ++j) kern.coeffs[static_cast<std::size_t>(j)] = filters(i, j);
    }
    return FilterBank(std::move(kernels));
}

LearnResult learn_filter_bank(std::span<const GrayImage> corpus, const LearnOptions& options) {
    if (options.filters < 1 || options.filters > 8)
        throw Error(ErrorCode::InvalidArgument, "filter count must be in 1..8");
    if (options.side < 1 || options.side % 2 == 0)
        throw Error(ErrorCode::InvalidArgument, "filter side must be odd");
    if (options.patches < 10 * options.filters)
        throw Error(ErrorCode::InvalidArgument, "need at least 10 patches per filter");
    const PatchMatrix patches = sample_patches(corpus, options.side, options.patches, options.seed);
    const WhitenResult white = whiten(patches, options.filters);
    IcaResult ica = fast_ica(white.data, options.filters, mix_seed(options.seed, 1), options.max_iter, options.tol);
    FilterBank bank = build_bank(white.whitener, ica.unmixing, options.side);
    return {std::move(bank), std::move(ica)};
}

}  // namespace palmtex
