#pragma once

#include "palmtex/descriptors.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace palmtex {

//! Patch vectors as columns (dim = side * side rows, one column per patch).
struct PatchMatrix {
    int side = 0;
    Eigen::MatrixXd columns;

    int dim() const noexcept { return side * side; }
    Eigen::Index count() const noexcept { return columns.cols(); }
};

//! Draws `count` fully interior patches (image and position uniform, seeded),
//! flattens them row-major, removes each patch's mean and then the mean
//! patch of the whole sample.
PatchMatrix sample_patches(std::span<const GrayImage> corpus, int side, int count, std::uint64_t seed);

struct Whitener {
    Eigen::MatrixXd projection;   // k x dim, rows = eigvec / sqrt(eigval)
    Eigen::VectorXd eigenvalues;  // k, descending
};

struct WhitenResult {
    Whitener whitener;
    Eigen::MatrixXd data;  // k x count
};

//! PCA whitening onto the top-k principal directions of the sample
//! covariance (1/count normalization). Eigenvector signs are fixed so the
//! largest-magnitude entry is positive. Throws RankDeficient when the k-th
//! eigenvalue is <= 1e-10.
WhitenResult whiten(const Eigen::MatrixXd& data, int k);
inline WhitenResult whiten(const PatchMatrix& patches, int k) { return whiten(patches.columns, k); }

struct IcaResult {
    Eigen::MatrixXd unmixing;  // k x k, orthonormal rows
    int iterations = 0;
    bool converged = false;
};

//! Symmetric FastICA with g(u) = tanh(u) on whitened data (k x count).
//! Starts from a seeded Gaussian matrix, symmetric-decorrelated; stops when
//! max_i (1 - |<w_i, w_i_prev>|) < tol. Non-convergence is reported through
//! `converged`, the last iterate is still returned.
IcaResult fast_ica(const Eigen::MatrixXd& whitened, int k, std::uint64_t seed, int max_iter = 200, double tol = 1e-6);

//! kernel_i = reshape(row_i(unmixing * projection), side, side).
FilterBank build_bank(const Whitener& whitener, const Eigen::MatrixXd& unmixing, int side);

struct LearnOptions {
    int filters = 8;
    int side = 17;
    int patches = 50000;
    std::uint64_t seed = 0;
    int max_iter = 200;
    double tol = 1e-6;
};

struct LearnResult {
    FilterBank bank;
    IcaResult ica;
};

//! sample_patches -> whiten -> fast_ica -> build_bank. Requires
//! patches >= 10 * filters.
LearnResult learn_filter_bank(std::span<const GrayImage> corpus, const LearnOptions& options);

}  // namespace palmtex
