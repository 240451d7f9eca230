#pragma once

// Rank-R CP factorization of the sparse co-occurrence tensor via alternating
// least squares. Rows of factor C are the article embeddings.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "newsprop/tensor.hpp"

namespace newsprop {

struct FactorMatrices {
    Eigen::MatrixXd A;        // I x R, first word mode
    Eigen::MatrixXd B;        // I x R, second word mode
    Eigen::MatrixXd C;        // M x R, article mode
    Eigen::VectorXd weights;  // R, non-negative component scales

    int rank() const { return static_cast<int>(weights.size()); }
    // Throws on shape disagreement with the tensor.
    void check_dims(const SparseTensor& tensor) const;
};

struct CpConfig {
    int rank = 10;
    int max_iters = 100;
    double tol = 1e-6;  // stop when the relative fit change drops below this
    std::uint64_t seed = 0;

    void validate() const;  // rank in [1, 50], tol > 0, max_iters >= 1
};

struct CpResult {
    FactorMatrices factors;
    std::vector<double> residual_history;  // Frobenius residual per iteration
    double final_fit = 0.0;                // 1 - residual / ||tensor||_F
    int iterations = 0;
    bool converged = false;
    bool ridge_applied = false;  // singular normal equations were regularized
};

// Matricized-tensor times Khatri-Rao product for the given mode (1, 2 or 3):
// mode 1 -> I x R, mode 2 -> I x R, mode 3 -> M x R. The workhorse kernel of
// ALS, computed directly on the coordinate entries.
Eigen::MatrixXd mttkrp(const SparseTensor& tensor, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b, const Eigen::MatrixXd& c, int mode);

// ALS with Gram-Hadamard normal equations, seeded uniform(0,1) init, column
// normalization with norms absorbed into weights, ridge fallback on singular
// normal equations. Deterministic given config.seed.
CpResult cp_als(const SparseTensor& tensor, const CpConfig& config);

// Frobenius norm of (tensor - reconstruction), computed via the inner-product
// expansion without densifying.
double reconstruction_residual(const SparseTensor& tensor, const FactorMatrices& factors);

// Dense text export: row-major, space-separated, one matrix row per line;
// weights one value per line.
void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path);
void write_factors(const FactorMatrices& factors, const std::filesystem::path& a_path,
                   const std::filesystem::path& b_path, const std::filesystem::path& c_path,
                   const std::filesystem::path& weights_path);

}  // namespace newsprop
