#include "newsprop/cpd.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "newsprop/random.hpp"

namespace newsprop {
namespace {

// Solves factor * gram = rhs for factor (gram symmetric positive
// semi-definite R x R, rhs dim x R). Falls back to a ridge-regularized LDLT
// when the Cholesky factorization reports a non-positive-definite gram, which
// happens e.g. with duplicate articles or rank above the tensor dimensions.
Eigen::MatrixXd solve_normal_equations(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& rhs,
                                       bool& ridge_applied) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
        return llt.solve(rhs.transpose()).transpose();
    }
    ridge_applied = true;
    double ridge = 1e-12 * gram.trace();
    if (ridge <= 0.0) ridge = 1e-12;
    Eigen::MatrixXd regularized = gram;
    regularized.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(regularized);
    return ldlt.solve(rhs.transpose()).transpose();
}

// Normalizes columns in place, returning the norms. Exactly-zero columns
// (dead components) are reset to a unit basis vector so the unit-norm
// invariant holds; their weight stays zero.
Eigen::VectorXd normalize_columns(Eigen::MatrixXd& m) {
    Eigen::VectorXd norms(m.cols());
    for (int r = 0; r < m.cols(); ++r) {
        double n = m.col(r).norm();
        norms(r) = n;
        if (n > 0.0) {
            m.col(r) /= n;
        } else {
            m.col(r).setZero();
            m(0, r) = 1.0;
        }
    }
    return norms;
}

void fill_uniform(Eigen::MatrixXd& m, rng::Engine& eng) {
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) m(r, c) = rng::uniform_unit(eng);
    }
}

}  // namespace

void FactorMatrices::check_dims(const SparseTensor& tensor) const {
    const int r = rank();
    if (A.rows() != tensor.word_dim || B.rows() != tensor.word_dim ||
        C.rows() != tensor.article_dim || A.cols() != r || B.cols() != r || C.cols() != r) {
        throw std::invalid_argument("factor matrix dimensions do not match tensor dims");
    }
}

void CpConfig::validate() const {
    if (rank < 1 || rank > 50) {
        throw std::invalid_argument("decomposition rank must lie in [1, 50], got " +
                                    std::to_string(rank));
    }
    if (tol <= 0.0) throw std::invalid_argument("stopping tolerance must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

Eigen::MatrixXd mttkrp(const SparseTensor& tensor, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b, const Eigen::MatrixXd& c, int mode) {
    if (a.cols() != b.cols() || b.cols() != c.cols()) {
        throw std::invalid_argument("factor matrices must share a common rank");
    }
    if (a.rows() != tensor.word_dim || b.rows() != tensor.word_dim ||
        c.rows() != tensor.article_dim) {
        throw std::invalid_argument("factor matrix dimensions do not match tensor dims");
    }
    if (mode < 1 || mode > 3) throw std::invalid_argument("mttkrp mode must be 1, 2 or 3");

    const int rank = static_cast<int>(a.cols());
    const int out_rows = mode == 3 ? tensor.article_dim : tensor.word_dim;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(out_rows, rank);

    // Column-at-a-time keeps all accesses inside three dense columns, which
    // fit in cache for the dimensions this pipeline produces.
    for (int r = 0; r < rank; ++r) {
        const double* pa = a.col(r).data();
        const double* pb = b.col(r).data();
        const double* pc = c.col(r).data();
        double* po = out.col(r).data();
        switch (mode) {
            case 1:
                for (const TensorEntry& e : tensor.entries) po[e.i] += e.value * pb[e.j] * pc[e.k];
                break;
            case 2:
                for (const TensorEntry& e : tensor.entries) po[e.j] += e.value * pa[e.i] * pc[e.k];
                break;
            default:
                for (const TensorEntry& e : tensor.entries) po[e.k] += e.value * pa[e.i] * pb[e.j];
                break;
        }
    }
    return out;
}

CpResult cp_als(const SparseTensor& tensor, const CpConfig& config) {
    config.validate();
    if (tensor.nnz() == 0) throw std::runtime_error("cannot decompose an empty tensor");
    const double norm_x = tensor.frobenius_norm();
    if (norm_x == 0.0) throw std::runtime_error("cannot decompose an all-zero tensor");

    const int rank = config.rank;
    CpResult result;
    FactorMatrices& f = result.factors;
    f.A.resize(tensor.word_dim, rank);
    f.B.resize(tensor.word_dim, rank);
    f.C.resize(tensor.article_dim, rank);

    rng::Engine eng(config.seed);
    fill_uniform(f.A, eng);
    fill_uniform(f.B, eng);
    fill_uniform(f.C, eng);
    normalize_columns(f.A);
    normalize_columns(f.B);
    normalize_columns(f.C);
    f.weights = Eigen::VectorXd::Ones(rank);

    Eigen::MatrixXd gram_a = f.A.transpose() * f.A;
    Eigen::MatrixXd gram_b = f.B.transpose() * f.B;
    Eigen::MatrixXd gram_c = f.C.transpose() * f.C;

    Eigen::VectorXd lambda = f.weights;
    double previous_fit = 0.0;
    const double norm_x2 = norm_x * norm_x;

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        f.A = solve_normal_equations(gram_b.cwiseProduct(gram_c), mttkrp(tensor, f.A, f.B, f.C, 1),
                                     result.ridge_applied);
        normalize_columns(f.A);
        gram_a = f.A.transpose() * f.A;

        f.B = solve_normal_equations(gram_a.cwiseProduct(gram_c), mttkrp(tensor, f.A, f.B, f.C, 2),
                                     result.ridge_applied);
        normalize_columns(f.B);
        gram_b = f.B.transpose() * f.B;

        Eigen::MatrixXd m3 = mttkrp(tensor, f.A, f.B, f.C, 3);
        f.C = solve_normal_equations(gram_a.cwiseProduct(gram_b), m3, result.ridge_applied);
        lambda = normalize_columns(f.C);
        gram_c = f.C.transpose() * f.C;

        // Residual via the inner-product expansion:
        // ||X - X^||^2 = ||X||^2 - 2<X, X^> + ||X^||^2, with
        // <X, X^> = sum_r lambda_r <C_col_r, M3_col_r>.
        double inner = 0.0;
        for (int r = 0; r < rank; ++r) inner += lambda(r) * f.C.col(r).dot(m3.col(r));
        Eigen::MatrixXd gram_prod = gram_a.cwiseProduct(gram_b).cwiseProduct(gram_c);
        double model2 = lambda.dot(gram_prod * lambda);
        double residual2 = norm_x2 - 2.0 * inner + model2;
        double residual = std::sqrt(std::max(residual2, 0.0));
        double fit = 1.0 - residual / norm_x;

        result.residual_history.push_back(residual);
        result.iterations = iter;
        result.final_fit = fit;

        if (iter > 1 && std::abs(fit - previous_fit) < config.tol) {
            result.converged = true;
            break;
        }
        previous_fit = fit;
    }

    f.weights = lambda;
    return result;
}

double reconstruction_residual(const SparseTensor& tensor, const FactorMatrices& factors) {
    factors.check_dims(tensor);
    const int rank = factors.rank();

    double norm_x2 = 0.0;
    double inner = 0.0;
    for (const TensorEntry& e : tensor.entries) {
        norm_x2 += e.value * e.value;
        double model = 0.0;
        for (int r = 0; r < rank; ++r) {
            model += factors.weights(r) * factors.A(e.i, r) * factors.B(e.j, r) * factors.C(e.k, r);
        }
        inner += e.value * model;
    }
    Eigen::MatrixXd gram_prod = (factors.A.transpose() * factors.A)
                                    .cwiseProduct(factors.B.transpose() * factors.B)
                                    .cwiseProduct(factors.C.transpose() * factors.C);
    double model2 = factors.weights.dot(gram_prod * factors.weights);
    return std::sqrt(std::max(norm_x2 - 2.0 * inner + model2, 0.0));
}

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write matrix file: " + path.string());
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << " ";
            out << m(r, c);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_factors(const FactorMatrices& factors, const std::filesystem::path& a_path,
                   const std::filesystem::path& b_path, const std::filesystem::path& c_path,
                   const std::filesystem::path& weights_path) {
    write_matrix(factors.A, a_path);
    write_matrix(factors.B, b_path);
    write_matrix(factors.C, c_path);
    write_matrix(factors.weights, weights_path);
}

}  // namespace newsprop
