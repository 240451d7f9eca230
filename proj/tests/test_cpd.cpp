#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "newsprop/cpd.hpp"
#include "newsprop/graph.hpp"
#include "support.hpp"

using namespace newsprop;
using testsupport::densify;
using testsupport::mttkrp_dense;
using testsupport::residual_dense;

namespace {

SparseTensor random_sparse(int words, int articles, double density, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    SparseTensor t;
    t.word_dim = words;
    t.article_dim = articles;
    for (int k = 0; k < articles; ++k) {
        for (int i = 0; i < words; ++i) {
            for (int j = 0; j < words; ++j) {
                if ((eng() >> 11) * 0x1.0p-53 < density) {
                    t.entries.push_back({i, j, k, 1.0 + static_cast<double>(eng() % 9)});
                }
            }
        }
    }
    return t;
}

Eigen::MatrixXd random_factor(Eigen::Index rows, Eigen::Index rank, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    Eigen::MatrixXd m(rows, rank);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index r = 0; r < rank; ++r) m(i, r) = (eng() >> 11) * 0x1.0p-53 + 0.1;
    }
    return m;
}

// Symmetric rank-1 co-occurrence-shaped tensor: X(i,j,k) = u_i u_j v_k with
// the diagonal left in (the decomposition does not care, only the builder's
// invariants do).
SparseTensor planted_rank1(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    SparseTensor t;
    t.word_dim = static_cast<int>(u.size());
    t.article_dim = static_cast<int>(v.size());
    for (int k = 0; k < t.article_dim; ++k) {
        for (int i = 0; i < t.word_dim; ++i) {
            for (int j = 0; j < t.word_dim; ++j) {
                double value = u(i) * u(j) * v(k);
                if (value != 0.0) t.entries.push_back({i, j, k, value});
            }
        }
    }
    return t;
}

}  // namespace

// ---- MTTKRP against the dense oracle ------------------------------------

TEST_CASE("mttkrp hand example on a 2x2x2 tensor") {
    SparseTensor t;
    t.word_dim = 2;
    t.article_dim = 2;
    t.entries = {{0, 1, 0, 2.0}, {1, 0, 1, 3.0}};
    Eigen::MatrixXd a(2, 1), b(2, 1), c(2, 1);
    a << 1.0, 2.0;
    b << 3.0, 4.0;
    c << 5.0, 6.0;

    // mode 1: out(i) = sum_{j,k} X(i,j,k) b(j) c(k)
    Eigen::MatrixXd m1 = mttkrp(t, a, b, c, 1);
    CHECK(m1(0, 0) == doctest::Approx(2.0 * 4.0 * 5.0));  // entry (0,1,0)
    CHECK(m1(1, 0) == doctest::Approx(3.0 * 3.0 * 6.0));  // entry (1,0,1)

    Eigen::MatrixXd m2 = mttkrp(t, a, b, c, 2);
    CHECK(m2(0, 0) == doctest::Approx(3.0 * 2.0 * 6.0));
    CHECK(m2(1, 0) == doctest::Approx(2.0 * 1.0 * 5.0));

    Eigen::MatrixXd m3 = mttkrp(t, a, b, c, 3);
    CHECK(m3(0, 0) == doctest::Approx(2.0 * 1.0 * 4.0));
    CHECK(m3(1, 0) == doctest::Approx(3.0 * 2.0 * 3.0));
}

TEST_CASE("mttkrp matches the dense triple-loop oracle on random tensors") {
    for (std::uint64_t trial = 0; trial < 12; ++trial) {
        std::mt19937_64 dims(trial * 31 + 7);
        int words = 2 + static_cast<int>(dims() % 4);     // up to 5
        int articles = 1 + static_cast<int>(dims() % 5);  // up to 5
        int rank = 1 + static_cast<int>(dims() % 4);

        SparseTensor t = random_sparse(words, articles, 0.3, trial);
        auto dense = densify(t);
        Eigen::MatrixXd a = random_factor(words, rank, trial + 100);
        Eigen::MatrixXd b = random_factor(words, rank, trial + 200);
        Eigen::MatrixXd c = random_factor(articles, rank, trial + 300);

        for (int mode = 1; mode <= 3; ++mode) {
            CAPTURE(trial);
            CAPTURE(mode);
            Eigen::MatrixXd fast = mttkrp(t, a, b, c, mode);
            Eigen::MatrixXd slow = mttkrp_dense(dense, a, b, c, mode);
            REQUIRE(fast.rows() == slow.rows());
            CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("mttkrp of an empty tensor is the zero matrix") {
    SparseTensor t;
    t.word_dim = 3;
    t.article_dim = 2;
    Eigen::MatrixXd a = random_factor(3, 2, 1);
    Eigen::MatrixXd b = random_factor(3, 2, 2);
    Eigen::MatrixXd c = random_factor(2, 2, 3);
    CHECK(mttkrp(t, a, b, c, 1).norm() == 0.0);
    CHECK(mttkrp(t, a, b, c, 3).norm() == 0.0);
}

TEST_CASE("mttkrp rejects invalid modes and mismatched shapes") {
    SparseTensor t;
    t.word_dim = 2;
    t.article_dim = 2;
    t.entries = {{0, 1, 0, 1.0}};
    Eigen::MatrixXd a = random_factor(2, 2, 1);
    Eigen::MatrixXd c = random_factor(2, 2, 3);
    CHECK_THROWS(mttkrp(t, a, a, c, 0));
    CHECK_THROWS(mttkrp(t, a, a, c, 4));
    Eigen::MatrixXd wrong = random_factor(5, 2, 9);
    CHECK_THROWS(mttkrp(t, wrong, a, c, 1));
}

// ---- CP-ALS ------------------------------------------------------------

TEST_CASE("cp_als recovers a planted symmetric rank-1 tensor") {
    Eigen::VectorXd u(6), v(4);
    u << 0.9, 0.4, 1.3, 0.2, 0.7, 1.1;
    v << 1.0, 0.5, 2.0, 0.25;
    SparseTensor t = planted_rank1(u, v);

    CpConfig config;
    config.rank = 1;
    config.max_iters = 200;
    config.tol = 1e-12;
    config.seed = 5;
    CpResult result = cp_als(t, config);

    CHECK(result.converged);
    CHECK(result.final_fit > 1.0 - 1e-8);

    // Weight equals the product of the component norms...
    double expected_weight = u.norm() * u.norm() * v.norm();
    CHECK(result.factors.weights(0) == doctest::Approx(expected_weight).epsilon(1e-6));
    // ...and each factor column is the normalized component up to sign.
    auto cosine = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return std::abs(x.dot(y)) / (x.norm() * y.norm());
    };
    CHECK(cosine(result.factors.A.col(0), u) > 0.999);
    CHECK(cosine(result.factors.B.col(0), u) > 0.999);
    CHECK(cosine(result.factors.C.col(0), v) > 0.999);
}

TEST_CASE("cp_als residual history is monotone non-increasing") {
    SparseTensor t = random_sparse(8, 6, 0.2, 17);
    CpConfig config;
    config.rank = 3;
    config.max_iters = 60;
    config.tol = 1e-300;  // effectively never converges: run all iterations
    config.seed = 11;
    CpResult result = cp_als(t, config);
    REQUIRE(result.residual_history.size() >= 2);
    for (std::size_t n = 1; n < result.residual_history.size(); ++n) {
        CHECK(result.residual_history[n] <= result.residual_history[n - 1] + 1e-9);
    }
}

TEST_CASE("cp_als residuals match the dense reconstruction oracle") {
    SparseTensor t = random_sparse(6, 5, 0.25, 23);
    auto dense = densify(t);
    CpConfig config;
    config.rank = 2;
    config.max_iters = 25;
    config.seed = 3;
    CpResult result = cp_als(t, config);

    double oracle = residual_dense(dense, result.factors);
    CHECK(result.residual_history.back() == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(reconstruction_residual(t, result.factors) == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("cp_als fit matches its definition") {
    SparseTensor t = random_sparse(7, 4, 0.3, 31);
    CpConfig config;
    config.rank = 2;
    config.max_iters = 30;
    config.seed = 9;
    CpResult result = cp_als(t, config);
    double norm = t.frobenius_norm();
    CHECK(result.final_fit ==
          doctest::Approx(1.0 - result.residual_history.back() / norm).epsilon(1e-12));
}

TEST_CASE("cp_als is bitwise deterministic in the seed") {
    SparseTensor t = random_sparse(9, 7, 0.15, 41);
    CpConfig config;
    config.rank = 4;
    config.max_iters = 40;
    config.seed = 77;
    CpResult r1 = cp_als(t, config);
    CpResult r2 = cp_als(t, config);
    CHECK(r1.factors.C == r2.factors.C);
    CHECK(r1.factors.A == r2.factors.A);
    CHECK(r1.factors.weights == r2.factors.weights);
    REQUIRE(r1.residual_history.size() == r2.residual_history.size());

    config.seed = 78;
    CpResult r3 = cp_als(t, config);
    CHECK(r1.factors.C != r3.factors.C);  // different init, different trajectory
}

TEST_CASE("cp_als factor columns are unit norm with non-negative weights") {
    SparseTensor t = random_sparse(8, 5, 0.2, 53);
    CpConfig config;
    config.rank = 3;
    config.max_iters = 30;
    config.seed = 1;
    CpResult result = cp_als(t, config);
    for (int r = 0; r < config.rank; ++r) {
        CHECK(result.factors.A.col(r).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(result.factors.B.col(r).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(result.factors.C.col(r).norm() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(result.factors.weights(r) >= 0.0);
    }
}

TEST_CASE("cp_als rejects empty and degenerate inputs") {
    SparseTensor empty;
    empty.word_dim = 4;
    empty.article_dim = 3;
    CpConfig config;
    config.rank = 2;
    CHECK_THROWS(cp_als(empty, config));

    SparseTensor t = random_sparse(4, 3, 0.4, 2);
    config.rank = 0;
    CHECK_THROWS(cp_als(t, config));
    config.rank = 2;
    config.max_iters = 0;
    CHECK_THROWS(cp_als(t, config));
}

TEST_CASE("scaling the tensor scales weights but not the downstream graph") {
    SparseTensor t = random_sparse(10, 8, 0.2, 67);
    SparseTensor scaled = t;
    for (auto& e : scaled.entries) e.value *= 10.0;

    CpConfig config;
    config.rank = 3;
    config.max_iters = 50;
    config.tol = 1e-10;
    config.seed = 21;
    CpResult r1 = cp_als(t, config);
    CpResult r2 = cp_als(scaled, config);

    // Same normalized factors (the init and the update path are scale-free),
    // weights 10x.
    CHECK((r1.factors.C - r2.factors.C).cwiseAbs().maxCoeff() < 1e-8);
    for (int r = 0; r < config.rank; ++r) {
        CHECK(r2.factors.weights(r) == doctest::Approx(10.0 * r1.factors.weights(r)).epsilon(1e-6));
    }

    GraphConfig gc;
    gc.k = 3;
    KnnGraph g1 = knn_graph(r1.factors.C, gc);
    KnnGraph g2 = knn_graph(r2.factors.C, gc);
    CHECK(g1.neighbors == g2.neighbors);
}

TEST_CASE("factor export writes full-precision parseable text") {
    SparseTensor t = random_sparse(5, 4, 0.3, 71);
    CpConfig config;
    config.rank = 2;
    config.max_iters = 10;
    config.seed = 4;
    CpResult result = cp_als(t, config);

    testsupport::TempDir dir("factors");
    write_factors(result.factors, dir.file("A.txt"), dir.file("B.txt"), dir.file("C.txt"),
                  dir.file("w.txt"));

    std::ifstream in(dir.file("C.txt"));
    REQUIRE(in.good());
    std::vector<double> values;
    double x;
    while (in >> x) values.push_back(x);
    REQUIRE(values.size() == static_cast<std::size_t>(result.factors.C.size()));
    // Row-major order, read back exactly (17 significant digits round-trip).
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < result.factors.C.rows(); ++i) {
        for (Eigen::Index r = 0; r < result.factors.C.cols(); ++r) {
            CHECK(values[n++] == result.factors.C(i, r));
        }
    }
}
