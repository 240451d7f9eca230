#pragma once

// Linearized belief propagation: diffuse sparse ±1 labels over the k-NN
// graph by solving [I + aD - c'A] b = phi, where D is the degree matrix, A
// the adjacency and phi the prior vector.

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "newsprop/corpus.hpp"
#include "newsprop/graph.hpp"

namespace newsprop {

struct FabpCoefficients {
    double a = 0.0;
    double c_prime = 0.0;
};

// a = 4h^2 / (1 - 4h^2), c' = 2h / (1 - 4h^2); requires 0 < h < 0.5.
FabpCoefficients compute_coefficients(double homophily);

// Largest h on the grid {0.001, 0.002, ..., 0.499} not exceeding
// 1 / (2 (d_max + 1)), which makes the system matrix strictly diagonally
// dominant. When d_max is so large that the grid has no point below the
// bound, the bound itself is returned (it also satisfies dominance).
double choose_homophily(const KnnGraph& graph);

struct FabpConfig {
    std::optional<double> homophily;  // empty = choose automatically
    double prior_magnitude = 0.5;
    double solver_tol = 1e-8;  // relative residual target
    int max_solver_iters = 1000;

    void validate() const;
};

// Per-article evidence: +1 real, -1 fake, 0 unknown.
struct LabelVector {
    std::vector<int> entries;

    std::size_t size() const { return entries.size(); }
    // Values must be in {-1, 0, +1} with at least one nonzero.
    void validate(std::size_t node_count) const;
};

struct SolveInfo {
    double relative_residual = 0.0;
    int iterations = 0;
    bool used_direct = false;
};

// Jacobi-preconditioned conjugate gradient on the (symmetric) belief system;
// x0 = 0, stops at ||r|| <= tol * ||phi||. Hand-rolled so results are
// bit-reproducible. Throws on non-convergence.
Eigen::VectorXd solve_belief_system(const KnnGraph& graph, const Eigen::VectorXd& phi,
                                    double homophily, double tol, int max_iters,
                                    SolveInfo* info = nullptr);

// Dense direct solve of the same system; the test oracle, and the fallback
// for small graphs when CG is stopped by an adversarial h.
Eigen::VectorXd solve_belief_system_dense(const KnnGraph& graph, const Eigen::VectorXd& phi,
                                          double homophily);

struct BeliefState {
    Eigen::VectorXd priors;
    Eigen::VectorXd beliefs;
    double homophily = 0.0;
    FabpCoefficients coefficients;
    double residual = 0.0;  // relative residual of the returned solution
    int solver_iterations = 0;
    bool used_direct_solve = false;
};

// priors = prior_magnitude * labels; beliefs solve the linear system to
// config.solver_tol.
BeliefState propagate(const KnnGraph& graph, const LabelVector& labels, const FabpConfig& config);

struct Classification {
    std::vector<Label> predictions;  // Real or Fake per node
    int tie_count = 0;               // nodes with belief exactly 0 (forced Real)
};

Classification classify(const BeliefState& state);

// Text export: one "node_id prior belief prediction" line per node.
void write_beliefs(const BeliefState& state, const Classification& classification,
                   const std::filesystem::path& path);

}  // namespace newsprop
