#include "newsprop/fabp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace newsprop {
namespace {

// y = [I + aD - c'A] x
Eigen::VectorXd system_matvec(const KnnGraph& graph, const FabpCoefficients& coef,
                              const Eigen::VectorXd& x) {
    Eigen::VectorXd y(x.size());
    for (std::size_t u = 0; u < graph.node_count; ++u) {
        double acc = (1.0 + coef.a * graph.degrees[u]) * x(static_cast<Eigen::Index>(u));
        double neighbor_sum = 0.0;
        for (const int* it = graph.row_begin(u); it != graph.row_end(u); ++it) {
            neighbor_sum += x(*it);
        }
        y(static_cast<Eigen::Index>(u)) = acc - coef.c_prime * neighbor_sum;
    }
    return y;
}

Eigen::MatrixXd dense_system(const KnnGraph& graph, const FabpCoefficients& coef) {
    const Eigen::Index n = static_cast<Eigen::Index>(graph.node_count);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t u = 0; u < graph.node_count; ++u) {
        s(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)) =
            1.0 + coef.a * graph.degrees[u];
        for (const int* it = graph.row_begin(u); it != graph.row_end(u); ++it) {
            s(static_cast<Eigen::Index>(u), *it) = -coef.c_prime;
        }
    }
    return s;
}

void check_homophily_domain(double h) {
    if (!(h > 0.0) || !(h < 0.5)) {
        std::ostringstream os;
        os << "homophily factor must lie strictly between 0 and 0.5, got " << h;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

FabpCoefficients compute_coefficients(double homophily) {
    check_homophily_domain(homophily);
    double denom = 1.0 - 4.0 * homophily * homophily;
    return {4.0 * homophily * homophily / denom, 2.0 * homophily / denom};
}

double choose_homophily(const KnnGraph& graph) {
    if (graph.node_count == 0) throw std::invalid_argument("cannot choose homophily: empty graph");
    double bound = 1.0 / (2.0 * (graph.max_degree() + 1.0));
    double capped = std::min(bound, 0.499);
    // Largest grid multiple of 1/1000 not exceeding the bound; the small
    // epsilon absorbs representation error so e.g. a bound of exactly 0.1
    // lands on 0.1 rather than 0.099.
    double grid = std::floor(capped * 1000.0 + 1e-9) / 1000.0;
    if (grid < 0.001) return capped;  // d_max >= 500: below the grid, use the bound itself
    return grid;
}

void FabpConfig::validate() const {
    if (homophily) check_homophily_domain(*homophily);
    if (!(prior_magnitude > 0.0)) throw std::invalid_argument("prior_magnitude must be positive");
    if (!(solver_tol > 0.0)) throw std::invalid_argument("solver_tol must be positive");
    if (max_solver_iters < 1) throw std::invalid_argument("max_solver_iters must be at least 1");
}

void LabelVector::validate(std::size_t node_count) const {
    if (entries.size() != node_count) {
        throw std::invalid_argument("label vector length " + std::to_string(entries.size()) +
                                    " does not match node count " + std::to_string(node_count));
    }
    bool any_nonzero = false;
    for (int v : entries) {
        if (v < -1 || v > 1) {
            throw std::invalid_argument("label vector entries must be -1, 0 or +1");
        }
        if (v != 0) any_nonzero = true;
    }
    if (!any_nonzero) {
        throw std::invalid_argument("label vector has no revealed labels; nothing to propagate");
    }
}

Eigen::VectorXd solve_belief_system(const KnnGraph& graph, const Eigen::VectorXd& phi,
                                    double homophily, double tol, int max_iters, SolveInfo* info) {
    FabpCoefficients coef = compute_coefficients(homophily);
    const double phi_norm = phi.norm();
    if (phi_norm == 0.0) throw std::invalid_argument("prior vector is all zero");

    // Jacobi preconditioner: the diagonal 1 + a * deg is always >= 1.
    Eigen::VectorXd inv_diag(phi.size());
    for (std::size_t u = 0; u < graph.node_count; ++u) {
        inv_diag(static_cast<Eigen::Index>(u)) = 1.0 / (1.0 + coef.a * graph.degrees[u]);
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(phi.size());
    Eigen::VectorXd r = phi;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);

    for (int iter = 1; iter <= max_iters; ++iter) {
        Eigen::VectorXd q = system_matvec(graph, coef, p);
        double pq = p.dot(q);
        if (pq == 0.0) break;  // stagnation; report via the residual check below
        double alpha = rz / pq;
        x += alpha * p;
        r -= alpha * q;
        if (r.norm() <= tol * phi_norm) {
            if (info) {
                info->relative_residual = r.norm() / phi_norm;
                info->iterations = iter;
                info->used_direct = false;
            }
            return x;
        }
        z = inv_diag.cwiseProduct(r);
        double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }

    std::ostringstream os;
    os << "belief solver did not converge within " << max_iters
       << " iterations (relative residual " << (r.norm() / phi_norm) << ")";
    throw std::runtime_error(os.str());
}

Eigen::VectorXd solve_belief_system_dense(const KnnGraph& graph, const Eigen::VectorXd& phi,
                                          double homophily) {
    FabpCoefficients coef = compute_coefficients(homophily);
    return dense_system(graph, coef).partialPivLu().solve(phi);
}

BeliefState propagate(const KnnGraph& graph, const LabelVector& labels, const FabpConfig& config) {
    config.validate();
    labels.validate(graph.node_count);

    BeliefState state;
    state.homophily = config.homophily ? *config.homophily : choose_homophily(graph);
    state.coefficients = compute_coefficients(state.homophily);

    state.priors.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t u = 0; u < labels.size(); ++u) {
        state.priors(static_cast<Eigen::Index>(u)) = config.prior_magnitude * labels.entries[u];
    }

    SolveInfo info;
    try {
        state.beliefs = solve_belief_system(graph, state.priors, state.homophily,
                                            config.solver_tol, config.max_solver_iters, &info);
    } catch (const std::runtime_error&) {
        // Iterative failure (possible only under a caller-forced h; the
        // automatic choice keeps the system dominant): fall back to a direct
        // solve while the dense matrix is affordable.
        if (graph.node_count > 500) throw;
        state.beliefs = solve_belief_system_dense(graph, state.priors, state.homophily);
        Eigen::VectorXd residual =
            system_matvec(graph, state.coefficients, state.beliefs) - state.priors;
        info.relative_residual = residual.norm() / state.priors.norm();
        info.iterations = 0;
        info.used_direct = true;
    }
    state.residual = info.relative_residual;
    state.solver_iterations = info.iterations;
    state.used_direct_solve = info.used_direct;
    return state;
}

Classification classify(const BeliefState& state) {
    Classification result;
    result.predictions.reserve(static_cast<std::size_t>(state.beliefs.size()));
    for (Eigen::Index u = 0; u < state.beliefs.size(); ++u) {
        double b = state.beliefs(u);
        if (b == 0.0) ++result.tie_count;
        result.predictions.push_back(b < 0.0 ? Label::Fake : Label::Real);
    }
    return result;
}

void write_beliefs(const BeliefState& state, const Classification& classification,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write beliefs file: " + path.string());
    out << std::setprecision(17);
    for (Eigen::Index u = 0; u < state.beliefs.size(); ++u) {
        out << u << " " << state.priors(u) << " " << state.beliefs(u) << " "
            << to_string(classification.predictions[static_cast<std::size_t>(u)]) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace newsprop
