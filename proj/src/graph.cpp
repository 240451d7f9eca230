#include "newsprop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "newsprop/kdtree.hpp"

namespace newsprop {
namespace {

std::vector<int> brute_force_knn(const RowMajorMatrix& points, Eigen::Index target, int k) {
    std::vector<std::pair<double, int>> candidates;
    candidates.reserve(static_cast<std::size_t>(points.rows()) - 1);
    for (Eigen::Index v = 0; v < points.rows(); ++v) {
        if (v == target) continue;
        candidates.push_back({squared_row_distance(points, target, v), static_cast<int>(v)});
    }
    std::nth_element(candidates.begin(), candidates.begin() + (k - 1), candidates.end());
    candidates.resize(static_cast<std::size_t>(k));
    std::sort(candidates.begin(), candidates.end());
    std::vector<int> result(candidates.size());
    for (std::size_t t = 0; t < candidates.size(); ++t) result[t] = candidates[t].second;
    return result;
}

}  // namespace

KnnBackend parse_knn_backend(const std::string& text) {
    if (text == "brute-force") return KnnBackend::BruteForce;
    if (text == "kd-tree") return KnnBackend::KdTree;
    throw std::runtime_error("unknown knn backend \"" + text + "\" (expected brute-force or kd-tree)");
}

std::string to_string(KnnBackend backend) {
    return backend == KnnBackend::BruteForce ? "brute-force" : "kd-tree";
}

void GraphConfig::validate(Eigen::Index point_count) const {
    if (k < 1) throw std::invalid_argument("neighbor count k must be at least 1");
    if (static_cast<Eigen::Index>(k) >= point_count) {
        throw std::invalid_argument("neighbor count k = " + std::to_string(k) +
                                    " must be smaller than the number of articles (" +
                                    std::to_string(point_count) + ")");
    }
}

int KnnGraph::max_degree() const {
    int best = 0;
    for (int d : degrees) best = std::max(best, d);
    return best;
}

bool KnnGraph::has_edge(int u, int v) const {
    const int* begin = row_begin(static_cast<std::size_t>(u));
    const int* end = row_end(static_cast<std::size_t>(u));
    return std::binary_search(begin, end, v);
}

void KnnGraph::validate() const {
    if (offsets.size() != node_count + 1 || degrees.size() != node_count) {
        throw std::runtime_error("knn graph: inconsistent structure sizes");
    }
    for (std::size_t u = 0; u < node_count; ++u) {
        if (offsets[u + 1] - offsets[u] != static_cast<std::size_t>(degrees[u])) {
            throw std::runtime_error("knn graph: degree does not match row size");
        }
        const int* begin = row_begin(u);
        const int* end = row_end(u);
        for (const int* it = begin; it != end; ++it) {
            if (*it < 0 || static_cast<std::size_t>(*it) >= node_count) {
                throw std::runtime_error("knn graph: neighbor index out of range");
            }
            if (static_cast<std::size_t>(*it) == u) {
                throw std::runtime_error("knn graph: self-loop at node " + std::to_string(u));
            }
            if (it != begin && *(it - 1) >= *it) {
                throw std::runtime_error("knn graph: neighbor row not sorted unique");
            }
            if (!has_edge(*it, static_cast<int>(u))) {
                throw std::runtime_error("knn graph: asymmetric edge " + std::to_string(u) + "-" +
                                         std::to_string(*it));
            }
        }
    }
}

double l2_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("l2_distance requires equal-length vectors");
    }
    double sum = 0.0;
    for (Eigen::Index d = 0; d < p.size(); ++d) {
        double diff = q(d) - p(d);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

KnnGraph knn_graph(const Eigen::MatrixXd& points, const GraphConfig& config) {
    config.validate(points.rows());
    if (!points.allFinite()) {
        throw std::invalid_argument("embedding rows contain non-finite coordinates");
    }

    // Row-major copy: contiguous rows for the distance scans shared by both
    // backends.
    RowMajorMatrix rows = points;
    if (config.normalize_rows) {
        for (Eigen::Index r = 0; r < rows.rows(); ++r) {
            double norm = rows.row(r).norm();
            if (norm > 0.0) rows.row(r) /= norm;
        }
    }

    const std::size_t n = static_cast<std::size_t>(rows.rows());
    std::vector<std::vector<int>> directed(n);
    if (config.backend == KnnBackend::KdTree) {
        KdTree tree(rows);
        for (std::size_t u = 0; u < n; ++u) {
            directed[u] = tree.query(static_cast<Eigen::Index>(u), config.k);
        }
    } else {
        for (std::size_t u = 0; u < n; ++u) {
            directed[u] = brute_force_knn(rows, static_cast<Eigen::Index>(u), config.k);
        }
    }

    // Symmetrize: u-v connected when either direction nominated the other.
    std::vector<std::vector<int>> adjacency(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (int v : directed[u]) {
            adjacency[u].push_back(v);
            adjacency[static_cast<std::size_t>(v)].push_back(static_cast<int>(u));
        }
    }

    KnnGraph graph;
    graph.node_count = n;
    graph.offsets.resize(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
        auto& row = adjacency[u];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        graph.offsets[u + 1] = graph.offsets[u] + row.size();
    }
    graph.neighbors.reserve(graph.offsets[n]);
    graph.degrees.resize(n);
    for (std::size_t u = 0; u < n; ++u) {
        graph.degrees[u] = static_cast<int>(adjacency[u].size());
        graph.neighbors.insert(graph.neighbors.end(), adjacency[u].begin(), adjacency[u].end());
    }
    return graph;
}

void write_edge_list(const KnnGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write edge list: " + path.string());
    out << graph.node_count << " " << graph.edge_count() << "\n";
    for (std::size_t u = 0; u < graph.node_count; ++u) {
        for (const int* it = graph.row_begin(u); it != graph.row_end(u); ++it) {
            if (static_cast<std::size_t>(*it) > u) {
                out << u << " " << *it << "\n";
            }
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace newsprop
