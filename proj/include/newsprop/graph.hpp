#pragma once

// Symmetric unweighted k-nearest-neighbor graph over article embeddings.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace newsprop {

enum class KnnBackend { BruteForce, KdTree };

KnnBackend parse_knn_backend(const std::string& text);
std::string to_string(KnnBackend backend);

struct GraphConfig {
    int k = 10;
    KnnBackend backend = KnnBackend::KdTree;
    // Scale rows to unit norm before measuring distances. Off by default:
    // distances are taken on the embedding rows as-is.
    bool normalize_rows = false;

    void validate(Eigen::Index point_count) const;  // requires 1 <= k < points
};

// Adjacency in compressed sparse rows; neighbor lists are sorted and the
// structure is symmetric with an empty diagonal.
struct KnnGraph {
    std::size_t node_count = 0;
    std::vector<std::size_t> offsets;  // node_count + 1
    std::vector<int> neighbors;
    std::vector<int> degrees;          // row sizes = adjacency row sums

    std::size_t edge_count() const { return neighbors.size() / 2; }
    int max_degree() const;
    bool has_edge(int u, int v) const;

    const int* row_begin(std::size_t u) const { return neighbors.data() + offsets[u]; }
    const int* row_end(std::size_t u) const { return neighbors.data() + offsets[u + 1]; }

    // Structural invariants: symmetry, no self-loops, sorted unique rows,
    // consistent degrees.
    void validate() const;
};

// Euclidean distance; lengths must agree.
double l2_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Edge (u,v) exists iff v is among u's k nearest neighbors or vice versa
// (symmetrized). Ties at the k-th distance resolve to the smaller index.
// Both backends produce identical graphs; rejects non-finite coordinates
// and k >= point count.
KnnGraph knn_graph(const Eigen::MatrixXd& points, const GraphConfig& config);

// Edge list export: header "M E", then one "u v" line per edge with u < v,
// sorted ascending.
void write_edge_list(const KnnGraph& graph, const std::filesystem::path& path);

}  // namespace newsprop
