#pragma once

// Exact k-nearest-neighbor queries over a fixed point set. Median-split
// kd-tree with bounded candidate heaps; results are ranked by
// (squared distance, point index) so ties resolve to the smaller index and
// the tree agrees with brute-force scans exactly.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace newsprop {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Shared by the kd-tree and the brute-force scan so both backends accumulate
// distances in the identical order and agree bitwise.
double squared_row_distance(const RowMajorMatrix& points, Eigen::Index u, Eigen::Index v);

class KdTree {
  public:
    // The matrix must outlive the tree; rows are points.
    explicit KdTree(const RowMajorMatrix& points);

    // Indices of the k nearest points to points.row(target), excluding
    // target itself, sorted ascending by (squared distance, index).
    // k must be < number of points.
    std::vector<int> query(Eigen::Index target, int k) const;

  private:
    struct Node {
        int axis = -1;        // -1 marks a leaf
        double split = 0.0;   // coordinate of the median point on axis
        int left = -1;
        int right = -1;
        std::uint32_t begin = 0;  // leaf range into order_
        std::uint32_t end = 0;
    };

    int build(std::uint32_t begin, std::uint32_t end);

    const RowMajorMatrix& points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;

    static constexpr std::uint32_t kLeafSize = 16;
};

}  // namespace newsprop
