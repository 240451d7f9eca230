#include "newsprop/kdtree.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <utility>

namespace newsprop {

double squared_row_distance(const RowMajorMatrix& points, Eigen::Index u, Eigen::Index v) {
    const double* p = points.data() + u * points.cols();
    const double* q = points.data() + v * points.cols();
    double sum = 0.0;
    for (Eigen::Index d = 0; d < points.cols(); ++d) {
        double diff = q[d] - p[d];
        sum += diff * diff;
    }
    return sum;
}

KdTree::KdTree(const RowMajorMatrix& points) : points_(points) {
    order_.resize(static_cast<std::size_t>(points.rows()));
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    if (!order_.empty()) root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

int KdTree::build(std::uint32_t begin, std::uint32_t end) {
    Node node;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    // Split on the axis with the widest extent over this subset.
    int axis = 0;
    double best_extent = -1.0;
    for (Eigen::Index d = 0; d < points_.cols(); ++d) {
        double lo = points_(order_[begin], d);
        double hi = lo;
        for (std::uint32_t t = begin + 1; t < end; ++t) {
            double v = points_(order_[t], d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_extent) {
            best_extent = hi - lo;
            axis = static_cast<int>(d);
        }
    }

    // Median split; (coordinate, index) ordering keeps the partition total
    // even when all coordinates coincide, so recursion always terminates.
    std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         double ca = points_(a, axis);
                         double cb = points_(b, axis);
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });

    node.axis = axis;
    node.split = points_(order_[mid], axis);
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

std::vector<int> KdTree::query(Eigen::Index target, int k) const {
    // Max-heap of (squared distance, index); top is the current worst
    // candidate, compared lexicographically so index ties stay deterministic.
    using Candidate = std::pair<double, int>;
    std::priority_queue<Candidate> heap;

    auto visit = [&](auto&& self, int node_index) -> void {
        const Node& node = nodes_[node_index];
        if (node.axis < 0) {
            for (std::uint32_t t = node.begin; t < node.end; ++t) {
                int idx = order_[t];
                if (idx == target) continue;
                Candidate c{squared_row_distance(points_, target, idx), idx};
                if (static_cast<int>(heap.size()) < k) {
                    heap.push(c);
                } else if (c < heap.top()) {
                    heap.pop();
                    heap.push(c);
                }
            }
            return;
        }
        double diff = points_(target, node.axis) - node.split;
        int near = diff < 0.0 ? node.left : node.right;
        int far = diff < 0.0 ? node.right : node.left;
        self(self, near);
        // The far side can only hold a point at squared axis distance
        // >= diff^2; an equal distance could still win an index tie, so the
        // bound comparison is non-strict.
        if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().first) {
            self(self, far);
        }
    };
    if (root_ >= 0) visit(visit, root_);

    std::vector<int> result(heap.size());
    for (std::size_t t = result.size(); t-- > 0;) {
        result[t] = heap.top().second;
        heap.pop();
    }
    return result;
}

}  // namespace newsprop
