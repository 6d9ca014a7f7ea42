#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "windcurve/error.hpp"

namespace windcurve {

using Point2 = std::array<double, 2>;

// Static 2-D k-d tree over a point set, answering k-nearest-neighbour queries.
class KdTree2 {
public:
    struct Neighbor {
        double dist;
        std::size_t index;
        bool operator<(const Neighbor& o) const {
            return dist < o.dist || (dist == o.dist && index < o.index);
        }
    };

    explicit KdTree2(std::vector<Point2> points) : pts_(std::move(points)) {
        order_.resize(pts_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        nodes_.reserve(pts_.size());
        if (!pts_.empty()) root_ = build(0, order_.size(), 0);
    }

    std::size_t size() const { return pts_.size(); }
    const Point2& point(std::size_t i) const { return pts_[i]; }

    // k nearest points to q in ascending distance; `skip` (if < size) is excluded.
    std::vector<Neighbor> knn(const Point2& q, std::size_t k,
                              std::size_t skip = std::numeric_limits<std::size_t>::max()) const {
        std::priority_queue<Neighbor> heap;
        if (root_ >= 0) search(root_, q, k, skip, heap);
        std::vector<Neighbor> out(heap.size());
        for (std::size_t i = out.size(); i-- > 0;) {
            out[i] = heap.top();
            heap.pop();
        }
        return out;
    }

private:
    struct Node {
        std::size_t point;
        int axis;
        int left = -1;
        int right = -1;
    };

    int build(std::size_t lo, std::size_t hi, int depth) {
        if (lo >= hi) return -1;
        const int axis = depth % 2;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(hi),
                         [&](std::size_t a, std::size_t b) {
                             return pts_[a][axis] < pts_[b][axis] ||
                                    (pts_[a][axis] == pts_[b][axis] && a < b);
                         });
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({order_[mid], axis});
        const int l = build(lo, mid, depth + 1);
        const int r = build(mid + 1, hi, depth + 1);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    void search(int node, const Point2& q, std::size_t k, std::size_t skip,
                std::priority_queue<Neighbor>& heap) const {
        const Node& n = nodes_[static_cast<std::size_t>(node)];
        const Point2& p = pts_[n.point];
        if (n.point != skip) {
            const Neighbor cand{std::hypot(p[0] - q[0], p[1] - q[1]), n.point};
            if (heap.size() < k) {
                heap.push(cand);
            } else if (cand < heap.top()) {
                heap.pop();
                heap.push(cand);
            }
        }
        const double diff = q[static_cast<std::size_t>(n.axis)] - p[static_cast<std::size_t>(n.axis)];
        const int near = diff <= 0 ? n.left : n.right;
        const int far = diff <= 0 ? n.right : n.left;
        if (near >= 0) search(near, q, k, skip, heap);
        if (far >= 0 && (heap.size() < k || std::abs(diff) <= heap.top().dist))
            search(far, q, k, skip, heap);
    }

    std::vector<Point2> pts_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

// Local outlier factor over z-scored 2-D features. The model keeps its
// reference set so that points seen later (e.g. a past-horizon window at
// operation time) can be scored against the training neighbourhoods.
class LofModel {
public:
    LofModel(std::span<const Point2> raw, std::size_t k) : k_(k), tree_({}) {
        const std::size_t n = raw.size();
        if (k < 1 || k >= n) throw ParameterError("LOF needs 1 <= k < number of points");
        for (std::size_t d = 0; d < 2; ++d) {
            double mean = 0;
            for (const auto& p : raw) mean += p[d];
            mean /= static_cast<double>(n);
            double var = 0;
            for (const auto& p : raw) var += (p[d] - mean) * (p[d] - mean);
            const double sd = std::sqrt(var / static_cast<double>(n));
            mean_[d] = mean;
            scale_[d] = sd > 0 ? sd : 1.0;
        }
        std::vector<Point2> z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = standardize(raw[i]);
        tree_ = KdTree2(std::move(z));

        neighbors_.resize(n);
        k_distance_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            neighbors_[i] = tree_.knn(tree_.point(i), k_, i);
            k_distance_[i] = neighbors_[i].back().dist;
        }
        lrd_.resize(n);
        for (std::size_t i = 0; i < n; ++i) lrd_[i] = local_reachability_density(neighbors_[i]);
    }

    std::size_t k() const { return k_; }
    std::size_t size() const { return lrd_.size(); }

    // Scores of the reference points themselves (each excluded from its own
    // neighbourhood).
    std::vector<double> training_scores() const {
        std::vector<double> out(lrd_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor(neighbors_[i], lrd_[i]);
        return out;
    }

    // Score of a new point against the reference set.
    double score(const Point2& raw) const {
        const auto nb = tree_.knn(standardize(raw), k_);
        return factor(nb, local_reachability_density(nb));
    }

    Point2 standardize(const Point2& p) const {
        return {(p[0] - mean_[0]) / scale_[0], (p[1] - mean_[1]) / scale_[1]};
    }

private:
    double local_reachability_density(const std::vector<KdTree2::Neighbor>& nb) const {
        double reach = 0;
        for (const auto& o : nb) reach += std::max(k_distance_[o.index], o.dist);
        // offset keeps densities finite among exact duplicates
        return 1.0 / (reach / static_cast<double>(nb.size()) + 1e-10);
    }

    double factor(const std::vector<KdTree2::Neighbor>& nb, double lrd_p) const {
        double acc = 0;
        for (const auto& o : nb) acc += lrd_[o.index];
        return acc / static_cast<double>(nb.size()) / lrd_p;
    }

    std::size_t k_;
    Point2 mean_{};
    Point2 scale_{};
    KdTree2 tree_;
    std::vector<std::vector<KdTree2::Neighbor>> neighbors_;
    std::vector<double> k_distance_;
    std::vector<double> lrd_;
};

inline std::vector<double> lof_scores(std::span<const Point2> points, std::size_t k) {
    return LofModel(points, k).training_scores();
}

}  // namespace windcurve
