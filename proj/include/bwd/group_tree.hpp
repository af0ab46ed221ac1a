#pragma once

#include "bwd/balancing_walk.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bwd {

struct TreeNode {
    int left = -1;     ///< child index, internal nodes only
    int right = -1;
    int group = -1;    ///< treatment label, leaves only
    int walk = -1;     ///< index into the tree's walks, internal nodes only
    int depth = 0;
    double alpha = 0.0;

    bool is_leaf() const noexcept { return group >= 0; }
};

struct GroupAssignment {
    int group = -1;
    std::vector<int> path_signs;  ///< +1 went left, -1 went right
    bool any_overflow = false;
};

/*
k-arm assignment through a binary tree of balancing walks.

The tree starts complete with height h (smallest with 2^h >= k). The 2^h - k
removed leaves are the right children of the rightmost sibling pairs, so no two
siblings are removed. Single-child internals are contracted away and the
surviving leaves get treatments 0..k-1 left to right.

Internal node v runs a walk with q_v = alpha(left)/alpha(v); a +1 sign sends
the unit left. Node walks use the full horizon n and failure budget delta/k.
*/
class TreeDesign {
public:
    /// `weights` are positive leaf weights in treatment order; only ratios matter.
    TreeDesign(std::span<const double> weights, std::size_t n, std::size_t d, double phi,
               double delta, OverflowPolicy policy, std::uint64_t seed);

    GroupAssignment assign(std::span<const double> x);

    std::size_t k() const noexcept { return probs_.size(); }
    std::span<const double> probs() const noexcept { return probs_; }
    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    int root() const noexcept { return root_; }
    std::size_t height() const noexcept;
    std::size_t step() const noexcept { return step_; }

    std::span<const BalancingWalk> walks() const noexcept { return walks_; }
    /// q_v of each internal node, in walk order.
    std::vector<double> node_q() const;
    /// Node index owning walk i.
    int walk_node(std::size_t i) const noexcept { return walk_nodes_[i]; }
    std::size_t overflows() const noexcept;

    std::vector<WalkSnapshot> snapshot() const;
    void restore(std::size_t step, std::span<const WalkSnapshot> walks);

private:
    int build(int level, std::size_t position, int height, std::size_t removed, int& next_group);

    std::vector<double> probs_;
    std::vector<TreeNode> nodes_;
    std::vector<BalancingWalk> walks_;
    std::vector<int> walk_nodes_;
    int root_ = -1;
    std::size_t step_ = 0;
};

/// Builds a tree from a probability vector (positive entries summing to 1).
TreeDesign build_tree(std::span<const double> probs, const DesignParams& params, std::uint64_t seed);

/// 2 log2(k) times the largest node max-norm balance bound (node budgets
/// already carry delta/k).
double discrepancy_bound(const TreeDesign& tree);

/// max over arm pairs of 2 * || (s_a/alpha_a - s_b/alpha_b) / (1/alpha_a + 1/alpha_b) ||_inf
double multi_discrepancy(std::span<const std::vector<double>> sums, std::span<const double> alpha);

} // namespace bwd
