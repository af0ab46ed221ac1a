#include "bwd/group_tree.hpp"

#include "bwd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bwd {

namespace {

void check_weights(std::span<const double> weights) {
    if (weights.size() < 2) throw InvalidParameter("p", "need at least two treatments");
    for (double a : weights)
        if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("p", "weights must be positive");
}

} // namespace

TreeDesign::TreeDesign(std::span<const double> weights, std::size_t n, std::size_t d, double phi,
                       double delta, OverflowPolicy policy, std::uint64_t seed) {
    check_weights(weights);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double a : weights) probs_.push_back(a / total);

    const std::size_t k = probs_.size();
    int height = 0;
    while ((std::size_t{1} << height) < k) ++height;
    const std::size_t removed = (std::size_t{1} << height) - k;

    int next_group = 0;
    root_ = build(0, 0, height, removed, next_group);

    const double node_delta = delta / static_cast<double>(k);
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        TreeNode& node = nodes_[v];
        if (node.is_leaf()) continue;
        const double q = nodes_[node.left].alpha / node.alpha;
        const auto params = DesignParams::make(n, d, q, phi, node_delta, policy);
        node.walk = static_cast<int>(walks_.size());
        walks_.emplace_back(params, Rng(Rng::derive(seed, walks_.size())));
        walk_nodes_.push_back(static_cast<int>(v));
    }

    // depths from the root down
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (nodes_[v].is_leaf()) continue;
        nodes_[nodes_[v].left].depth = nodes_[v].depth + 1;
        nodes_[nodes_[v].right].depth = nodes_[v].depth + 1;
        stack.push_back(nodes_[v].left);
        stack.push_back(nodes_[v].right);
    }
}

int TreeDesign::build(int level, std::size_t position, int height, std::size_t removed,
                      int& next_group) {
    if (level == height) {
        // Leaves 2j+1 of the last `removed` sibling pairs are dropped.
        const std::size_t pairs = std::size_t{1} << (height - 1);
        const bool right_child = position % 2 == 1;
        if (right_child && position / 2 >= pairs - removed) return -1;
        TreeNode leaf;
        leaf.group = next_group++;
        leaf.alpha = probs_[leaf.group];
        nodes_.push_back(leaf);
        return static_cast<int>(nodes_.size() - 1);
    }
    const int l = build(level + 1, 2 * position, height, removed, next_group);
    const int r = build(level + 1, 2 * position + 1, height, removed, next_group);
    if (r < 0) return l;  // contract single-child node
    TreeNode node;
    node.left = l;
    node.right = r;
    node.alpha = nodes_[l].alpha + nodes_[r].alpha;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
}

std::size_t TreeDesign::height() const noexcept {
    int h = 0;
    for (const auto& node : nodes_) h = std::max(h, node.depth);
    return static_cast<std::size_t>(h);
}

std::vector<double> TreeDesign::node_q() const {
    std::vector<double> q;
    for (const auto& walk : walks_) q.push_back(walk.params().q);
    return q;
}

std::size_t TreeDesign::overflows() const noexcept {
    std::size_t total = 0;
    for (const auto& walk : walks_) total += walk.overflows();
    return total;
}

GroupAssignment TreeDesign::assign(std::span<const double> x) {
    if (!walks_.empty() && step_ >= walks_.front().params().n)
        throw HorizonExceeded("assignment exceeds tree horizon");
    GroupAssignment out;
    int v = root_;
    while (!nodes_[v].is_leaf()) {
        const Assignment a = walks_[nodes_[v].walk].assign(x);
        out.any_overflow = out.any_overflow || a.was_overflow;
        out.path_signs.push_back(a.z);
        v = a.z > 0 ? nodes_[v].left : nodes_[v].right;
    }
    out.group = nodes_[v].group;
    ++step_;
    return out;
}

std::vector<WalkSnapshot> TreeDesign::snapshot() const {
    std::vector<WalkSnapshot> out;
    for (const auto& walk : walks_) out.push_back(walk.snapshot());
    return out;
}

void TreeDesign::restore(std::size_t step, std::span<const WalkSnapshot> walks) {
    if (walks.size() != walks_.size())
        throw DimensionMismatch("tree has " + std::to_string(walks_.size()) + " internal nodes, got " +
                                std::to_string(walks.size()) + " walk records");
    for (std::size_t i = 0; i < walks.size(); ++i)
        walks_[i] = BalancingWalk::restore(walks_[i].params(), walks[i]);
    step_ = step;
}

TreeDesign build_tree(std::span<const double> probs, const DesignParams& params, std::uint64_t seed) {
    check_weights(probs);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw InvalidParameter("p", "probabilities must sum to 1");
    return TreeDesign(probs, params.n, params.d, params.phi, params.delta, params.policy, seed);
}

double discrepancy_bound(const TreeDesign& tree) {
    double worst = 0.0;
    for (const auto& walk : tree.walks()) worst = std::max(worst, balance_bound_linf(walk.params()));
    return 2.0 * std::log2(static_cast<double>(tree.k())) * worst;
}

double multi_discrepancy(std::span<const std::vector<double>> sums, std::span<const double> alpha) {
    if (sums.size() < 2) throw InvalidParameter("sums", "need at least two groups");
    if (alpha.size() != sums.size()) throw DimensionMismatch("one weight per group required");
    for (double a : alpha)
        if (!(a > 0.0)) throw InvalidParameter("alpha", "weights must be positive");
    const std::size_t d = sums.front().size();
    for (const auto& s : sums)
        if (s.size() != d) throw DimensionMismatch("group sums differ in dimension");

    double worst = 0.0;
    for (std::size_t a = 0; a < sums.size(); ++a) {
        for (std::size_t b = a + 1; b < sums.size(); ++b) {
            const double scale = 2.0 / (1.0 / alpha[a] + 1.0 / alpha[b]);
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = sums[a][j] / alpha[a] - sums[b][j] / alpha[b];
                worst = std::max(worst, std::abs(scale * diff));
            }
        }
    }
    return worst;
}

} // namespace bwd
