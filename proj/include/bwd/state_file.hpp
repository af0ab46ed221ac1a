#pragma once

#include "bwd/balancing_walk.hpp"
#include "bwd/group_tree.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwd {

inline constexpr int kStateFormatVersion = 1;

/*
A resumable streaming design: either a single two-arm walk or a k-arm tree.

State files are line-oriented `key=value` text:

  format=bwd-state
  version=1
  kind=walk|tree
  n= d= q= phi= delta= policy=      (q only for walk)
  probs=p0,p1,...                    (tree only)
  step=
  walks=<count>
  walk.<i>.step= .w=c1,c2,... .fallback= .restarts= .overflows= .rng=

Doubles use the shortest representation that round-trips, so a save/load
cycle continues the exact same assignment sequence.
*/
class StreamSession {
public:
    static StreamSession fresh_walk(const DesignParams& params, std::uint64_t seed);
    /// `params` supplies n, d, phi, delta and policy; q is ignored.
    static StreamSession fresh_tree(std::vector<double> probs, const DesignParams& params,
                                    std::uint64_t seed);
    static StreamSession load(std::istream& in);

    void save(std::ostream& out) const;

    /// Assigns one unit and returns `index,group,eta,was_overflow`. The group is
    /// z in {1,-1} for a walk and a treatment index for a tree (eta left empty).
    std::string assign_line(std::span<const double> x);

    bool is_tree() const noexcept { return tree_.has_value(); }
    std::size_t d() const noexcept { return params_.d; }
    std::size_t step() const noexcept;
    const DesignParams& params() const noexcept { return params_; }
    const BalancingWalk* walk() const noexcept { return walk_ ? &*walk_ : nullptr; }
    const TreeDesign* tree() const noexcept { return tree_ ? &*tree_ : nullptr; }

private:
    StreamSession() = default;

    DesignParams params_;
    std::vector<double> probs_;
    std::optional<BalancingWalk> walk_;
    std::optional<TreeDesign> tree_;
};

} // namespace bwd
