#include "bwd/online_design.hpp"

#include "bwd/errors.hpp"

namespace bwd {

namespace {

class WalkDesign final : public OnlineDesign {
public:
    WalkDesign(const DesignParams& params, std::uint64_t seed) : walk_(params, Rng(seed)) {}
    int assign(std::span<const double> x) override { return walk_.assign(x).z > 0 ? 1 : 0; }
    std::size_t overflows() const override { return walk_.overflows(); }

private:
    BalancingWalk walk_;
};

class TreeBackedDesign final : public OnlineDesign {
public:
    explicit TreeBackedDesign(TreeDesign tree) : tree_(std::move(tree)) {}
    int assign(std::span<const double> x) override { return tree_.assign(x).group; }
    std::size_t overflows() const override { return tree_.overflows(); }

private:
    TreeDesign tree_;
};

class BaselineDesign final : public OnlineDesign {
public:
    explicit BaselineDesign(Baseline baseline) : baseline_(std::move(baseline)) {}
    int assign(std::span<const double> x) override { return baseline_.assign(x); }
    std::size_t overflows() const override { return baseline_.overflows(); }

private:
    Baseline baseline_;
};

} // namespace

bool is_bwd(const DesignSpec& spec) { return spec.design == "bwd"; }

std::unique_ptr<OnlineDesign> make_design(const DesignSpec& spec, std::size_t n, std::size_t d,
                                          std::uint64_t seed) {
    if (spec.probs.size() < 2) throw InvalidParameter("p", "need at least two arms");
    if (is_bwd(spec)) {
        if (spec.probs.size() == 2) {
            const auto params = DesignParams::make(n, d, spec.probs[1], spec.phi, spec.delta, spec.policy);
            return std::make_unique<WalkDesign>(params, seed);
        }
        const auto params = DesignParams::make(n, d, 0.5, spec.phi, spec.delta, spec.policy);
        return std::make_unique<TreeBackedDesign>(build_tree(spec.probs, params, seed));
    }
    return std::make_unique<BaselineDesign>(
        Baseline(parse_baseline(spec.design), spec.probs, n, d, spec.baseline, Rng(seed)));
}

} // namespace bwd
