#pragma once

#include "bwd/balancing_walk.hpp"
#include "bwd/baselines.hpp"
#include "bwd/group_tree.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bwd {

/// What the harness needs to build a design: the kind plus all its knobs.
struct DesignSpec {
    std::string design = "bwd";    ///< bwd or a baseline name
    std::vector<double> probs;     ///< arm probabilities; arm 0 is control
    double phi = 0.0;
    double delta = 0.05;
    OverflowPolicy policy = OverflowPolicy::Restart;
    BaselineParams baseline;
};

/// Uniform interface over every online design: one group index per arrival.
class OnlineDesign {
public:
    virtual ~OnlineDesign() = default;
    virtual int assign(std::span<const double> x) = 0;
    virtual std::size_t overflows() const = 0;
};

/// Two-arm BWD maps z = +1 to group 1; k > 2 uses the tree.
std::unique_ptr<OnlineDesign> make_design(const DesignSpec& spec, std::size_t n, std::size_t d,
                                          std::uint64_t seed);

bool is_bwd(const DesignSpec& spec);

} // namespace bwd
