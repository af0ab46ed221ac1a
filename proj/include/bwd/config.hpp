#pragma once

#include "bwd/online_design.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bwd {

/*
Simulation configuration. On disk it is a flat text file of `key = value`
lines; `#` starts a comment. Recognised keys:

  dgp n d k design q p phi delta policy efron_bias smith_rho alweiss_constant
  replications base_seed output jobs record_timing assignments_from

`p` is a comma-separated probability vector and takes precedence over `q`.
*/
struct ExperimentConfig {
    std::string dgp = "LinearDGP";
    std::size_t n = 1000;
    std::size_t d = 0;  ///< 0: the DGP's own width
    std::size_t k = 2;
    std::string design = "bwd";
    double q = 0.5;
    std::vector<double> p;
    double phi = 0.0;
    double delta = 0.05;
    OverflowPolicy policy = OverflowPolicy::Restart;
    BaselineParams baseline;
    std::size_t replications = 100;
    std::uint64_t base_seed = 1;
    std::string output = "results.csv";
    std::size_t jobs = 1;
    bool record_timing = false;
    std::string assignments_from;

    /// Arm probabilities: p if given, else (1-q, q) for two arms, else uniform.
    std::vector<double> probabilities() const;
    DesignSpec design_spec() const;
    /// Width of the covariates fed to the design.
    std::size_t dimension() const;
};

/// Applies one setting; unknown keys and malformed values throw InvalidParameter.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` lines on top of `config`.
void apply_config_text(ExperimentConfig& config, std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

/// Checks every invariant, including the embedded design parameters.
void validate(const ExperimentConfig& config);

std::vector<double> parse_double_list(std::string_view text, std::string_view field);

} // namespace bwd
