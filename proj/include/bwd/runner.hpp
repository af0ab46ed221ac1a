#pragma once

#include "bwd/config.hpp"
#include "bwd/dgp.hpp"
#include "bwd/estimators.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bwd {

inline constexpr const char* kResultsHeader =
    "rep,design,dgp,n,d,k,q,phi,policy,tau_hat,tau_true,imbalance_l2,imbalance_linf,"
    "multi_disc,entropy,overflows,runtime_ns";

/// Seed of replication `rep`; depends only on the base seed and rep.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rep);
std::uint64_t replication_dgp_seed(std::uint64_t base_seed, std::size_t rep);
std::uint64_t replication_design_seed(std::uint64_t base_seed, std::size_t rep);

/// Externally produced assignments, keyed by replication.
using ExternalAssignments = std::map<std::size_t, std::vector<int>>;

/// Reads `rep,index,group` rows, index 1-based as in the DGP export (an optional
/// header line is skipped).
ExternalAssignments read_external_assignments(std::istream& in);

struct ReplicationDetail {
    DgpSample sample;
    std::vector<int> groups;
    ReplicationRecord record;
};

/// Generates the data, streams it through the design, scores the result.
ReplicationDetail simulate_replication(const ExperimentConfig& config, std::size_t rep,
                                       const ExternalAssignments* external = nullptr);

/// Scores a fixed group vector against a sample.
ReplicationRecord score_assignment(const DgpSample& sample, const std::vector<int>& groups,
                                   const std::vector<double>& probs);

/// All replications, spread over config.jobs workers, returned in rep order.
std::vector<ReplicationRecord> run_replications(const ExperimentConfig& config,
                                                const ExternalAssignments* external = nullptr);

void write_results_csv(const ExperimentConfig& config, const std::vector<ReplicationRecord>& records,
                       std::ostream& out);
void write_summary_csv(const Summary& summary, std::ostream& out);

/// Validates, runs, writes `config.output` and `<output>.summary.csv`.
Summary run_experiment(const ExperimentConfig& config);

} // namespace bwd
