#include "bwd/runner.hpp"

#include "bwd/errors.hpp"
#include "bwd/rng.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bwd {

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rep) {
    return Rng::derive(base_seed, rep);
}

std::uint64_t replication_dgp_seed(std::uint64_t base_seed, std::size_t rep) {
    return Rng::derive(replication_seed(base_seed, rep), 1);
}

std::uint64_t replication_design_seed(std::uint64_t base_seed, std::size_t rep) {
    return Rng::derive(replication_seed(base_seed, rep), 2);
}

ExternalAssignments read_external_assignments(std::istream& in) {
    ExternalAssignments out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string rep_s, index_s, group_s;
        std::getline(row, rep_s, ',');
        std::getline(row, index_s, ',');
        std::getline(row, group_s, ',');
        if (line_no == 1 && rep_s == "rep") continue;
        try {
            const auto rep = static_cast<std::size_t>(std::stoull(rep_s));
            const auto index = static_cast<std::size_t>(std::stoull(index_s));
            const int group = std::stoi(group_s);
            if (index == 0) throw std::out_of_range("unit index starts at 1");
            auto& groups = out[rep];
            if (groups.size() < index) groups.resize(index, -1);
            groups[index - 1] = group;
        } catch (const std::exception&) {
            throw InvalidParameter("assignments_from", "malformed row " + std::to_string(line_no));
        }
    }
    return out;
}

ReplicationRecord score_assignment(const DgpSample& sample, const std::vector<int>& groups,
                                   const std::vector<double>& probs) {
    const std::size_t k = probs.size();
    ReplicationRecord r;
    std::vector<double> observed(groups.size());
    r.group_counts.assign(k, 0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        if (groups[i] < 0 || g >= k) throw InvalidParameter("groups", "group index out of range");
        observed[i] = sample.Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g));
        ++r.group_counts[g];
    }
    r.tau_hat = ht_contrasts(groups, observed, probs);
    r.tau_true = sample.tau_true;
    const Imbalance imb = control_imbalance(groups, sample.X, probs);
    r.imbalance_l2 = imb.l2;
    r.imbalance_linf = imb.linf;
    const auto sums = group_sums(groups, sample.X, k);
    r.multi_disc = multi_discrepancy(sums, probs);
    r.entropy = entropy_normalized(r.group_counts);
    return r;
}

ReplicationDetail simulate_replication(const ExperimentConfig& config, std::size_t rep,
                                       const ExternalAssignments* external) {
    ReplicationDetail out;
    const auto probs = config.probabilities();
    out.sample = generate(config.dgp, config.n, replication_dgp_seed(config.base_seed, rep), config.k,
                          config.d);
    const auto order = arrival_order(parse_dgp(config.dgp), config.n);
    std::size_t overflows = 0;
    std::int64_t runtime = 0;

    if (external) {
        const auto it = external->find(rep);
        if (it == external->end() || it->second.size() != config.n)
            throw InvalidParameter("assignments_from", "replication " + std::to_string(rep) +
                                                           " needs exactly " + std::to_string(config.n) +
                                                           " assignments");
        out.groups = it->second;
    } else {
        auto design = make_design(config.design_spec(), config.n, out.sample.d(),
                                  replication_design_seed(config.base_seed, rep));
        out.groups.assign(config.n, -1);
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t i : order) out.groups[i] = design->assign(out.sample.row(i));
        const auto stop = std::chrono::steady_clock::now();
        overflows = design->overflows();
        if (config.record_timing)
            runtime = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    }

    out.record = score_assignment(out.sample, out.groups, probs);
    out.record.rep = rep;
    out.record.overflow_count = overflows;
    out.record.runtime_ns = runtime;
    return out;
}

std::vector<ReplicationRecord> run_replications(const ExperimentConfig& config,
                                                const ExternalAssignments* external) {
    std::vector<ReplicationRecord> records(config.replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= records.size()) return;
            try {
                records[rep] = simulate_replication(config, rep, external).record;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = records.size();
                return;
            }
        }
    };

    const std::size_t jobs = std::min(config.jobs, config.replications);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

namespace {

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        out += format_double(values[i]);
    }
    return out;
}

} // namespace

void write_results_csv(const ExperimentConfig& config, const std::vector<ReplicationRecord>& records,
                       std::ostream& out) {
    const bool external = !config.assignments_from.empty();
    const std::string design = external ? "external" : config.design;
    const bool walk = !external && config.design == "bwd";
    const auto probs = config.probabilities();
    const std::string q = config.k == 2 ? format_double(probs[1]) : join(probs);
    const std::string phi = walk ? format_double(config.phi) : "";
    const std::string policy = walk ? std::string(to_string(config.policy)) : "";
    const std::string prefix = design + ',' + config.dgp + ',' + std::to_string(config.n) + ',' +
                               std::to_string(config.dimension()) + ',' + std::to_string(config.k) +
                               ',' + q + ',' + phi + ',' + policy + ',';

    out << kResultsHeader << '\n';
    std::size_t total_overflows = 0;
    for (const auto& r : records) {
        out << r.rep << ',' << prefix << join(r.tau_hat) << ',' << join(r.tau_true) << ','
            << format_double(r.imbalance_l2) << ',' << format_double(r.imbalance_linf) << ','
            << format_double(r.multi_disc) << ',' << format_double(r.entropy) << ','
            << r.overflow_count << ',' << r.runtime_ns << '\n';
        total_overflows += r.overflow_count;
    }

    const Summary s = aggregate(records);
    std::vector<double> mean_hat(s.bias.size(), 0.0), mean_true(s.bias.size(), 0.0);
    for (const auto& r : records)
        for (std::size_t a = 0; a < mean_hat.size(); ++a) {
            mean_hat[a] += r.tau_hat[a] / static_cast<double>(records.size());
            mean_true[a] += r.tau_true[a] / static_cast<double>(records.size());
        }
    out << "summary," << prefix << join(mean_hat) << ',' << join(mean_true) << ','
        << format_double(s.median_imbalance_l2) << ',' << format_double(s.median_imbalance_linf) << ','
        << format_double(s.median_multi_disc) << ',' << format_double(s.mean_entropy) << ','
        << total_overflows << ',' << s.runtime_p50 << '\n';
}

void write_summary_csv(const Summary& s, std::ostream& out) {
    out << "metric,value\n";
    out << "replications," << s.replications << '\n';
    out << "bias," << format_double(s.mean_bias) << '\n';
    out << "mise," << format_double(s.mise) << '\n';
    for (std::size_t a = 0; a < s.mse.size(); ++a) {
        out << "bias_arm" << a + 1 << ',' << format_double(s.bias[a]) << '\n';
        out << "mse_arm" << a + 1 << ',' << format_double(s.mse[a]) << '\n';
    }
    out << "median_imbalance_l2," << format_double(s.median_imbalance_l2) << '\n';
    out << "median_imbalance_linf," << format_double(s.median_imbalance_linf) << '\n';
    out << "median_multi_disc," << format_double(s.median_multi_disc) << '\n';
    out << "mean_entropy," << format_double(s.mean_entropy) << '\n';
    out << "violation_rate," << format_double(s.violation_rate) << '\n';
    out << "runtime_p50_ns," << s.runtime_p50 << '\n';
    out << "runtime_p90_ns," << s.runtime_p90 << '\n';
    out << "runtime_p99_ns," << s.runtime_p99 << '\n';
}

Summary run_experiment(const ExperimentConfig& config) {
    validate(config);
    ExternalAssignments external;
    if (!config.assignments_from.empty()) {
        std::ifstream in(config.assignments_from);
        if (!in) throw std::runtime_error("cannot open assignments file '" + config.assignments_from + "'");
        external = read_external_assignments(in);
    }
    const auto records = run_replications(config, config.assignments_from.empty() ? nullptr : &external);

    std::ofstream out(config.output);
    if (!out) throw std::runtime_error("cannot write results file '" + config.output + "'");
    write_results_csv(config, records, out);
    const Summary summary = aggregate(records);
    std::ofstream side(config.output + ".summary.csv");
    if (!side) throw std::runtime_error("cannot write summary file '" + config.output + ".summary.csv'");
    write_summary_csv(summary, side);
    if (!out || !side) throw std::runtime_error("write failed for '" + config.output + "'");
    return summary;
}

} // namespace bwd
