// bwd: online covariate-balancing assignment, simulations and benchmarks.
//
//   bwd simulate --config exp.cfg [--key value ...]
//   bwd assign   --d 4 --state walk.state < rows.csv
//   bwd bench    --n-list 100000,1000000 --d 4 --design bwd
//   bwd dgp-dump --dgp LinearDGP --n 1000 --base-seed 7 --rep 0

#include "bwd/bench.hpp"
#include "bwd/config.hpp"
#include "bwd/dgp.hpp"
#include "bwd/errors.hpp"
#include "bwd/runner.hpp"
#include "bwd/state_file.hpp"
#include "bwd/stream_assign.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct SimulateArgs {
    std::string config_path;
    std::map<std::string, std::optional<std::string>> overrides;
    bool record_timing = false;
};

void add_simulate(CLI::App& app, SimulateArgs& args) {
    app.add_option("--config", args.config_path, "key = value configuration file");
    const std::pair<const char*, const char*> flags[] = {
        {"dgp", "data generating process (e.g. LinearDGP)"},
        {"n", "units per replication"},
        {"d", "covariate width override for the linear DGPs"},
        {"k", "number of arms"},
        {"design", "bwd, bernoulli, complete, efron, smith or alweiss"},
        {"q", "treatment probability (two arms)"},
        {"p", "comma-separated arm probabilities"},
        {"phi", "robustness in [0, 1)"},
        {"delta", "failure probability"},
        {"policy", "overflow policy: restart, random or strict"},
        {"efron_bias", "Efron biased-coin probability"},
        {"smith_rho", "Smith design exponent"},
        {"alweiss_constant", "Alweiss threshold constant"},
        {"replications", "number of replications"},
        {"base_seed", "base random seed"},
        {"output", "results CSV path"},
        {"jobs", "worker threads"},
        {"assignments_from", "score externally produced rep,index,group assignments"},
    };
    for (const auto& [key, help] : flags) {
        std::string flag = "--" + std::string(key);
        for (auto& ch : flag)
            if (ch == '_') ch = '-';
        app.add_option(flag, args.overrides[key], help);
    }
    app.add_flag("--record-timing", args.record_timing, "store wall-clock runtimes (breaks byte-identical output)");
}

int run_simulate(const SimulateArgs& args) {
    bwd::ExperimentConfig config;
    if (!args.config_path.empty()) config = bwd::load_config_file(args.config_path);
    for (const auto& [key, value] : args.overrides)
        if (value) bwd::apply_setting(config, key, *value);
    if (args.record_timing) config.record_timing = true;
    bwd::validate(config);

    const bwd::Summary s = bwd::run_experiment(config);
    std::cerr << "wrote " << config.output << " (" << s.replications << " replications, mise "
              << bwd::format_double(s.mise) << ", median imbalance "
              << bwd::format_double(s.median_imbalance_l2) << ")\n";
    return 0;
}

struct AssignArgs {
    std::size_t n = 1000000;
    std::size_t d = 0;
    std::size_t k = 2;
    double q = 0.5;
    std::string p;
    double phi = 0.0;
    double delta = 0.05;
    std::string policy = "restart";
    std::uint64_t seed = 1;
    std::string state;
    std::string input;
    bool normalize = false;
};

void add_assign(CLI::App& app, AssignArgs& a) {
    app.add_option("--n", a.n, "expected horizon");
    app.add_option("--d", a.d, "covariate width (required for a fresh session)");
    app.add_option("--k", a.k, "number of arms; k > 2 uses the tree design");
    app.add_option("--q", a.q, "treatment probability (two arms)");
    app.add_option("--p", a.p, "comma-separated arm probabilities (k > 2)");
    app.add_option("--phi", a.phi, "robustness in [0, 1)");
    app.add_option("--delta", a.delta, "failure probability");
    app.add_option("--policy", a.policy, "overflow policy: restart, random or strict");
    app.add_option("--seed", a.seed, "random seed for a fresh session");
    app.add_option("--state", a.state, "state file; resumed if present, written on exit");
    app.add_option("--input", a.input, "covariate CSV (default: stdin)");
    app.add_flag("--normalize", a.normalize, "scale rows with norm above 1 to unit norm");
}

int run_assign(const AssignArgs& a) {
    std::optional<bwd::StreamSession> session;
    if (!a.state.empty() && std::filesystem::exists(a.state)) {
        std::ifstream in(a.state);
        if (!in) throw std::runtime_error("cannot read state file '" + a.state + "'");
        session.emplace(bwd::StreamSession::load(in));
    } else {
        if (a.d == 0) throw bwd::InvalidParameter("d", "required for a fresh session");
        const auto policy = bwd::parse_policy(a.policy);
        if (a.k <= 2 && a.p.empty()) {
            session.emplace(bwd::StreamSession::fresh_walk(
                bwd::DesignParams::make(a.n, a.d, a.q, a.phi, a.delta, policy), a.seed));
        } else {
            auto probs = a.p.empty() ? std::vector<double>(a.k, 1.0 / static_cast<double>(a.k))
                                     : bwd::parse_double_list(a.p, "p");
            session.emplace(bwd::StreamSession::fresh_tree(
                std::move(probs), bwd::DesignParams::make(a.n, a.d, 0.5, a.phi, a.delta, policy), a.seed));
        }
    }

    int status = 0;
    if (a.input.empty()) {
        status = bwd::stream_assign(std::cin, std::cout, std::cerr, *session, {a.normalize});
    } else {
        std::ifstream in(a.input);
        if (!in) throw std::runtime_error("cannot read input '" + a.input + "'");
        status = bwd::stream_assign(in, std::cout, std::cerr, *session, {a.normalize});
    }
    std::cout.flush();

    if (!a.state.empty()) {
        const std::string tmp = a.state + ".tmp";
        {
            std::ofstream out(tmp);
            session->save(out);
            if (!out) throw std::runtime_error("cannot write state file '" + tmp + "'");
        }
        std::filesystem::rename(tmp, a.state);
    }
    return status;
}

struct BenchArgs {
    std::string n_list = "100000,1000000";
    std::size_t d = 4;
    std::string design = "bwd";
    std::uint64_t seed = 1;
    std::string output;
};

int run_bench(const BenchArgs& b) {
    std::vector<std::size_t> ns;
    for (double v : bwd::parse_double_list(b.n_list, "n-list")) ns.push_back(static_cast<std::size_t>(v));
    const auto rows = bwd::run_bench(ns, b.d, b.design, b.seed);
    if (b.output.empty()) {
        bwd::write_bench_csv(rows, std::cout);
    } else {
        std::ofstream out(b.output);
        if (!out) throw std::runtime_error("cannot write '" + b.output + "'");
        bwd::write_bench_csv(rows, out);
    }
    return 0;
}

struct DumpArgs {
    std::string dgp = "LinearDGP";
    std::size_t n = 1000;
    std::size_t k = 2;
    std::size_t d = 0;
    std::uint64_t base_seed = 1;
    std::size_t rep = 0;
    std::string output;
};

int run_dump(const DumpArgs& a) {
    const auto sample = bwd::generate(a.dgp, a.n, bwd::replication_dgp_seed(a.base_seed, a.rep), a.k, a.d);
    if (a.output.empty()) {
        bwd::write_csv(sample, std::cout);
    } else {
        std::ofstream out(a.output);
        if (!out) throw std::runtime_error("cannot write '" + a.output + "'");
        bwd::write_csv(sample, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online covariate-balancing treatment assignment"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run replicated simulations and write a results CSV");
    add_simulate(*sim, sim_args);

    AssignArgs assign_args;
    auto* assign = app.add_subcommand("assign", "assign streamed covariate rows online");
    add_assign(*assign, assign_args);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "time assignments across sample sizes");
    bench->add_option("--n-list", bench_args.n_list, "ascending comma-separated sizes");
    bench->add_option("--d", bench_args.d, "covariate width");
    bench->add_option("--design", bench_args.design, "design to time");
    bench->add_option("--seed", bench_args.seed, "random seed");
    bench->add_option("--output", bench_args.output, "CSV path (default: stdout)");

    DumpArgs dump_args;
    auto* dump = app.add_subcommand("dgp-dump", "write one replication's generated data as CSV");
    dump->add_option("--dgp", dump_args.dgp, "data generating process");
    dump->add_option("--n", dump_args.n, "units");
    dump->add_option("--k", dump_args.k, "arms");
    dump->add_option("--d", dump_args.d, "covariate width override");
    dump->add_option("--base-seed", dump_args.base_seed, "base seed, as in simulate");
    dump->add_option("--rep", dump_args.rep, "replication index");
    dump->add_option("--output", dump_args.output, "CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*sim) return run_simulate(sim_args);
        if (*assign) return run_assign(assign_args);
        if (*bench) return run_bench(bench_args);
        if (*dump) return run_dump(dump_args);
    } catch (const bwd::InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
