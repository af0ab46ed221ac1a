#include "bwd/config.hpp"

#include "bwd/dgp.hpp"
#include "bwd/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>

namespace bwd {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view field) {
    text = trim(text);
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw InvalidParameter(std::string(field), "cannot parse '" + std::string(text) + "'");
    return value;
}

bool parse_bool(std::string_view text, std::string_view field) {
    text = trim(text);
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw InvalidParameter(std::string(field), "expected a boolean, got '" + std::string(text) + "'");
}

} // namespace

std::vector<double> parse_double_list(std::string_view text, std::string_view field) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_number<double>(text.substr(0, comma), field));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::vector<double> ExperimentConfig::probabilities() const {
    if (!p.empty()) return p;
    if (k == 2) return {1.0 - q, q};
    return std::vector<double>(k, 1.0 / static_cast<double>(k));
}

DesignSpec ExperimentConfig::design_spec() const {
    DesignSpec spec;
    spec.design = design;
    spec.probs = probabilities();
    spec.phi = phi;
    spec.delta = delta;
    spec.policy = policy;
    spec.baseline = baseline;
    spec.baseline.delta = delta;
    return spec;
}

std::size_t ExperimentConfig::dimension() const {
    return d != 0 ? d : default_dimension(parse_dgp(dgp));
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "dgp") c.dgp = std::string(value);
    else if (key == "n") c.n = parse_number<std::size_t>(value, key);
    else if (key == "d") c.d = parse_number<std::size_t>(value, key);
    else if (key == "k") c.k = parse_number<std::size_t>(value, key);
    else if (key == "design") c.design = std::string(value);
    else if (key == "q") c.q = parse_number<double>(value, key);
    else if (key == "p") c.p = parse_double_list(value, key);
    else if (key == "phi") c.phi = parse_number<double>(value, key);
    else if (key == "delta") c.delta = parse_number<double>(value, key);
    else if (key == "policy") c.policy = parse_policy(value);
    else if (key == "efron_bias") c.baseline.efron_bias = parse_number<double>(value, key);
    else if (key == "smith_rho") c.baseline.smith_rho = parse_number<double>(value, key);
    else if (key == "alweiss_constant") c.baseline.alweiss_constant = parse_number<double>(value, key);
    else if (key == "replications") c.replications = parse_number<std::size_t>(value, key);
    else if (key == "base_seed") c.base_seed = parse_number<std::uint64_t>(value, key);
    else if (key == "output") c.output = std::string(value);
    else if (key == "jobs") c.jobs = parse_number<std::size_t>(value, key);
    else if (key == "record_timing") c.record_timing = parse_bool(value, key);
    else if (key == "assignments_from") c.assignments_from = std::string(value);
    else throw InvalidParameter(std::string(key), "unknown configuration key");
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw InvalidParameter("line " + std::to_string(line_no), "expected key = value");
        apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("config", "cannot open '" + path + "'");
    ExperimentConfig config;
    apply_config_text(config, in);
    return config;
}

void validate(const ExperimentConfig& c) {
    const DgpKind kind = parse_dgp(c.dgp);
    if (c.n < 1) throw InvalidParameter("n", "must be at least 1");
    if (c.k < 2) throw InvalidParameter("k", "must be at least 2");
    if (c.replications < 1) throw InvalidParameter("replications", "must be at least 1");
    if (c.jobs < 1) throw InvalidParameter("jobs", "must be at least 1");
    if (c.d != 0 && c.d != default_dimension(kind) && default_dimension(kind) == 2)
        throw InvalidParameter("d", c.dgp + " has exactly 2 covariates");
    if (!c.p.empty() && c.p.size() != c.k) throw InvalidParameter("p", "length must equal k");
    const auto probs = c.probabilities();
    for (double v : probs)
        if (!(v > 0.0)) throw InvalidParameter("p", "probabilities must be positive");
    if (std::abs(std::accumulate(probs.begin(), probs.end(), 0.0) - 1.0) > 1e-9)
        throw InvalidParameter("p", "probabilities must sum to 1");

    // Building a design once checks every design-level invariant.
    if (c.assignments_from.empty()) make_design(c.design_spec(), c.n, c.dimension(), 0);
}

} // namespace bwd
