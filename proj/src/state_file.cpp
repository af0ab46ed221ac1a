#include "bwd/state_file.hpp"

#include "bwd/config.hpp"
#include "bwd/dgp.hpp"
#include "bwd/errors.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace bwd {

namespace {

using Fields = std::map<std::string, std::string, std::less<>>;

const std::string& require(const Fields& f, const std::string& key) {
    const auto it = f.find(key);
    if (it == f.end()) throw InvalidParameter(key, "missing from state file");
    return it->second;
}

template <typename T>
T number(const Fields& f, const std::string& key) {
    const std::string& text = require(f, key);
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw InvalidParameter(key, "malformed value '" + text + "' in state file");
    return value;
}

std::string join(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

void write_walk(std::ostream& out, std::size_t i, const WalkSnapshot& s) {
    const std::string p = "walk." + std::to_string(i) + ".";
    out << p << "step=" << s.step << '\n';
    out << p << "w=" << join(s.w) << '\n';
    out << p << "fallback=" << (s.fallback_active ? 1 : 0) << '\n';
    out << p << "restarts=" << s.restarts << '\n';
    out << p << "overflows=" << s.overflows << '\n';
    out << p << "rng=" << s.rng_state << '\n';
}

WalkSnapshot read_walk(const Fields& f, std::size_t i) {
    const std::string p = "walk." + std::to_string(i) + ".";
    WalkSnapshot s;
    s.step = number<std::size_t>(f, p + "step");
    s.w = parse_double_list(require(f, p + "w"), p + "w");
    s.fallback_active = number<int>(f, p + "fallback") != 0;
    s.restarts = number<std::size_t>(f, p + "restarts");
    s.overflows = number<std::size_t>(f, p + "overflows");
    s.rng_state = number<std::uint64_t>(f, p + "rng");
    return s;
}

} // namespace

StreamSession StreamSession::fresh_walk(const DesignParams& params, std::uint64_t seed) {
    StreamSession s;
    s.params_ = params;
    s.walk_.emplace(params, Rng(seed));
    return s;
}

StreamSession StreamSession::fresh_tree(std::vector<double> probs, const DesignParams& params,
                                        std::uint64_t seed) {
    StreamSession s;
    s.params_ = params;
    s.probs_ = std::move(probs);
    s.tree_.emplace(build_tree(s.probs_, params, seed));
    return s;
}

std::size_t StreamSession::step() const noexcept { return walk_ ? walk_->step() : tree_->step(); }

void StreamSession::save(std::ostream& out) const {
    out << "format=bwd-state\n";
    out << "version=" << kStateFormatVersion << '\n';
    out << "kind=" << (tree_ ? "tree" : "walk") << '\n';
    out << "n=" << params_.n << '\n';
    out << "d=" << params_.d << '\n';
    if (walk_) out << "q=" << format_double(params_.q) << '\n';
    out << "phi=" << format_double(params_.phi) << '\n';
    out << "delta=" << format_double(params_.delta) << '\n';
    out << "policy=" << to_string(params_.policy) << '\n';
    if (tree_) out << "probs=" << join(probs_) << '\n';
    out << "step=" << step() << '\n';
    if (walk_) {
        out << "walks=1\n";
        write_walk(out, 0, walk_->snapshot());
    } else {
        const auto snaps = tree_->snapshot();
        out << "walks=" << snaps.size() << '\n';
        for (std::size_t i = 0; i < snaps.size(); ++i) write_walk(out, i, snaps[i]);
    }
}

StreamSession StreamSession::load(std::istream& in) {
    Fields f;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidParameter("state", "malformed line '" + line + "'");
        f[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (require(f, "format") != "bwd-state") throw InvalidParameter("format", "not a bwd state file");
    if (number<int>(f, "version") != kStateFormatVersion)
        throw InvalidParameter("version", "unsupported state file version");

    const std::string& kind = require(f, "kind");
    const auto n = number<std::size_t>(f, "n");
    const auto d = number<std::size_t>(f, "d");
    const auto phi = number<double>(f, "phi");
    const auto delta = number<double>(f, "delta");
    const auto policy = parse_policy(require(f, "policy"));
    const auto step = number<std::size_t>(f, "step");
    const auto walks = number<std::size_t>(f, "walks");

    if (kind == "walk") {
        if (walks != 1) throw InvalidParameter("walks", "walk state must hold exactly one walk");
        const auto params = DesignParams::make(n, d, number<double>(f, "q"), phi, delta, policy);
        StreamSession s;
        s.params_ = params;
        s.walk_.emplace(BalancingWalk::restore(params, read_walk(f, 0)));
        if (s.walk_->step() != step) throw InvalidParameter("step", "inconsistent with walk record");
        return s;
    }
    if (kind == "tree") {
        const auto params = DesignParams::make(n, d, 0.5, phi, delta, policy);
        StreamSession s = fresh_tree(parse_double_list(require(f, "probs"), "probs"), params, 0);
        std::vector<WalkSnapshot> snaps;
        for (std::size_t i = 0; i < walks; ++i) snaps.push_back(read_walk(f, i));
        s.tree_->restore(step, snaps);
        return s;
    }
    throw InvalidParameter("kind", "unknown design kind '" + kind + "'");
}

std::string StreamSession::assign_line(std::span<const double> x) {
    const std::size_t index = step() + 1;
    std::string line = std::to_string(index) + ',';
    if (walk_) {
        const Assignment a = walk_->assign(x);
        line += std::to_string(a.z) + ',';
        if (a.eta) line += format_double(*a.eta);
        line += a.was_overflow ? ",1" : ",0";
    } else {
        const GroupAssignment a = tree_->assign(x);
        line += std::to_string(a.group) + ",";
        line += a.any_overflow ? ",1" : ",0";
    }
    return line;
}

} // namespace bwd
