#include "bwd/stream_assign.hpp"

#include "bwd/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace bwd {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

/// Splits on commas; returns false if any field fails to parse as a finite double.
bool parse_row(std::string_view line, std::vector<double>& values, std::size_t& fields) {
    values.clear();
    fields = 0;
    bool ok = true;
    for (;;) {
        const auto comma = line.find(',');
        const std::string_view token = trim(line.substr(0, comma));
        ++fields;
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size() ||
            !std::isfinite(v))
            ok = false;
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return ok;
}

} // namespace

int stream_assign(std::istream& in, std::ostream& out, std::ostream& diag, StreamSession& session,
                  const StreamOptions& options) {
    std::string line;
    std::vector<double> x;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::size_t fields = 0;
        const bool ok = parse_row(line, x, fields);
        if (fields != session.d()) {
            diag << "error: line " << line_no << ": expected " << session.d() << " columns, got "
                 << fields << '\n';
            return 2;
        }
        if (!ok) {
            diag << "error: line " << line_no << ": malformed row skipped\n";
            continue;
        }
        if (!within_unit_ball(x)) {
            if (!options.normalize) {
                diag << "error: line " << line_no << ": covariate norm above 1, row skipped\n";
                continue;
            }
            double norm = 0.0;
            for (double v : x) norm += v * v;
            norm = std::sqrt(norm);
            for (double& v : x) v /= norm;
        }
        try {
            out << session.assign_line(x) << '\n';
        } catch (const HorizonExceeded& e) {
            diag << "error: line " << line_no << ": " << e.what() << '\n';
            return 2;
        }
    }
    return 0;
}

} // namespace bwd
