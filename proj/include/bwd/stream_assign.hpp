#pragma once

#include "bwd/state_file.hpp"

#include <iosfwd>

namespace bwd {

struct StreamOptions {
    bool normalize = false;  ///< scale rows with norm above 1 onto the unit sphere
};

/*
Reads comma-separated covariate rows from `in`, writes one assignment line per
accepted row to `out`.

A row with unparsable or non-finite entries, or with norm above 1 when not
normalising, is reported on `diag` and skipped without touching the state.
A row of the wrong width, or an arrival past the horizon, is fatal.

Returns 0 on success and 2 on a fatal error.
*/
int stream_assign(std::istream& in, std::ostream& out, std::ostream& diag, StreamSession& session,
                  const StreamOptions& options = {});

} // namespace bwd
