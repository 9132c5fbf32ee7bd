#pragma once

#include "jumpsas/core.hpp"

#include <string>
#include <vector>

namespace jumpsas::io {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Read a dataset CSV with header `x1,...,xP,y`. Inputs are taken as-is
/// (expected in [0,1] unless a ranges file is applied by the caller).
Dataset read_csv(const std::string& path);

/// Write a dataset in the same format. `comments` become leading `# ` lines.
void write_csv(const std::string& path, const Dataset& data,
               const std::vector<std::string>& comments = {});

/// Ranges file: JSON array of {name, min, max}.
std::vector<ParameterRange> read_ranges(const std::string& path);

/// Fixed shortest-round-trip formatting so outputs are byte-stable.
std::string format_double(double value);

} // namespace jumpsas::io
