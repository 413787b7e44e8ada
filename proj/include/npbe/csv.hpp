#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "npbe/grid.hpp"

namespace npbe {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip free formatting: 17 significant digits.
std::string format_number(double value);

/// `# key: value` lines. The first line names the tool and version; a
/// `# timestamp:` line follows when requested (it is the only line that
/// differs between otherwise identical runs).
void write_metadata(std::ostream& os, const Metadata& metadata, bool with_timestamp = true);

/// Columns x[,y[,z]],value with one row per node.
void write_field_csv(std::ostream& os, const ScalarField& field);

}  // namespace npbe
