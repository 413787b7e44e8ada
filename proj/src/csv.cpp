#include "npbe/csv.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace npbe {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_metadata(std::ostream& os, const Metadata& metadata, bool with_timestamp) {
  os << "# npbe_lab " << NPBE_VERSION << '\n';
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    os << "# timestamp: " << buf << '\n';
  }
  for (const auto& [k, v] : metadata) os << "# " << k << ": " << v << '\n';
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  const Grid& g = field.grid();
  static const char* names[] = {"x", "y", "z"};
  for (int a = 0; a < g.dim(); ++a) os << names[a] << ',';
  os << "value\n";
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Point p = g.coords(i);
    for (int a = 0; a < g.dim(); ++a) os << format_number(p[a]) << ',';
    os << format_number(field[i]) << '\n';
  }
}

}  // namespace npbe
