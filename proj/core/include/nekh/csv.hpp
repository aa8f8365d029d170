#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nekh/dynamics.hpp"

namespace nekh {

/// 17 significant digits, so every double round-trips.
std::string format_double(double x);

/// Columns t, I_1..I_n, H, drift.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

/// Splits one CSV line on commas (no quoting in our formats).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace nekh
