#include "nekh/csv.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace nekh {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
    const std::size_t n = record.samples.empty() ? 0 : record.samples.front().action.size();
    os << "t";
    for (std::size_t j = 0; j < n; ++j) os << ",I_" << (j + 1);
    os << ",H,drift\n";
    for (const auto& s : record.samples) {
        os << format_double(s.t);
        for (double v : s.action) os << ',' << format_double(v);
        os << ',' << format_double(s.energy) << ',' << format_double(s.max_drift) << '\n';
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace nekh
