#pragma once

#include <filesystem>
#include <string>

#include "heave/var.hpp"

namespace heave::csv {

// Panel CSV: header row of node names, one row per time step, one column
// per series. A leading "timestamp" column (case-insensitive) is carried
// along for provenance but ignored for math. Parse errors report the
// 1-based line number.
//
// With as_log_returns set, columns are treated as prices p_t and
// transformed to y_t = log(p_t / p_{t-1}); the first row is dropped and
// non-positive prices are rejected.
var::TimeSeriesPanel read_panel(const std::filesystem::path& path, bool as_log_returns = false);

// Doubles are written in shortest round-trip form, so write -> read ->
// write is byte-identical.
void write_panel(const std::filesystem::path& path, const var::TimeSeriesPanel& panel);

std::string format_double(double value);

}  // namespace heave::csv
