#pragma once

#include <ostream>
#include <string>

#include "opsk/simulation.hpp"

namespace opsk {

/// Shortest-safe round-trip text: 17 significant digits, "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_double(double v);

std::string format_cell(const Cell& cell);

/// RFC 4180 style: header row, then one line per row, '\n' line endings.
/// Fields holding commas, quotes or newlines are quoted.
void write_csv(std::ostream& out, const Table& table);
std::string to_csv(const Table& table);

}  // namespace opsk
