#pragma once

#include <filesystem>
#include <string>

#include "secd/milp_problem.hpp"

namespace secd {

/// Fixed-format MPS writer. Every column is written as C<7-digit index>
/// and every row as R<7-digit index>, so all names fit the 8-character
/// fields; `* NAMEMAP <short> <original>` comment lines after NAME record
/// the original names. The objective row is OBJ and its constant is
/// written as the negated RHS entry of OBJ. Binaries are declared with
/// BV bounds. Numbers use the shortest text that round-trips exactly and
/// may overflow the 12-character numeric fields; whitespace-separated
/// readers parse them unchanged.
std::string to_mps(const MilpProblem& problem, const std::string& name = "SECD");
void export_mps(const MilpProblem& problem, const std::filesystem::path& path, const std::string& name = "SECD");

/// Reads the MPS subset written by `to_mps` (free or fixed spacing,
/// sections NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA, plus INTORG
/// markers). Original names are restored from NAMEMAP comments when
/// present. Throws ParseError on anything else.
MilpProblem parse_mps(const std::string& text);
MilpProblem import_mps(const std::filesystem::path& path);

}  // namespace secd
