#pragma once

#include <string>
#include <string_view>

#include "tsvfarm/stack_model.hpp"

namespace tsvfarm {

/// Length with a unit suffix (um, mm, m), attached or separated by spaces.
/// Throws DataError on a missing or unknown unit.
double parse_length(std::string_view text);

/// Temperature with a K or C suffix, returned in kelvin.
double parse_temperature(std::string_view text);

/// Reads a design file. Throws DataError carrying every syntax, unit,
/// reference and model-invariant problem found, each with its line.
Design parse_design(const std::string& path);
Design parse_design_text(std::string_view text);

/// Canonical text form. Identical models give identical text, and
/// parse_design_text(emit_design(d)) == d for every valid design.
std::string emit_design(const Design& design);

/// Shortest decimal that reads back to exactly `value`.
std::string format_exact(double value);

}  // namespace tsvfarm
