#pragma once

#include <string>

#include "clo/algebra.hpp"

namespace clo {

/// Parses the JSON algebra schema: name, elements, unit, product rows,
/// omega/omegastar lists, shuffle entries with an optional default.
/// Validation runs unless disabled; an axiom violation raises Error with
/// the failing check and witness.
Algebra load_algebra_text(const std::string& text, bool validate = true);
Algebra load_algebra_file(const std::string& path, bool validate = true);

/// Canonical serialization; load followed by save is byte-stable.
/// Rule- or default-backed shuffles are written as-is when a default
/// exists, otherwise all entries are materialized (budget-guarded).
std::string save_algebra_text(const Algebra& a);
void save_algebra_file(const Algebra& a, const std::string& path);

}  // namespace clo
