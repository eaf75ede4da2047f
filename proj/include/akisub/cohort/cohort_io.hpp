#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"

namespace akisub::cohort {

/// JSON Lines cohort file. Line 1 is {"format":"akisub-cohort","version":1};
/// every further line is one stay. Offsets are hours since ICU admission and
/// urine values are mL/h.
void write_cohort(const std::vector<IcuStay>& stays, std::ostream& out);
void write_cohort(const std::vector<IcuStay>& stays, const std::filesystem::path& path);

/// Throws ParseError naming the 1-based line on malformed input.
std::vector<IcuStay> read_cohort(std::istream& in);
std::vector<IcuStay> read_cohort(const std::filesystem::path& path);

}  // namespace akisub::cohort
