// Exact rational arithmetic used for every potential, cost, and annotation.
// Floating point is never used anywhere in the analysis.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace sill {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Renders "n" for integers and "n/d" otherwise, e.g. "3", "-1/2".
std::string rat_to_string(const Rat& r);

// Accepts "n", "-n", "n/d" with optional sign on the numerator.
// Returns nullopt on malformed input or a zero denominator.
std::optional<Rat> rat_from_string(const std::string& s);

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

} // namespace sill
