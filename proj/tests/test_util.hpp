// Helpers shared by the test suites.
#pragma once

#include "doctest.h"
#include "sill/diagnostics.hpp"

#include <optional>

namespace sill::test {

// Runs f and reports which error code it threw, if any.
template <class F>
std::optional<Errc> thrown_code(F&& f) {
  try {
    f();
  } catch (const SillError& e) {
    return e.code();
  }
  return std::nullopt;
}

} // namespace sill::test

#define CHECK_FAILS_WITH(code, ...)                                            \
  do {                                                                         \
    auto got_ = sill::test::thrown_code([&] { __VA_ARGS__; });                 \
    REQUIRE_MESSAGE(got_.has_value(), "expected failure " #code);              \
    CHECK_EQ(sill::errc_name(*got_), sill::errc_name(code));                   \
  } while (0)
