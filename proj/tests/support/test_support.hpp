#pragma once

#include "ergolab/error.hpp"
#include "ergolab/rational.hpp"

#include <doctest.h>

namespace ergolab::testing {

inline Rational q(const char* text) { return parse_rational(text); }

/// Code of the ergolab::Error thrown by `f`; fails the test if none is thrown.
template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ConfigError;
}

}  // namespace ergolab::testing
