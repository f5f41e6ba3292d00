#pragma once

#include "doctest.h"
#include "ransd/common/error.hpp"

/// Passes when `expr` throws ransd::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                           \
  do {                                                                                  \
    bool ransd_thrown_ = false;                                                         \
    try {                                                                               \
      (void)(expr);                                                                     \
    } catch (const ransd::Error& ransd_e_) {                                            \
      ransd_thrown_ = true;                                                             \
      CHECK_MESSAGE(ransd_e_.kind() == (expected_kind), ransd_e_.what());               \
    }                                                                                   \
    CHECK_MESSAGE(ransd_thrown_, "expected ransd::Error from " #expr);                  \
  } while (0)
