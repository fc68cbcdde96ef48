#pragma once

#include "doctest.h"
#include "gazesim/error.hpp"

// Asserts that `expr` throws gazesim::Error with the given code.
#define CHECK_ERRC(expr, errc)                                 \
  do {                                                         \
    bool thrown_ = false;                                      \
    try {                                                      \
      (void)(expr);                                            \
    } catch (const gazesim::Error& e_) {                       \
      thrown_ = true;                                          \
      CHECK_MESSAGE(e_.code() == (errc), e_.what());           \
    }                                                          \
    CHECK_MESSAGE(thrown_, "expected an Error from " #expr);   \
  } while (false)
