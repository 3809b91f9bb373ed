#pragma once

#include <stdexcept>
#include <string>

namespace cf {

// Base for everything thrown on purpose by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad expression, bad system file, bad CLI arguments.
struct InputError : Error {
  using Error::Error;
};

// A numeric stage could not deliver its contract (divergence, escape,
// ill-conditioning).  Callers that can degrade gracefully catch this.
struct NumericError : Error {
  using Error::Error;
};

// An internal invariant failed; always a bug, mapped to exit code 3 by the CLI.
struct InternalError : Error {
  using Error::Error;
};

#define CF_CHECK(cond, msg)                                                    \
  do {                                                                         \
    if (!(cond)) throw ::cf::InternalError(std::string("invariant failed: ") + \
                                           (msg) + " [" #cond "]");            \
  } while (0)

}  // namespace cf
