#pragma once

#include <stdexcept>

namespace shillkit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
struct IoError : Error {
  using Error::Error;
};

// Malformed input data; the message carries file and line context.
struct ParseError : Error {
  using Error::Error;
};

// Invalid configuration or arguments.
struct ValidationError : Error {
  using Error::Error;
};

// Unknown user or item id.
struct LookupError : Error {
  using Error::Error;
};

// Operation needs data the matrix does not carry (e.g. genre metadata).
struct CapabilityError : Error {
  using Error::Error;
};

// The user has no ratings to predict from.
struct ColdStartError : Error {
  using Error::Error;
};

}  // namespace shillkit
