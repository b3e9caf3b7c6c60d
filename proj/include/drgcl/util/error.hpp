// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace drgcl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
  using Error::Error;
};

// Argument outside an op's domain, e.g. an index beyond a row count.
struct DomainError : Error {
  using Error::Error;
};

// A value became NaN or infinite.
struct NumericError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace drgcl
