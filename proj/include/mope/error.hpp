#pragma once

#include <stdexcept>
#include <string>

namespace mope {

/// Bad input data: unreadable files, records that violate invariants,
/// corpora too small for the requested operation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's contract.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mope
