#pragma once

#include <stdexcept>

namespace lrcset {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

/// A structural requirement was violated, e.g. more gallery images than
/// pixels per image.
struct ConditionViolation : Error {
  using Error::Error;
};

/// Normal-equation solve requested on a rank-deficient regressor.
struct SingularRegressor : Error {
  using Error::Error;
};

struct UnsupportedOperation : Error {
  using Error::Error;
};

struct IngestError : Error {
  using Error::Error;
};

struct ProtocolError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace lrcset
