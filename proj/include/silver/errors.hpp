#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy. Every loader/operation failure throws a typed error whose
// message carries the location (byte offset, line number, row index) when one
// exists.

namespace silver {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Embedding math.
struct ZeroRowError : Error {
  using Error::Error;
};
struct DimMismatchError : Error {
  using Error::Error;
};

// Text metrics.
struct EmptySentenceError : Error {
  using Error::Error;
};

// Statistics.
struct DegenerateSampleError : Error {
  using Error::Error;
};
struct DegenerateRangeError : Error {
  using Error::Error;
};

// Experiments.
struct TooSmallError : Error {
  using Error::Error;
};
struct TooShortError : Error {
  using Error::Error;
};
struct BadIntensityError : Error {
  using Error::Error;
};
struct MissingAnnotationError : Error {
  using Error::Error;
};
struct NotSquareError : Error {
  using Error::Error;
};

// File formats. Loaders reject rather than repair; FormatError messages carry
// the offending byte offset or line.
struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct BadMagicError : FormatError {
  using FormatError::FormatError;
};
struct VersionMismatchError : FormatError {
  using FormatError::FormatError;
};
struct CorruptRecordError : FormatError {
  using FormatError::FormatError;
};
struct DimInconsistentError : FormatError {
  using FormatError::FormatError;
};
struct ParseError : FormatError {
  using FormatError::FormatError;
};
struct DuplicateIdError : FormatError {
  using FormatError::FormatError;
};

}  // namespace silver
