#pragma once

#include <stdexcept>
#include <string>

namespace salobj {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Filesystem failure: missing file, unreadable directory, short write.
class IoError : public Error {
public:
  using Error::Error;
};

/// Bytes on disk do not parse as the expected format.
class FormatError : public Error {
public:
  using Error::Error;
};

/// Model file has the wrong magic or an unknown version.
class VersionMismatch : public FormatError {
public:
  using FormatError::FormatError;
};

/// Model file ends before its declared content.
class TruncatedFile : public FormatError {
public:
  using FormatError::FormatError;
};

} // namespace salobj
