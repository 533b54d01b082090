#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace subspect {

using cplx = std::complex<double>;

// Error taxonomy. The CLI maps these onto distinct exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad parameter values, malformed config files, inconsistent settings.
struct ConfigError : Error {
  using Error::Error;
};

// Shape/dimension mismatches between tensors, matrices and frames.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid labels, NaN/Inf inputs, corrupted payloads.
struct DataError : Error {
  using Error::Error;
};

// Missing/unreadable/unwritable files, checksum and version mismatches.
struct IoError : Error {
  using Error::Error;
};

}  // namespace subspect
