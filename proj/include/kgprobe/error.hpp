#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data, files, arguments or configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input error tied to a 1-based line of a text file.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line), reason_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Endpoint unreachable, HTTP failure, or cache I/O failure during probing.
class NetworkError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses, failed convergence, invalid spectral parameters.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgprobe
