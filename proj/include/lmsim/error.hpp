#pragma once

#include <stdexcept>
#include <string>

namespace lmsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training history has too few records or only one label class.
class DegenerateHistory : public Error {
 public:
  using Error::Error;
};

/// Feature vector length does not match the model variant.
class ArityMismatch : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for this model variant.
class WrongVariant : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmsim
