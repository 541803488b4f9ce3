#pragma once

#include <stdexcept>
#include <string>

namespace attnloc {

// Base for every failure that maps to CLI exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string code;  // machine-readable: "syntax", "subset-violation", "declaration"
  std::string message;

  std::string format() const;
};

class ParseError : public Error {
 public:
  explicit ParseError(Diagnostic d);
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class NotObservableError : public Error {
 public:
  using Error::Error;
};

}  // namespace attnloc
