#pragma once

#include <stdexcept>
#include <string>

namespace socel {

enum class ErrorKind {
  Syntax,        // query text does not parse
  Static,        // unknown relation/label, schema violation
  Unsupported,   // operator or predicate outside what an algorithm accepts
  Precondition,  // caller broke a documented precondition
  Capacity,      // documented size limit exceeded
  Range,         // position outside the stream
  Stream,        // malformed stream or event data
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace socel
