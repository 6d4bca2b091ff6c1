#pragma once

#include <stdexcept>
#include <string>

namespace testbed {

// Broad failure classes. The CLI maps each one onto a process exit code.
enum class ErrorKind {
  Io,          // unreadable / unwritable files
  Syntax,      // malformed input documents
  Validation,  // well-formed input that breaks a semantic rule
  Domain,      // an operation's precondition could not be met
  Internal,    // invariant breach inside the toolkit
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class SyntaxError : public Error {
 public:
  explicit SyntaxError(const std::string& what) : Error(ErrorKind::Syntax, what) {}
};

}  // namespace testbed
