#pragma once

#include <stdexcept>
#include <string>

namespace infopatch {

/// Failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  Data,  // malformed input, geometry violation, unsupported format
  Io,    // file missing, unreadable or unwritable
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_data_error(const std::string& what) {
  throw Error(ErrorKind::Data, what);
}

[[noreturn]] inline void throw_io_error(const std::string& what) {
  throw Error(ErrorKind::Io, what);
}

}  // namespace infopatch
