#pragma once

#include <stdexcept>
#include <string>

namespace photonet {

enum class ErrorKind {
  io,
  usage,
  parse,
  structural,
  precondition,
  parameter,
  unknown_target,
  consistency,
  coverage,
  domain,
  infinite_loss,
  undefined_rate,
  undefined_density,
  comparison,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library. The kind drives CLI exit codes and
/// lets tests distinguish error paths without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit codes: 0 success, 2 I/O, 64 usage, 65 data/consistency.
int exit_code_for(ErrorKind kind);

}  // namespace photonet
