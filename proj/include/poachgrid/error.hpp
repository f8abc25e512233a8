#pragma once

#include <stdexcept>
#include <string>

namespace poachgrid {

// Categories line up with the CLI exit codes (2, 3, 4).
enum class ErrorKind { Config, Input, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline Error input_error(const std::string& message) {
  return Error(ErrorKind::Input, message);
}

inline Error config_error(const std::string& message) {
  return Error(ErrorKind::Config, message);
}

inline Error internal_error(const std::string& message) {
  return Error(ErrorKind::Internal, message);
}

}  // namespace poachgrid
