#pragma once

#include <stdexcept>
#include <string>

namespace carpetks {

// Error categories map onto CLI exit codes: config -> 1, numeric -> 2, budget -> 3.
enum class ErrorKind { config, numeric, budget };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::config: return 1;
      case ErrorKind::numeric: return 2;
      case ErrorKind::budget: return 3;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorKind::config, msg); }
inline Error numeric_error(const std::string& msg) { return Error(ErrorKind::numeric, msg); }
inline Error budget_error(const std::string& msg) { return Error(ErrorKind::budget, msg); }

}  // namespace carpetks
