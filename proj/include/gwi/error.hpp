#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gwi {

enum class ErrorKind {
  invalid_argument,
  insufficient_sample,
  degenerate_sample,
  threshold_too_high,
  inversion_failure,
  infinite_mean,
  unwritable_path,
  config_error,
};

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-status mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_sample: return "insufficient-sample";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::threshold_too_high: return "threshold-too-high";
    case ErrorKind::inversion_failure: return "inversion-failure";
    case ErrorKind::infinite_mean: return "infinite-mean";
    case ErrorKind::unwritable_path: return "unwritable-path";
    case ErrorKind::config_error: return "config-error";
  }
  return "unknown";
}

}  // namespace gwi
