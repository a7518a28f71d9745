#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epilab {

enum class ErrorKind {
  invalid_parameters,
  grid_too_small,
  non_finite_input,
  excessive_mask_loss,
  kernel_underresolved,
  step_size_insufficient,
  config_invalid,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the named kinds so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace epilab
