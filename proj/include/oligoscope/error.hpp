#ifndef OLIGOSCOPE_ERROR_HPP_
#define OLIGOSCOPE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace oligoscope {

// Domain-level failure (bad input, cap exceeded, precondition violated).
// `code` is a stable machine-readable identifier; `what()` is for humans.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace oligoscope

#endif  // OLIGOSCOPE_ERROR_HPP_
