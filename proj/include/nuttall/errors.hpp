#pragma once

#include <stdexcept>
#include <string>

namespace nuttall {

// Invalid arguments (negative order, shape <= 0, ...) are reported with
// std::domain_error. Iterative evaluations that exhaust their budget throw
// ConvergenceError instead of returning a truncated value.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace detail
}  // namespace nuttall
