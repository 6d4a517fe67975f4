#ifndef WGCHAIN_ERRORS_HPP
#define WGCHAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wgchain {

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear solve or propagator failed numerically. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition_estimate = 0.0)
      : std::runtime_error(what), rcond_(condition_estimate) {}

  /// Reciprocal condition estimate of the offending matrix (0 when unknown).
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

}  // namespace wgchain

#endif  // WGCHAIN_ERRORS_HPP
