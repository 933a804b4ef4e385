#ifndef TALBOT_ERRORS_HPP
#define TALBOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace talbot {

/// Invalid physical parameters or configuration text.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A sampling grid too coarse for the requested quantity.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the region where a method is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed form that does not apply to the given grating.
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace talbot

#endif
