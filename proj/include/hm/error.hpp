#pragma once

#include <stdexcept>
#include <string>

namespace hm {

// Failure raised by a numerical routine. `where` names the operation so the
// CLI can report provenance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string where, const std::string& what, double estimate = 0.0)
      : std::runtime_error(where + ": " + what), where_(std::move(where)), estimate_(estimate) {}

  const std::string& where() const { return where_; }
  double estimate() const { return estimate_; }

 private:
  std::string where_;
  double estimate_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hm
