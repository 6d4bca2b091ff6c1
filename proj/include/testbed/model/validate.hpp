#pragma once

#include <string>
#include <vector>

#include "testbed/model/config.hpp"

namespace testbed::model {

enum class Severity { Error, Warning };

struct Violation {
  Severity severity = Severity::Error;
  std::string path;  // e.g. "hosts[3].nics[0].ip"
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks every structural invariant and cross reference of the config.
/// Returns an empty list iff the config is sound; the list is sorted by
/// path with numeric indices compared numerically.
std::vector<Violation> validate_config(const TestbedConfig& cfg);

bool has_errors(const std::vector<Violation>& violations);

/// Natural ordering of field paths: "hosts[2]" < "hosts[10]".
bool path_less(const std::string& a, const std::string& b);

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace testbed::model
