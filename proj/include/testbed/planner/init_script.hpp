#pragma once

#include <string>

#include "testbed/model/config.hpp"

namespace testbed::planner {

class UnknownFamily : public Error {
 public:
  explicit UnknownFamily(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

enum class ScriptFlavor { Debian, Suse, RedHat, Windows };

/// Package-manager flavor for a template, keyed on os/family.
ScriptFlavor script_flavor(const model::TemplateSpec& tmpl);

/// First-boot script for `host`: an idempotency guard, one install command per
/// package, and agent bootstrap lines when the host has an agent profile.
/// Linux flavors produce POSIX sh; Windows produces a batch file.
std::string emit_init_script(const model::HostSpec& host, const model::TestbedConfig& cfg);

}  // namespace testbed::planner
