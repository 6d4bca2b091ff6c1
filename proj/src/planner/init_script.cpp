#include "testbed/planner/init_script.hpp"

#include <algorithm>
#include <cctype>

#include "testbed/model/mapping.hpp"

namespace testbed::planner {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool plain_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '-' || c == '_' || c == '+' || c == ':' || c == '~' || c == '=' ||
           c == '/';
  });
}

// Leaves plain tokens bare so package lines read naturally.
std::string sh_quote(std::string_view s) {
  if (plain_token(s)) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

std::string bat_quote(std::string_view s) {
  if (plain_token(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s)
    if (c != '"') out += c;
  return out + "\"";
}

enum class InitSystem { Systemd, Upstart };

InitSystem init_system(const model::TemplateSpec& tmpl) {
  if (lower(tmpl.family) == "ubuntu" && tmpl.generation && model::version_less(*tmpl.generation, "14.04"))
    return InitSystem::Upstart;
  return InitSystem::Systemd;
}

constexpr const char* kAgentBin = "/opt/testbed/agent/agent";
constexpr const char* kWinAgentBin = "C:\\testbed\\agent\\agent.exe";

std::string posix_script(const model::HostSpec& host, const model::TemplateSpec& tmpl, ScriptFlavor flavor) {
  std::string s;
  s += "#!/bin/sh\n";
  s += "# first-boot setup for " + host.name + " (template " + tmpl.id + ")\n";
  s += "set -e\n";
  s += "STAMP=/var/lib/testbed/init.done\n";
  s += "[ -f \"$STAMP\" ] && exit 0\n";
  s += "mkdir -p /var/lib/testbed\n";

  if (!host.packages.empty()) {
    s += "\n";
    switch (flavor) {
      case ScriptFlavor::Debian:
        s += "export DEBIAN_FRONTEND=noninteractive\n";
        s += "apt-get update\n";
        for (const auto& p : host.packages) s += "apt-get -y install " + sh_quote(p.name + "=" + p.version) + "\n";
        break;
      case ScriptFlavor::Suse:
        s += "zypper --non-interactive refresh\n";
        for (const auto& p : host.packages)
          s += "zypper --non-interactive install " + sh_quote(p.name + "=" + p.version) + "\n";
        break;
      case ScriptFlavor::RedHat:
        for (const auto& p : host.packages) s += "yum -y install " + sh_quote(p.name + "-" + p.version) + "\n";
        break;
      case ScriptFlavor::Windows:
        break;
    }
  }

  if (host.agent_profile) {
    const auto cmd = std::string(kAgentBin) + " --profile " + sh_quote(*host.agent_profile) + " --host " +
                     sh_quote(host.name);
    s += "\n";
    if (init_system(tmpl) == InitSystem::Upstart) {
      s += "cat > /etc/init/testbed-agent.conf <<'EOF'\n";
      s += "start on runlevel [2345]\n";
      s += "stop on runlevel [!2345]\n";
      s += "respawn\n";
      s += "exec " + cmd + "\n";
      s += "EOF\n";
      s += "initctl reload-configuration\n";
      s += "start testbed-agent\n";
    } else {
      s += "cat > /etc/systemd/system/testbed-agent.service <<'EOF'\n";
      s += "[Unit]\nDescription=testbed traffic agent\nAfter=network-online.target\n\n";
      s += "[Service]\nExecStart=" + cmd + "\nRestart=always\n\n";
      s += "[Install]\nWantedBy=multi-user.target\n";
      s += "EOF\n";
      s += "systemctl daemon-reload\n";
      s += "systemctl enable --now testbed-agent.service\n";
    }
  }

  s += "\ntouch \"$STAMP\"\n";
  return s;
}

std::string windows_script(const model::HostSpec& host, const model::TemplateSpec& tmpl) {
  std::string s;
  s += "@echo off\r\n";
  s += "rem first-boot setup for " + host.name + " (template " + tmpl.id + ")\r\n";
  s += "set STAMP=%ProgramData%\\testbed\\init.done\r\n";
  s += "if exist \"%STAMP%\" exit /b 0\r\n";
  s += "if not exist \"%ProgramData%\\testbed\" mkdir \"%ProgramData%\\testbed\"\r\n";

  if (!host.packages.empty()) {
    s += "\r\n";
    for (const auto& p : host.packages)
      s += "choco install -y " + bat_quote(p.name) + " --version " + bat_quote(p.version) + "\r\n";
  }

  if (host.agent_profile) {
    s += "\r\n";
    s += "schtasks /Create /F /TN testbed-agent /SC ONSTART /RU SYSTEM /TR \"" + std::string(kWinAgentBin) +
         " --profile " + *host.agent_profile + " --host " + host.name + "\"\r\n";
    s += "schtasks /Run /TN testbed-agent\r\n";
  }

  s += "\r\ntype nul > \"%STAMP%\"\r\n";
  return s;
}

}  // namespace

ScriptFlavor script_flavor(const model::TemplateSpec& tmpl) {
  const auto os = lower(tmpl.os);
  const auto family = lower(tmpl.family);
  if (os == "windows") return ScriptFlavor::Windows;
  if (family == "ubuntu" || family == "debian" || family == "kali") return ScriptFlavor::Debian;
  if (family == "opensuse" || family == "suse" || family == "sles") return ScriptFlavor::Suse;
  if (family == "rhel" || family == "centos" || family == "fedora") return ScriptFlavor::RedHat;
  throw UnknownFamily("no init-script flavor for " + tmpl.os + " " + tmpl.family);
}

std::string emit_init_script(const model::HostSpec& host, const model::TestbedConfig& cfg) {
  const auto* tmpl = cfg.find_template(host.template_id);
  if (!tmpl) throw UnknownFamily("host " + host.name + " references unknown template '" + host.template_id + "'");
  const auto flavor = script_flavor(*tmpl);
  return flavor == ScriptFlavor::Windows ? windows_script(host, *tmpl) : posix_script(host, *tmpl, flavor);
}

}  // namespace testbed::planner
