#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testbed/common/error.hpp"

namespace testbed::scanmerge {

enum class CpePart { OS, Application, Hardware };

class MalformedCpe : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// CPE 2.2 URI binding: `cpe:/<part>:<vendor>:<product>[:<version>[:<tail>...]]`.
///
/// Segments are kept verbatim so that formatting reproduces the parsed text
/// byte for byte. A present-but-empty version segment (as in
/// `cpe:/o:microsoft:windows_7::sp1`) is stored as an empty string, which is
/// distinct from an absent one.
struct CpeUri {
  CpePart part = CpePart::OS;
  std::string vendor;
  std::string product;
  std::optional<std::string> version;
  std::vector<std::string> tail;  // update, edition, language ...

  static CpeUri parse(std::string_view text);
  std::string to_string() const;

  /// First non-empty segment after the product, if any.
  std::optional<std::string> version_token() const;

  friend bool operator==(const CpeUri&, const CpeUri&) = default;
};

char part_letter(CpePart part);

}  // namespace testbed::scanmerge
