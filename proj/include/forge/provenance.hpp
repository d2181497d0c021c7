#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);

/// One-line header written at the top of every artifact:
///   # forge 0.1.0 cmd=<command> key=value ... in:<name>=sha256:<hex>
/// Input names should be stable (file names, not absolute paths) so reruns
/// are byte-identical. Readers skip it via text::strip_provenance.
class Provenance {
 public:
  explicit Provenance(std::string command) : command_(std::move(command)) {}

  Provenance& param(std::string key, std::string value);
  Provenance& input(std::string name, std::string_view contents);

  std::string line() const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::pair<std::string, std::string>> inputs_;
};

}  // namespace forge
