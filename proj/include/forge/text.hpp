#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

/// Splits `text` into lines; a trailing newline does not produce an empty
/// final line and a trailing '\r' on each line is removed.
std::vector<std::string_view> lines(std::string_view text);

/// Splits on runs of ASCII spaces, dropping empty fields.
std::vector<std::string_view> split_spaces(std::string_view line);

/// Splits on every occurrence of `sep`; empty fields are kept.
std::vector<std::string_view> split_exact(std::string_view line, char sep);

bool is_valid_utf8(std::string_view bytes);

bool is_digits(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Removes leading "# forge" provenance lines written by this toolkit.
std::string_view strip_provenance(std::string_view text);

}  // namespace forge::text
