#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bcim {

/// Error raised while parsing a text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest decimal string that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string_view trim(std::string_view s);
[[nodiscard]] std::vector<std::string_view> split(std::string_view s, char sep);

/// Parses the whole of `s` as a double; returns false on any trailing junk.
[[nodiscard]] bool parse_double(std::string_view s, double& out);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Strips a trailing `# comment` and surrounding whitespace.
[[nodiscard]] std::string_view strip_comment(std::string_view line);

/// Splits `name = value`; returns false when there is no '='.
[[nodiscard]] bool split_key_value(std::string_view line, std::string_view& key, std::string_view& value);

}  // namespace bcim
