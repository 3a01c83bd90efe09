#include "bcim/parameters_io.hpp"

#include "bcim/text.hpp"

namespace bcim {

PartialParameters parse_parameter_text(std::string_view text, const std::string& source) {
  PartialParameters out;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    std::string_view key, value;
    if (!split_key_value(line, key, value)) throw ParseError(source, line_no, "expected 'name = value'");
    const auto param = param_from_name(key);
    if (!param) throw ParseError(source, line_no, "unknown parameter '" + std::string(key) + "'");
    if (out.has(*param)) throw ParseError(source, line_no, "parameter '" + std::string(key) + "' set twice");
    double v = 0.0;
    if (!parse_double(value, v)) throw ParseError(source, line_no, "bad number '" + std::string(value) + "'");
    out.set(*param, v);
  }
  return out;
}

PartialParameters read_parameter_file(const std::filesystem::path& path) {
  return parse_parameter_text(read_text_file(path), path.string());
}

std::string format_parameters(const PartialParameters& params, std::string_view header) {
  std::string out;
  if (!header.empty()) {
    for (std::string_view line : split(header, '\n')) {
      out += "# ";
      out += line;
      out += '\n';
    }
  }
  for (Param p : all_params()) {
    if (!params.has(p)) continue;
    out += param_name(p);
    out += " = ";
    out += format_double(params.get(p));
    out += '\n';
  }
  return out;
}

std::string format_parameters(const ModelParameters& params, std::string_view header) {
  return format_parameters(params.to_partial(), header);
}

}  // namespace bcim
