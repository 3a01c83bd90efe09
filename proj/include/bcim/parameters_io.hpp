#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bcim/model.hpp"

namespace bcim {

// Parameter files hold one `name = value` per line using the ASCII symbol
// names in kParamNames. Blank lines and `#` comments are ignored; unknown or
// repeated names are errors.

[[nodiscard]] PartialParameters parse_parameter_text(std::string_view text, const std::string& source = "<text>");
[[nodiscard]] PartialParameters read_parameter_file(const std::filesystem::path& path);

/// Writes every set parameter in table order with round-trip precision.
[[nodiscard]] std::string format_parameters(const PartialParameters& params, std::string_view header = {});
[[nodiscard]] std::string format_parameters(const ModelParameters& params, std::string_view header = {});

}  // namespace bcim
