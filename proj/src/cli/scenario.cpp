#include "bcim/cli/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "bcim/analysis.hpp"
#include "bcim/homeostasis.hpp"
#include "bcim/parameters_io.hpp"
#include "bcim/text.hpp"

namespace bcim::cli {

namespace fs = std::filesystem;

fs::path data_dir() {
  if (const char* env = std::getenv("BCIM_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return BCIM_DATA_DIR;
}

namespace {

struct KindInfo {
  const char* dir;
  const char* ext;
};

KindInfo kind_info(PresetKind kind) {
  switch (kind) {
    case PresetKind::scenario: return {"scenarios", ".scenario"};
    case PresetKind::params: return {"params", ".params"};
    case PresetKind::batch: return {"batches", ".batch"};
  }
  return {"", ""};
}

std::string first_description(const fs::path& path) {
  // `description = ...` for scenarios and batches, leading comment otherwise.
  const std::string text = read_text_file(path);
  std::string comment;
  for (std::string_view raw : split(text, '\n')) {
    std::string_view line = trim(raw);
    if (line.rfind("description", 0) == 0) {
      std::string_view k, v;
      if (split_key_value(line, k, v) && k == "description") return std::string(v);
    }
    if (comment.empty() && !line.empty() && line.front() == '#') comment = std::string(trim(line.substr(1)));
  }
  return comment;
}

double number(std::string_view key, std::string_view value) {
  double v = 0.0;
  if (!parse_double(value, v)) throw std::invalid_argument("bad number for '" + std::string(key) + "': '" + std::string(value) + "'");
  return v;
}

}  // namespace

fs::path resolve_preset(const std::string& name_or_path, PresetKind kind) {
  if (name_or_path.empty()) throw std::invalid_argument("empty preset name");
  const fs::path direct(name_or_path);
  if (fs::is_regular_file(direct)) return direct;
  const auto info = kind_info(kind);
  const fs::path bundled = data_dir() / info.dir / (name_or_path + info.ext);
  if (fs::is_regular_file(bundled)) return bundled;
  throw std::invalid_argument("no file or bundled " + std::string(info.dir) + " preset named '" + name_or_path + "'");
}

std::vector<PresetInfo> list_presets(PresetKind kind) {
  const auto info = kind_info(kind);
  std::vector<PresetInfo> out;
  const fs::path dir = data_dir() / info.dir;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != info.ext) continue;
    out.push_back({entry.path().stem().string(), first_description(entry.path())});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

ModelParameters load_parameters(const std::string& name_or_path) {
  const fs::path path = resolve_preset(name_or_path, PresetKind::params);
  return ModelParameters(read_parameter_file(path));
}

DoseSchedule load_schedule(const std::string& spec, double start) {
  if (spec.empty() || spec == "none") return {};
  if (spec.size() == 5 && spec.rfind("case", 0) == 0 && spec[4] >= '1' && spec[4] <= '9') {
    return preset_schedule(spec[4] - '0', start);
  }
  const DoseSchedule file = read_schedule_file(spec);
  if (start == 0.0) return file;
  std::vector<DoseWindow> shifted = file.windows();
  for (auto& w : shifted) w.start += start;
  return DoseSchedule(std::move(shifted));
}

ModelParameters ScenarioSpec::parameters() const {
  ModelParameters p = load_parameters(params);
  for (auto [param, value] : param_overrides) p = p.with(param, value);
  return p;
}

ModelState ScenarioSpec::initial_state(const ModelParameters& p) const {
  ModelState s;
  if (ic == "E0") s = zero_tumor_state().to_model_state();
  else if (ic == "E1") s = high_tumor_state().to_model_state();
  else if (ic == "equilibrium") s = zero_tumor_equilibrium(p);
  else throw std::invalid_argument("unknown initial condition '" + ic + "' (E0, E1, equilibrium)");
  for (auto [c, v] : ic_overrides) s = s.with(c, v);
  if (!s.in_domain()) throw std::invalid_argument("initial condition has negative components");
  return s;
}

DoseSchedule ScenarioSpec::dose_schedule() const { return load_schedule(schedule, schedule_start); }

void apply_scenario_setting(ScenarioSpec& spec, std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "description") spec.description = v;
  else if (key == "params") spec.params = v;
  else if (key == "ic") spec.ic = v;
  else if (key == "schedule") spec.schedule = v;
  else if (key == "schedule_start") spec.schedule_start = number(key, value);
  else if (key == "t_start") spec.t_start = number(key, value);
  else if (key == "horizon") spec.horizon = number(key, value);
  else if (key == "rtol") spec.solver.rtol = number(key, value);
  else if (key == "atol_cells") spec.solver.atol_cells = number(key, value);
  else if (key == "atol_X") spec.solver.atol_X = number(key, value);
  else if (key == "max_step") spec.solver.max_step = number(key, value);
  else if (key == "sample_interval") spec.solver.sample_interval = number(key, value);
  else if (key == "method") spec.solver.method = method_from_name(value);
  else if (key.rfind("ic.", 0) == 0) {
    const auto c = component_from_name(key.substr(3));
    if (!c) throw std::invalid_argument("unknown state component '" + std::string(key.substr(3)) + "'");
    spec.ic_overrides.emplace_back(*c, number(key, value));
  } else if (key.rfind("param.", 0) == 0) {
    const auto p = param_from_name(key.substr(6));
    if (!p) throw std::invalid_argument("unknown parameter '" + std::string(key.substr(6)) + "'");
    spec.param_overrides.emplace_back(*p, number(key, value));
  } else {
    throw std::invalid_argument("unknown scenario key '" + std::string(key) + "'");
  }
  if (!(spec.horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
}

ScenarioSpec parse_scenario_text(std::string_view text, const std::string& source) {
  ScenarioSpec spec;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    std::string_view key, value;
    if (!split_key_value(line, key, value)) throw ParseError(source, line_no, "expected 'key = value'");
    try {
      apply_scenario_setting(spec, key, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return spec;
}

ScenarioSpec load_scenario(const std::string& name_or_path) {
  const fs::path path = resolve_preset(name_or_path, PresetKind::scenario);
  ScenarioSpec spec = parse_scenario_text(read_text_file(path), path.string());
  spec.name = path.stem().string();
  // Relative schedule files resolve against the scenario's directory.
  if (spec.schedule != "none" && spec.schedule.rfind("case", 0) != 0 && fs::path(spec.schedule).is_relative() &&
      !fs::exists(spec.schedule)) {
    const fs::path candidates[] = {path.parent_path() / spec.schedule, data_dir() / "schedules" / spec.schedule};
    for (const auto& c : candidates) {
      if (fs::is_regular_file(c)) {
        spec.schedule = c.string();
        break;
      }
    }
  }
  return spec;
}

std::vector<std::pair<std::string, ScenarioSpec>> load_batch(const std::string& name_or_path) {
  const fs::path path = resolve_preset(name_or_path, PresetKind::batch);
  const std::string text = read_text_file(path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    std::string_view label, scenario;
    if (!split_key_value(line, label, scenario) || label.empty() || scenario.empty()) {
      throw ParseError(path.string(), line_no, "expected 'label = scenario'");
    }
    if (label == "description") continue;
    if (!seen.insert(std::string(label)).second) {
      throw ParseError(path.string(), line_no, "duplicate case label '" + std::string(label) + "'");
    }
    entries.emplace_back(std::string(label), std::string(scenario));
  }
  if (entries.empty()) throw std::invalid_argument(path.string() + ": batch lists no scenarios");
  std::vector<std::pair<std::string, ScenarioSpec>> out;
  for (auto& [label, scenario] : entries) {
    fs::path p(scenario);
    if (p.is_relative() && !fs::exists(p) && fs::is_regular_file(path.parent_path() / p)) {
      scenario = (path.parent_path() / p).string();
    }
    out.emplace_back(label, load_scenario(scenario));
  }
  return out;
}

}  // namespace bcim::cli
