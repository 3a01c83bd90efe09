#include "bcim/clinical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <stdexcept>

namespace bcim {

namespace {

constexpr double kUm3PerMm3 = 1e9;

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be a finite value >= 0");
}

}  // namespace

double sphere_volume(double diameter) {
  require_nonnegative(diameter, "diameter");
  return std::numbers::pi / 6.0 * diameter * diameter * diameter;
}

double cell_volume() { return sphere_volume(kTumorCellDiameterUm); }

double volume_to_cells(double volume_mm3) {
  require_nonnegative(volume_mm3, "volume");
  return std::round(volume_mm3 * kUm3PerMm3 / cell_volume());
}

double cells_to_volume(double cells) {
  require_nonnegative(cells, "cell count");
  return cells * cell_volume() / kUm3PerMm3;
}

double diameter_to_cells(double diameter_mm) {
  require_nonnegative(diameter_mm, "diameter");
  return sphere_volume(diameter_mm) * kUm3PerMm3 / cell_volume();
}

double cells_to_diameter(double cells) {
  require_nonnegative(cells, "cell count");
  return std::cbrt(cells) * kTumorCellDiameterUm / 1000.0;
}

std::string_view stage_label(Stage s) {
  switch (s) {
    case Stage::T1mi: return "T1mi";
    case Stage::T1a: return "T1a";
    case Stage::T1b: return "T1b";
    case Stage::T1c: return "T1c";
    case Stage::T2: return "T2";
    case Stage::T3: return "T3";
  }
  return "?";
}

std::string_view StageCategory::label() const { return stage_label(stage); }

std::optional<Stage> stage_from_label(std::string_view label) {
  for (Stage s : kStages) {
    if (stage_label(s) == label) return s;
  }
  return std::nullopt;
}

StageCategory stage_category(Stage s) {
  const auto i = static_cast<std::size_t>(s);
  const double lo = i == 0 ? 0.0 : diameter_to_cells(kStageDiametersMm[i - 1]);
  const double hi = i < kStageDiametersMm.size() ? diameter_to_cells(kStageDiametersMm[i])
                                                 : std::numeric_limits<double>::infinity();
  return {s, lo, hi, s <= Stage::T1c};
}

StageCategory classify_stage(double cells) {
  require_nonnegative(cells, "cell count");
  for (Stage s : kStages) {
    const StageCategory cat = stage_category(s);
    if (cells < cat.hi) return cat;
  }
  return stage_category(Stage::T3);
}

}  // namespace bcim
