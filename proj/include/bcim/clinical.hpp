#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace bcim {

inline constexpr double kTumorCellDiameterUm = 15.15;

[[nodiscard]] double sphere_volume(double diameter);
/// Volume of one spherical tumor cell in um^3.
[[nodiscard]] double cell_volume();

/// Tumor volume in mm^3 to whole cells (rounded to nearest).
[[nodiscard]] double volume_to_cells(double volume_mm3);
[[nodiscard]] double cells_to_volume(double cells);
/// Spherical tumor of the given diameter in mm to cells (not rounded).
[[nodiscard]] double diameter_to_cells(double diameter_mm);
[[nodiscard]] double cells_to_diameter(double cells);

enum class Stage { T1mi, T1a, T1b, T1c, T2, T3 };
inline constexpr std::array<Stage, 6> kStages = {Stage::T1mi, Stage::T1a, Stage::T1b, Stage::T1c, Stage::T2, Stage::T3};
/// Upper diameters in mm of T1mi, T1a, T1b, T1c (= T1) and T2.
inline constexpr std::array<double, 5> kStageDiametersMm = {1.0, 5.0, 10.0, 20.0, 50.0};

struct StageCategory {
  Stage stage;
  double lo;  // cells, inclusive
  double hi;  // cells, exclusive; infinity for T3
  bool t1;    // part of the T1 union

  [[nodiscard]] std::string_view label() const;
};

[[nodiscard]] std::string_view stage_label(Stage s);
[[nodiscard]] std::optional<Stage> stage_from_label(std::string_view label);
[[nodiscard]] StageCategory stage_category(Stage s);
/// Category whose [lo, hi) range contains `cells`. Throws on negative input.
[[nodiscard]] StageCategory classify_stage(double cells);

}  // namespace bcim
