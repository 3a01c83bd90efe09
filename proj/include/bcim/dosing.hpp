#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bcim {

inline constexpr double kDefaultBsa = 1.7;              // m^2
inline constexpr double kDefaultBloodVolume = 5.0;      // L
inline constexpr double kDefaultInfusionDays = 1.0 / 6.0;  // 4 hours

struct DoseWindow {
  double start = 0.0;     // days
  double duration = 0.0;  // days
  double rate = 0.0;      // ug/mL/day

  [[nodiscard]] double end() const { return start + duration; }
  [[nodiscard]] double delivered() const { return rate * duration; }
  bool operator==(const DoseWindow&) const = default;
};

/// Piecewise-constant rituximab input. Windows are sorted and disjoint;
/// each covers the half-open interval [start, start + duration).
class DoseSchedule {
 public:
  DoseSchedule() = default;
  /// Sorts by start and validates; throws std::invalid_argument on overlap,
  /// negative start or rate, or nonpositive duration.
  explicit DoseSchedule(std::vector<DoseWindow> windows);

  [[nodiscard]] const std::vector<DoseWindow>& windows() const { return windows_; }
  [[nodiscard]] bool empty() const { return windows_.empty(); }
  [[nodiscard]] double rate_at(double t) const;
  /// Every window start and end strictly inside (t0, t1), ascending, unique.
  [[nodiscard]] std::vector<double> breakpoints(double t0, double t1) const;
  /// Exact integral of v over [t0, t1].
  [[nodiscard]] double delivered_between(double t0, double t1) const;
  bool operator==(const DoseSchedule&) const = default;

 private:
  std::vector<DoseWindow> windows_;
};

/// mg/m^2 times m^2 over litres gives mg/L, which equals ug/mL.
[[nodiscard]] double dose_to_concentration(double dose_mg_per_m2, double bsa_m2, double blood_volume_L);
[[nodiscard]] double infusion_rate(double concentration, double duration_days);
[[nodiscard]] double v_of_t(const DoseSchedule& schedule, double t);

/// Regimens 1..5: 4 x 375 weekly, 2 x 1000 weekly, 8 x 375 weekly,
/// 4 x 122.549 every 5 days, 8 x 1000 weekly (mg/m^2).
[[nodiscard]] DoseSchedule preset_schedule(int case_id, double start = 0.0);
[[nodiscard]] std::string preset_description(int case_id);

/// Schedule files: optional `bsa = ...`, `blood_volume_L = ...`,
/// `infusion_hours = ...` header lines, then CSV rows `start_days,dose_mg_per_m2`
/// (a row literally equal to that header is skipped). `#` starts a comment.
[[nodiscard]] DoseSchedule parse_schedule_text(std::string_view text, const std::string& source = "<text>");
[[nodiscard]] DoseSchedule read_schedule_file(const std::filesystem::path& path);

}  // namespace bcim
