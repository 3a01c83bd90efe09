#include "bcim/dosing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bcim/text.hpp"

namespace bcim {

DoseSchedule::DoseSchedule(std::vector<DoseWindow> windows) : windows_(std::move(windows)) {
  std::sort(windows_.begin(), windows_.end(),
            [](const DoseWindow& a, const DoseWindow& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const auto& w = windows_[i];
    if (!(w.start >= 0.0) || !std::isfinite(w.start)) throw std::invalid_argument("dose window start must be >= 0");
    if (!(w.duration > 0.0) || !std::isfinite(w.duration)) {
      throw std::invalid_argument("dose window duration must be > 0");
    }
    if (!(w.rate >= 0.0) || !std::isfinite(w.rate)) throw std::invalid_argument("dose window rate must be >= 0");
    if (i > 0 && windows_[i - 1].end() > w.start) {
      throw std::invalid_argument("dose windows overlap at t = " + format_double(w.start));
    }
  }
}

double DoseSchedule::rate_at(double t) const {
  // Last window with start <= t.
  auto it = std::upper_bound(windows_.begin(), windows_.end(), t,
                             [](double x, const DoseWindow& w) { return x < w.start; });
  if (it == windows_.begin()) return 0.0;
  --it;
  return t < it->end() ? it->rate : 0.0;
}

std::vector<double> DoseSchedule::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  for (const auto& w : windows_) {
    for (double b : {w.start, w.end()}) {
      if (b > t0 && b < t1 && (out.empty() || b > out.back())) out.push_back(b);
    }
  }
  return out;
}

double DoseSchedule::delivered_between(double t0, double t1) const {
  double total = 0.0;
  for (const auto& w : windows_) {
    const double lo = std::max(t0, w.start);
    const double hi = std::min(t1, w.end());
    if (hi > lo) total += w.rate * (hi - lo);
  }
  return total;
}

double dose_to_concentration(double dose_mg_per_m2, double bsa_m2, double blood_volume_L) {
  if (!(dose_mg_per_m2 > 0.0) || !(bsa_m2 > 0.0) || !(blood_volume_L > 0.0)) {
    throw std::domain_error("dose, body surface area and blood volume must be positive");
  }
  return dose_mg_per_m2 * bsa_m2 / blood_volume_L;
}

double infusion_rate(double concentration, double duration_days) {
  if (!(duration_days > 0.0)) throw std::domain_error("infusion duration must be positive");
  return concentration / duration_days;
}

double v_of_t(const DoseSchedule& schedule, double t) { return schedule.rate_at(t); }

namespace {

struct Regimen {
  int doses;
  double interval;
  double mg_per_m2;
};

Regimen regimen(int case_id) {
  switch (case_id) {
    case 1: return {4, 7.0, 375.0};
    case 2: return {2, 7.0, 1000.0};
    case 3: return {8, 7.0, 375.0};
    case 4: return {4, 5.0, 122.549};
    case 5: return {8, 7.0, 1000.0};
    default: throw std::invalid_argument("unknown dosing case " + std::to_string(case_id) + " (expected 1..5)");
  }
}

}  // namespace

DoseSchedule preset_schedule(int case_id, double start) {
  const Regimen reg = regimen(case_id);
  const double rate =
      infusion_rate(dose_to_concentration(reg.mg_per_m2, kDefaultBsa, kDefaultBloodVolume), kDefaultInfusionDays);
  std::vector<DoseWindow> windows;
  for (int i = 0; i < reg.doses; ++i) windows.push_back({start + i * reg.interval, kDefaultInfusionDays, rate});
  return DoseSchedule(std::move(windows));
}

std::string preset_description(int case_id) {
  const Regimen reg = regimen(case_id);
  std::string every = reg.interval == 7.0 ? "weekly" : "every " + format_double(reg.interval) + " days";
  return std::to_string(reg.doses) + " doses of " + format_double(reg.mg_per_m2) + " mg/m^2 " + every;
}

DoseSchedule parse_schedule_text(std::string_view text, const std::string& source) {
  double bsa = kDefaultBsa, blood = kDefaultBloodVolume, hours = kDefaultInfusionDays * 24.0;
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = strip_comment(raw);
    if (line.empty()) continue;
    std::string_view key, value;
    if (split_key_value(line, key, value)) {
      if (!rows.empty()) throw ParseError(source, line_no, "header fields must precede dose rows");
      double v = 0.0;
      if (!parse_double(value, v) || !(v > 0.0)) throw ParseError(source, line_no, "bad value for '" + std::string(key) + "'");
      if (key == "bsa") bsa = v;
      else if (key == "blood_volume_L") blood = v;
      else if (key == "infusion_hours") hours = v;
      else throw ParseError(source, line_no, "unknown field '" + std::string(key) + "'");
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() == 2 && cols[0] == "start_days" && cols[1] == "dose_mg_per_m2") continue;
    double t = 0.0, dose = 0.0;
    if (cols.size() != 2 || !parse_double(cols[0], t) || !parse_double(cols[1], dose)) {
      throw ParseError(source, line_no, "expected 'start_days,dose_mg_per_m2'");
    }
    if (!(t >= 0.0) || !(dose > 0.0)) throw ParseError(source, line_no, "start must be >= 0 and dose > 0");
    rows.emplace_back(t, dose);
  }
  const double duration = hours / 24.0;
  std::vector<DoseWindow> windows;
  for (auto [t, dose] : rows) {
    windows.push_back({t, duration, infusion_rate(dose_to_concentration(dose, bsa, blood), duration)});
  }
  try {
    return DoseSchedule(std::move(windows));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
}

DoseSchedule read_schedule_file(const std::filesystem::path& path) {
  return parse_schedule_text(read_text_file(path), path.string());
}

}  // namespace bcim
