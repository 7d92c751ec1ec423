#include "mixel/magnet_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "mixel/errors.hpp"
#include "mixel/format.hpp"

namespace mixel {

double emag_field(const ElectromagnetModel& model, double amps) {
  if (!std::isfinite(amps) || std::abs(amps) > 1.5 * model.i_sat) {
    throw RangeError("coil current " + std::to_string(amps) + " A beyond modeled range");
  }
  return model.b_sat_tip * std::tanh(model.shape * amps / model.i_sat);
}

double sample_emag_field(const ElectromagnetModel& model, double amps, std::mt19937_64& rng) {
  const double b = emag_field(model, amps);
  if (model.noise_sigma <= 0.0) {
    return b;
  }
  std::normal_distribution<double> noise(0.0, model.noise_sigma);
  return b + noise(rng);
}

void SheetModel::validate() const {
  if (!(b_sat > 0.0) || !(i_program_full > 0.0) || !(reach_steepness > 0.0)) {
    throw ConfigError("sheet model parameters must be positive");
  }
  if (!(i_coercive > 0.0 && i_coercive < i_program_full)) {
    throw ConfigError("coercive current must lie in (0, i_program_full)");
  }
}

double reach(const SheetModel& sheet, double amps) {
  if (!(amps >= 0.0 && amps <= sheet.i_program_full)) {
    throw RangeError("pulse magnitude " + std::to_string(amps) + " A outside [0, " +
                     std::to_string(sheet.i_program_full) + "]");
  }
  const double k = sheet.reach_steepness;
  return std::tanh(k * amps / sheet.i_program_full) / std::tanh(k);
}

PixelState program_pixel(const SheetModel& sheet, PixelState state, double pulse_amps) {
  const double magnitude = std::abs(pulse_amps);
  if (!std::isfinite(pulse_amps) || magnitude > sheet.i_program_full) {
    throw RangeError("pulse " + std::to_string(pulse_amps) + " A exceeds " + std::to_string(sheet.i_program_full) + " A");
  }
  if (pulse_amps == 0.0) {
    return state;
  }
  if (magnitude == sheet.i_coercive) {
    return PixelState{0.0};
  }
  return PixelState{std::copysign(reach(sheet, magnitude), pulse_amps)};
}

double current_for_target(const SheetModel& sheet, double target_m) {
  if (!(target_m >= -1.0 && target_m <= 1.0)) {
    throw DomainError("target magnetization outside [-1, 1]");
  }
  const double goal = std::abs(target_m);
  if (goal == 0.0) {
    return 0.0;
  }
  if (goal == 1.0) {
    return std::copysign(sheet.i_program_full, target_m);
  }
  auto residual = [&](double i) { return reach(sheet, i) - goal; };
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, sheet.i_program_full,
                                                          boost::math::tools::eps_tolerance<double>(50), iterations);
  double amps = 0.5 * (lo + hi);
  // Exactly i_coercive is the demagnetizing pulse; step off it by one ulp.
  if (amps == sheet.i_coercive) {
    amps = std::nextafter(amps, sheet.i_program_full);
  }
  return std::copysign(amps, target_m);
}

std::string_view to_string(LoopBranch b) noexcept {
  switch (b) {
    case LoopBranch::Initial:
      return "initial";
    case LoopBranch::Descending:
      return "descending";
    case LoopBranch::Ascending:
      return "ascending";
  }
  return "initial";
}

namespace {

// Exponent e with G(i_coercive) = reach(i_coercive)^e = 1/2.
double density_exponent(const SheetModel& sheet) {
  return std::log(0.5) / std::log(reach(sheet, sheet.i_coercive));
}

double cumulative(const SheetModel& sheet, double amps) {
  if (amps <= 0.0) {
    return 0.0;
  }
  return std::pow(reach(sheet, std::min(amps, sheet.i_program_full)), density_exponent(sheet));
}

void check_peak(const SheetModel& sheet, double peak_amps) {
  if (!(peak_amps > 0.0)) {
    throw DomainError("loop peak current must be positive");
  }
  if (peak_amps > sheet.i_program_full) {
    throw RangeError("loop peak current exceeds i_program_full");
  }
}

void check_on_loop(double peak_amps, double amps) {
  if (!(std::abs(amps) <= peak_amps)) {
    throw RangeError("current outside the loop's [-peak, +peak] span");
  }
}

}  // namespace

double loop_initial(const SheetModel& sheet, double amps) {
  const double g = cumulative(sheet, amps);
  return g * g;
}

double loop_descending(const SheetModel& sheet, double peak_amps, double amps) {
  check_peak(sheet, peak_amps);
  check_on_loop(peak_amps, amps);
  const double gp = cumulative(sheet, peak_amps);
  return gp * gp - 2.0 * gp * cumulative(sheet, -amps);
}

double loop_ascending(const SheetModel& sheet, double peak_amps, double amps) {
  return -loop_descending(sheet, peak_amps, -amps);
}

double loop_coercive_current(const SheetModel& sheet, double peak_amps) {
  check_peak(sheet, peak_amps);
  const double half = 0.5 * cumulative(sheet, peak_amps);
  auto residual = [&](double i) { return cumulative(sheet, i) - half; };
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, peak_amps,
                                                          boost::math::tools::eps_tolerance<double>(50), iterations);
  return -0.5 * (lo + hi);
}

std::vector<LoopSample> trace_hysteresis_loop(const SheetModel& sheet, double peak_amps, std::size_t steps) {
  check_peak(sheet, peak_amps);
  if (steps < 8) {
    throw DomainError("hysteresis trace needs at least 8 steps");
  }
  std::vector<LoopSample> out;
  out.reserve(5 * steps + 3);
  const double step = peak_amps / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double i = k == steps ? peak_amps : step * static_cast<double>(k);
    out.push_back({i, sheet.b_sat * loop_initial(sheet, i), LoopBranch::Initial});
  }
  for (std::size_t k = 0; k <= 2 * steps; ++k) {
    const double i = std::clamp(peak_amps - step * static_cast<double>(k), -peak_amps, peak_amps);
    out.push_back({i, sheet.b_sat * loop_descending(sheet, peak_amps, i), LoopBranch::Descending});
  }
  for (std::size_t k = 0; k <= 2 * steps; ++k) {
    const double i = std::clamp(-peak_amps + step * static_cast<double>(k), -peak_amps, peak_amps);
    out.push_back({i, sheet.b_sat * loop_ascending(sheet, peak_amps, i), LoopBranch::Ascending});
  }
  // Pin branch ends to the exact tips so the loop closes bit-for-bit.
  out[steps + 2 * steps + 1].amps = -peak_amps;
  out.back().amps = peak_amps;
  out[steps + 2 * steps + 1].flux = sheet.b_sat * loop_descending(sheet, peak_amps, -peak_amps);
  out.back().flux = sheet.b_sat * loop_ascending(sheet, peak_amps, peak_amps);
  return out;
}

std::string loop_to_csv(const std::vector<LoopSample>& loop) {
  std::ostringstream os;
  os << "current_amps,flux_tesla,branch_label\n";
  for (const auto& s : loop) {
    os << shortest(s.amps) << ',' << shortest(s.flux) << ',' << to_string(s.branch) << '\n';
  }
  return os.str();
}

}  // namespace mixel
