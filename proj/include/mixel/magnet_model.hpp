#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace mixel {

// Anhysteretic tip field of the writing electromagnet versus coil current.
struct ElectromagnetModel {
  double b_sat_tip = 0.302;     // T
  double i_sat = 10.0;          // A
  double shape = 3.0;           // tanh steepness; tanh(3) puts 10 A within 0.5% of saturation
  int turns = 250;
  double core_mu_r = 90000.0;
  double noise_sigma = 1.01e-3;  // T, repeatability of a single reading
};

// b_sat_tip * tanh(shape * i / i_sat). Odd, strictly increasing, zero at the
// origin. Throws RangeError above 1.5 * i_sat, where the core is unmodeled.
double emag_field(const ElectromagnetModel& model, double amps);

// emag_field plus one gaussian repeatability sample.
double sample_emag_field(const ElectromagnetModel& model, double amps, std::mt19937_64& rng);

// Magnetic sheet response. Programming is history-free: the remanence left
// by a pulse depends only on that pulse.
struct SheetModel {
  double b_sat = 0.0344;          // T, remanent flux at full saturation
  double i_program_full = 10.0;   // A, smallest current that saturates
  double reach_steepness = 1.75;  // reach(3.3) ~ 0.55, reach(6.6) ~ 0.87
  double i_coercive = 1.2;        // A, reverse pulse that drops a saturated pixel to zero

  // Throws ConfigError for non-positive parameters or a coercive current
  // outside (0, i_program_full).
  void validate() const;
};

struct PixelState {
  double m = 0.0;  // normalized remanence in [-1, 1]; flux = m * b_sat

  friend bool operator==(const PixelState&, const PixelState&) = default;
};

inline double flux_tesla(const SheetModel& sheet, PixelState s) noexcept { return s.m * sheet.b_sat; }

// Normalized remanence reachable with a pulse of the given magnitude:
// tanh(k * i / i_full) / tanh(k). reach(0) = 0, reach(i_full) = 1.
// Throws RangeError outside [0, i_program_full].
double reach(const SheetModel& sheet, double amps);

// Overwrite semantics: sign(pulse) * reach(|pulse|). A zero pulse leaves the
// state alone; a pulse of exactly i_coercive magnitude demagnetizes.
// Throws RangeError when |pulse| > i_program_full.
PixelState program_pixel(const SheetModel& sheet, PixelState state, double pulse_amps);

// Signed pulse current that programs target_m from any starting state,
// found by bracketed root finding on reach(). Throws DomainError when
// |target_m| > 1.
double current_for_target(const SheetModel& sheet, double target_m);

enum class LoopBranch { Initial, Descending, Ascending };
std::string_view to_string(LoopBranch b) noexcept;

struct LoopSample {
  double amps = 0.0;
  double flux = 0.0;  // T
  LoopBranch branch = LoopBranch::Initial;
};

// In-field loop model. Uses a Preisach-type separable hysteron density with
// cumulative G(x) = reach(x)^e, where e makes the major-loop coercive
// current equal i_coercive. Branch values (normalized):
//   initial(I)          = G(I)^2                         for 0 <= I <= peak
//   descending(I; peak) = G(peak)^2 - 2 G(peak) G(max(0, -I))
//   ascending(I; peak)  = -descending(-I; peak)
// Loops of different peaks nest strictly inside one another.
double loop_initial(const SheetModel& sheet, double amps);
double loop_descending(const SheetModel& sheet, double peak_amps, double amps);
double loop_ascending(const SheetModel& sheet, double peak_amps, double amps);

// Reverse current at which the descending branch from `peak_amps` crosses zero.
double loop_coercive_current(const SheetModel& sheet, double peak_amps);

// Closed anti-clockwise loop: initial 0 -> +peak (steps + 1 samples),
// descending +peak -> -peak and ascending -peak -> +peak (2 * steps + 1
// samples each). Throws DomainError for peak <= 0 or steps < 8, RangeError
// above i_program_full.
std::vector<LoopSample> trace_hysteresis_loop(const SheetModel& sheet, double peak_amps, std::size_t steps);

// "current_amps,flux_tesla,branch_label" header plus one row per sample.
std::string loop_to_csv(const std::vector<LoopSample>& loop);

}  // namespace mixel
