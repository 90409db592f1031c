#pragma once

#include <array>
#include <string>

namespace qoct {

// Refractive-index model: either a frequency-independent constant or a
// Sellmeier form in squared micrometers,
//
//   n^2(lambda) = A + D*l2 + sum_j (P_j + Q_j*l2) / (l2 - C_j),   l2 = lambda_um^2.
//
// The generic numerator (P + Q*l2) covers both the resonance-pole form
// P/(l2 - C) and the oscillator form Q*l2/(l2 - C) found in published
// coefficient sets. Sellmeier evaluation is band-checked; constant models
// evaluate anywhere.

struct SellmeierTerm {
  double p = 0.0;
  double q = 0.0;
  double c = 0.0;  // pole position, um^2
};

struct IndexModel {
  enum class Kind { Constant, Sellmeier };

  Kind kind = Kind::Constant;
  double n_value = 1.0;                   // constant model
  double a = 0.0;                         // Sellmeier constant term
  double d = 0.0;                         // Sellmeier lambda^2 coefficient
  std::array<SellmeierTerm, 3> terms{};   // unused terms have p = q = 0
  std::string citation;                   // published coefficient set

  static IndexModel constant(double n);
  static IndexModel sellmeier(double a, const std::array<SellmeierTerm, 3>& terms, double d,
                              std::string citation);

  bool is_constant() const { return kind == Kind::Constant; }
};

// Supported band for Sellmeier evaluation (inclusive), chosen to cover the
// pump at 400 nm and the down-converted spectrum around 800 nm.
inline constexpr double kBandLoMeters = 0.4e-6;
inline constexpr double kBandHiMeters = 1.2e-6;

// Index at vacuum wavelength (meters). Sellmeier models throw PhysicsError
// outside the supported band or if the evaluated index leaves (1, 3).
double refractive_index(const IndexModel& model, double wavelength);

// Same model evaluated at angular frequency (rad/s).
double index_at_omega(const IndexModel& model, double omega);

// Published coefficient sets used by the built-in materials.
IndexModel bbo_ordinary();
IndexModel bbo_extraordinary();
IndexModel quartz_ordinary_sellmeier();
IndexModel quartz_extraordinary_sellmeier();

// Constant quartz indices used by the simulation presets.
inline constexpr double kQuartzNo = 1.53773;
inline constexpr double kQuartzNe = 1.54661;
IndexModel quartz_ordinary_constant();
IndexModel quartz_extraordinary_constant();

}  // namespace qoct
