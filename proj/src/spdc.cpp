#include "qoct/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "qoct/quadrature.hpp"

namespace qoct {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

// half argument of the sinc: Delta k_z(Omega) * L / 2
double sinc_argument(const TwinPhotonSource& source, double detuning) {
  return 0.5 * phase_mismatch(source, detuning) * source.crystal_length;
}

// detuning at which |Delta k_z * L / 2| reaches the n-th multiple of pi on
// one side of zero; the sinc envelope vanishes there
double nth_sinc_zero(const TwinPhotonSource& source, double sign, int n) {
  const double target = n * kPi;
  double hi = 1e12;
  while (std::abs(sinc_argument(source, sign * hi)) < target) {
    hi *= 1.5;
    if (hi > 1e16) {
      throw PhysicsError("spectral envelope has no zero inside the index band");
    }
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(sinc_argument(source, sign * mid)) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> crystal_spectrum(const TwinPhotonSource& source,
                                     const std::vector<double>& offsets) {
  std::vector<double> envelope(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const double amplitude = source.crystal_length * sinc(sinc_argument(source, offsets[k]));
    envelope[k] = amplitude * amplitude;
  }
  return envelope;
}

}  // namespace

double extraordinary_index_at_angle(double n_o, double n_e, double theta) {
  const double co = std::cos(theta);
  const double si = std::sin(theta);
  const double inv2 = co * co / (n_o * n_o) + si * si / (n_e * n_e);
  return 1.0 / std::sqrt(inv2);
}

double phase_mismatch(const IndexModel& n_o, const IndexModel& n_e, double cut_angle,
                      double omega0, double detuning) {
  const double omega_p = 2.0 * omega0;
  const double omega_s = omega0 + detuning;
  const double omega_i = omega0 - detuning;
  const double n_pump =
      extraordinary_index_at_angle(index_at_omega(n_o, omega_p),
                                   index_at_omega(n_e, omega_p), cut_angle);
  const double n_signal =
      extraordinary_index_at_angle(index_at_omega(n_o, omega_s),
                                   index_at_omega(n_e, omega_s), cut_angle);
  const double n_idler = index_at_omega(n_o, omega_i);
  return (omega_p * n_pump - omega_s * n_signal - omega_i * n_idler) / kSpeedOfLight;
}

double phase_mismatch(const TwinPhotonSource& source, double detuning) {
  return phase_mismatch(source.n_o, source.n_e, source.cut_angle, source.omega0,
                        detuning);
}

double solve_cut_angle(const IndexModel& n_o, const IndexModel& n_e, double omega0) {
  const auto mismatch = [&](double theta) {
    return phase_mismatch(n_o, n_e, theta, omega0, 0.0);
  };
  double lo = 1e-6;
  double hi = 0.5 * kPi - 1e-6;
  const double f_lo = mismatch(lo);
  const double f_hi = mismatch(hi);
  const double scale = std::max(std::abs(f_lo), std::abs(f_hi));
  if (scale < 1e-12) {
    throw PhysicsError("phase matching is degenerate: every cut angle is a root");
  }
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw PhysicsError("no phase-matching cut angle in (0, pi/2)");
  }
  const bool lo_positive = f_lo > 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mismatch(mid);
    if (f_mid == 0.0) {
      return mid;
    }
    if ((f_mid > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> gaussian_spectrum(double fwhm, const std::vector<double>& offsets) {
  if (!(fwhm > 0.0)) {
    throw ConfigError("gaussian spectrum needs a positive width");
  }
  const double scale = 4.0 * std::log(2.0) / (fwhm * fwhm);
  std::vector<double> envelope(offsets.size());
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    envelope[k] = std::exp(-scale * offsets[k] * offsets[k]);
  }
  return envelope;
}

SpectralGrid sample_spectrum(const TwinPhotonSource& source, std::size_t points,
                             double span_below, double span_above) {
  if (!(span_below > 0.0) || !(span_above > 0.0)) {
    throw ConfigError("spectral spans must be positive");
  }
  if (points < 3) {
    throw ConfigError("spectral grid needs at least 3 points");
  }
  if (points % 2 == 0) {
    ++points;
  }
  SpectralGrid grid;
  grid.step = (span_above + span_below) / static_cast<double>(points - 1);
  grid.offsets.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid.offsets[k] = -span_below + grid.step * static_cast<double>(k);
  }

  if (source.kind == "bbo-type2") {
    grid.envelope = crystal_spectrum(source, grid.offsets);
  } else if (source.kind == "gaussian") {
    grid.envelope = gaussian_spectrum(source.gaussian_fwhm, grid.offsets);
  } else {
    throw ConfigError("unknown source kind: " + source.kind);
  }

  const double peak = *std::max_element(grid.envelope.begin(), grid.envelope.end());
  if (!(peak > 0.0)) {
    throw PhysicsError("spectral envelope vanishes on the whole grid");
  }
  if (grid.envelope.front() > 1e-4 * peak || grid.envelope.back() > 1e-4 * peak) {
    throw PhysicsError("grid too narrow: spectral weight remains at the grid edges");
  }

  grid.weights = simpson_coefficients(points, grid.step);
  double total = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    grid.weights[k] *= grid.envelope[k];
    total += grid.weights[k];
  }
  for (auto& w : grid.weights) {
    w /= total;
  }
  return grid;
}

TwinPhotonSource bbo_type2_source(double pump_wavelength, double crystal_length,
                                  std::size_t points, double span_override) {
  if (!(pump_wavelength > 0.0) || !(crystal_length > 0.0)) {
    throw ConfigError("pump wavelength and crystal length must be positive");
  }
  TwinPhotonSource source;
  source.kind = "bbo-type2";
  source.pump_wavelength = pump_wavelength;
  source.crystal_length = crystal_length;
  source.omega0 = kPi * kSpeedOfLight / pump_wavelength;  // half the pump frequency
  source.n_o = bbo_ordinary();
  source.n_e = bbo_extraordinary();
  source.cut_angle = solve_cut_angle(source.n_o, source.n_e, source.omega0);
  if (span_override > 0.0) {
    source.grid = sample_spectrum(source, points, span_override, span_override);
    return source;
  }
  // the type-II mismatch is not symmetric in the detuning, so the two edges
  // are placed independently on that side's third spectral zero
  const double below = nth_sinc_zero(source, -1.0, 3);
  const double above = nth_sinc_zero(source, +1.0, 3);
  source.grid = sample_spectrum(source, points, below, above);
  return source;
}

TwinPhotonSource gaussian_source(double center_wavelength, double fwhm,
                                 std::size_t points, double span_override) {
  if (!(center_wavelength > 0.0)) {
    throw ConfigError("center wavelength must be positive");
  }
  if (!(fwhm > 0.0)) {
    throw ConfigError("gaussian source needs a positive spectral width");
  }
  TwinPhotonSource source;
  source.kind = "gaussian";
  source.omega0 = 2.0 * kPi * kSpeedOfLight / center_wavelength;
  source.gaussian_fwhm = fwhm;
  const double span = span_override > 0.0 ? span_override : 3.0 * fwhm;
  source.grid = sample_spectrum(source, points, span, span);
  return source;
}

}  // namespace qoct
