#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qoct/materials.hpp"

namespace qoct {

// Frequency-entangled photon-pair source. The pair is emitted at the exactly
// anticorrelated frequencies omega0 + Omega and omega0 - Omega; the sampled
// grid carries the spectral density of the detuning Omega.

struct SpectralGrid {
  std::vector<double> offsets;   // Omega_k (rad/s), uniform, ascending
  std::vector<double> envelope;  // spectral density at Omega_k, unnormalized
  std::vector<double> weights;   // Simpson coefficient * envelope, normalized to sum 1
  double step = 0.0;

  std::size_t size() const { return offsets.size(); }
};

struct TwinPhotonSource {
  std::string kind;              // "bbo-type2" or "gaussian"
  double omega0 = 0.0;           // degenerate center frequency (rad/s)
  double pump_wavelength = 0.0;  // m (crystal source only)
  double crystal_length = 0.0;   // m (crystal source only)
  double cut_angle = 0.0;        // rad (crystal source only)
  double gaussian_fwhm = 0.0;    // rad/s (gaussian source only)
  IndexModel n_o;                // crystal ordinary axis
  IndexModel n_e;                // crystal extraordinary axis
  SpectralGrid grid;
};

// Extraordinary index at propagation angle theta from the optic axis:
// 1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2.
double extraordinary_index_at_angle(double n_o, double n_e, double theta);

// Collinear wave-vector mismatch for degenerate type-II down-conversion:
// an extraordinary pump at 2*omega0 splits into an extraordinary signal at
// omega0 + Omega and an ordinary idler at omega0 - Omega; the pump and the
// signal see the angle-tuned extraordinary index at the cut angle.
double phase_mismatch(const IndexModel& n_o, const IndexModel& n_e, double cut_angle,
                      double omega0, double detuning);
double phase_mismatch(const TwinPhotonSource& source, double detuning);

// Bisection for the cut angle with phase_mismatch(0) = 0. Throws
// PhysicsError when the bracket holds no sign change (no phase matching) and
// for the dispersionless degenerate case where every angle matches.
double solve_cut_angle(const IndexModel& n_o, const IndexModel& n_e, double omega0);

// Gaussian spectral envelope exp(-4 ln2 Omega^2 / fwhm^2) sampled on the
// given offsets.
std::vector<double> gaussian_spectrum(double fwhm, const std::vector<double>& offsets);

// Grid spanning [-span_below, +span_above] with the source's spectral
// envelope and normalized Simpson weights. The point count is rounded up to
// the next odd value. Edge weights above 1e-4 of the peak mean the grid
// truncates real spectral weight; that raises PhysicsError ("grid too
// narrow").
SpectralGrid sample_spectrum(const TwinPhotonSource& source, std::size_t points,
                             double span_below, double span_above);

// Crystal source with the cut angle solved and the grid spanning the first
// three lobes of the sinc^2 spectrum. The two lobe edges are located
// independently (the type-II mismatch is not symmetric in the detuning), so
// the grid ends at a spectral zero on both sides. span_override (rad/s)
// replaces both spans symmetrically; it is validated against the edge rule.
TwinPhotonSource bbo_type2_source(double pump_wavelength, double crystal_length,
                                  std::size_t points = 4096, double span_override = 0.0);

// Transform-limited Gaussian alternative spanning 3*fwhm on each side.
TwinPhotonSource gaussian_source(double center_wavelength, double fwhm,
                                 std::size_t points = 4096, double span_override = 0.0);

}  // namespace qoct
