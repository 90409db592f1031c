#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "qoct/interferometer.hpp"

namespace qoct {

// Inverse analysis: dips in the combined trace locate interfaces, rate
// ratios and the null geometry of the reference arm recover retardance and
// axis orientation.

enum class FeatureKind { InterfaceDip, Midpoint };

struct DipFeature {
  double position = 0.0;  // depth (m), parabolic-refined
  double extremum = 0.0;  // refined r_t value at the feature
  double depth = 0.0;     // 1 - extremum for dips, extremum - 1 for peaks
  double fwhm = 0.0;      // NaN when a half-crossing leaves the window
  bool is_peak = false;
  FeatureKind kind = FeatureKind::InterfaceDip;
};

// Local extrema of r_t that clear the prominence threshold: minima below
// 1 - prominence and maxima above 1 + prominence. Maxima are always the
// cross echo between two interfaces and are tagged Midpoint; a minimum is
// tagged Midpoint too when it sits within one grid step of the mean
// position of a flanking pair of minima (the cross echo can invert).
std::vector<DipFeature> find_dips(const Interferogram& ig,
                                  double prominence = 0.05);

// Retardance from the dip rates of the two rotator arms:
// delta = atan2(sqrt(lambda_V), sqrt(lambda_H)), principal in [0, pi/2].
// Throws DegenerateError when both rates vanish.
double delta_from_ratio(double lambda_v, double lambda_h);

// Candidate total retardances {k*pi +/- principal} up to max_winding, sorted
// ascending, negatives dropped.
std::vector<double> delta_branches(double principal, int max_winding = 3);

struct NullResult {
  double theta = 0.0;
  double phi = 0.0;
  double rate = 0.0;  // normalized rate at the null (maximal R)
};

// Reference-arm setting (theta, phi) maximizing the normalized rate at fixed
// delay tau_star: coarse grid over [0, pi)^2, then Newton on the numeric
// gradient with a golden-section fallback. Flat landscapes raise
// DegenerateError.
NullResult null_search(const Engine& engine, const BeamSplitter& bs,
                       double tau_star, double coarse_step = 0.0174532925199433);

// Exact retardance from the null geometry:
// delta = atan2(hypot(cos 2theta*, cos 2(phi*-theta*)),
//               hypot(sin 2theta*, sin 2(phi*-theta*))), in [0, pi/2].
double retardance_from_null(double theta_star, double phi_star);

// Axis angle from the null geometry and a retardance estimate, mod pi.
// Throws DegenerateError when the geometry leaves the angle indeterminate
// (retardance near 0 or pi, or delta passed as pi/2 with a vanishing
// cosine system).
double alpha_from_null(double theta_star, double phi_star, double delta);

// Residuals of the two null conditions under (delta, alpha); near zero when
// the parameters solve the geometry jointly.
std::vector<double> null_residuals(double theta_star, double phi_star,
                                   double delta, double alpha);

// Golden-section refinement of a dip's delay: maximizes the Frobenius power
// of the delay kernel (arm-independent envelope) inside [tau_lo, tau_hi].
double refine_dip_delay(const Engine& engine, double tau_lo, double tau_hi);

struct LayerSummary {
  double position = 0.0;       // dip depth coordinate (m)
  double separation = 0.0;     // optical path to the previous dip (m), 0 for the first
  double reflectance_sq = 0.0; // dip depth relative to the first dip
};

// Full protocol report. layer_report fills the structural part; the nulling
// pipeline fills the angle block. Absent values stay NaN.
struct ExtractionReport {
  std::vector<LayerSummary> layers;
  std::size_t dips_found = 0;
  std::size_t midpoints_found = 0;
  // first dip depth over second, NaN if < 2 dips
  double reflectance_ratio = std::numeric_limits<double>::quiet_NaN();
  double lambda0_h = 0.0;
  double lambda0_v = 0.0;
  // joint null-geometry estimate, [0, pi/2]
  double delta_est = std::numeric_limits<double>::quiet_NaN();
  // rate-ratio estimate
  double delta_ratio = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> delta_preimages;
  double alpha_est = std::numeric_limits<double>::quiet_NaN();  // [0, pi)
  double theta_star = std::numeric_limits<double>::quiet_NaN();
  double phi_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> residuals;
};

// Structural summary of a scan: interface dips in depth order with optical
// separations and relative reflectance estimates. The separations are
// single-pass group optical path; for constant-index layers that equals the
// plain optical path n*z.
ExtractionReport layer_report(const std::vector<DipFeature>& features,
                              double lambda0_h, double lambda0_v);

}  // namespace qoct
