#pragma once

#include <cstddef>
#include <vector>

#include "qoct/jones.hpp"
#include "qoct/sample.hpp"
#include "qoct/spdc.hpp"

namespace qoct {

// Reference arm: either a single polarization rotator at theta, or the
// cascade of a half-wave plate at theta followed by a rotator by phi - theta
// realized as wave plates. Both are lossless, so the reference state is a
// unit vector for every setting.
struct ReferenceArm {
  double theta = 0.0;
  double phi = 0.0;
  bool rotator_mode = false;

  static ReferenceArm rotator(double theta);
  static ReferenceArm cascade(double theta, double phi);
};

PolarizationMatrix reference_operator(const ReferenceArm& arm);
PolarizationVector reference_state(const ReferenceArm& arm);

// Projection of the reference state onto the round-trip kernel of interface
// m: F_m(omega) = <U2 e_i, u_m(omega)>. |F_m| <= 1; for the plain rotator
// F_0 = cos(2 theta) and a single layer gives
// F_1 = cos(delta) cos(2 theta) + sin(delta) sin(2 theta) e^{2i alpha}.
cplx sample_projection(const LayeredSample& sample, const ReferenceArm& arm,
                       std::size_t m, double omega);

struct BeamSplitter {
  double reflect_power = 0.5;  // |r|^2, in (0, 1)

  // 2 |r t|^2 / (|r|^4 + |t|^4); 1 when balanced.
  double visibility() const;
  void validate() const;
  static BeamSplitter balanced() { return BeamSplitter{0.5}; }
};

// Coincidence-rate scan against the reported depth axis. The depth column is
// the single-pass optical path c*tau/2 in meters (tau is the physical arm
// delay), so an interface behind group optical path n*z dips at depth n*z.
struct Interferogram {
  std::vector<double> depth_m;
  std::vector<double> r_h;  // theta = 0 rotator arm, normalized
  std::vector<double> r_v;  // theta = pi/4 rotator arm, normalized
  std::vector<double> r_t;  // r_h + r_v - 1
  double lambda0_h = 0.0;
  double lambda0_v = 0.0;
  std::size_t clip_count = 0;  // negative normalized rates clipped to 0
  bool empty_sample = false;   // no interfaces reflect; all traces forced to 0
};

// Precomputes the frequency-resolved sample-arm states once per sample and
// source, then evaluates rates at arbitrary delays.
class Engine {
 public:
  Engine(const LayeredSample& sample, const TwinPhotonSource& source);

  const LayeredSample& sample() const { return sample_; }
  const TwinPhotonSource& source() const { return source_; }

  // Delay-independent rate offset: the weighted power of the sample-arm
  // state at omega0 + Omega. Arm-independent because the reference arm is
  // lossless.
  double lambda_constant() const { return lambda0_; }

  // Weighted cross matrix G(s), with G_ab = sum_k w_k v+_a conj(v-_b)
  // exp(-i Omega_k s). Its trace against the arm gives the varying term.
  PolarizationMatrix delay_kernel(double s) const;

  // Per-frequency integrand factors w_k * F+ * conj(F-) for one arm; the
  // varying term at kernel argument s is their sum against e^{-i Omega_k s}.
  std::vector<cplx> spectral_products(const ReferenceArm& arm) const;

  // Varying term at kernel argument s (the interferometric term oscillates
  // in twice the arm delay, so callers pass s = 2*tau).
  cplx lambda_varying(const ReferenceArm& arm, double s) const;

  // Coincidence rate lambda0 - V * Re lambda(2 tau) at physical arm delay
  // tau, unnormalized, clipped at zero (quadrature noise must not produce a
  // negative rate).
  double coincidence_rate(const ReferenceArm& arm, const BeamSplitter& bs,
                          double tau) const;

 private:
  LayeredSample sample_;
  TwinPhotonSource source_;
  std::vector<PolarizationVector> v_plus_;   // per grid point
  std::vector<PolarizationVector> v_minus_;
  double lambda0_ = 0.0;
};

struct ScanResult {
  std::vector<double> depth_m;
  std::vector<double> rate;  // normalized to lambda_constant
  std::size_t clip_count = 0;
};

// Rate scan for one arm over uniformly spaced depths. parallel toggles the
// OpenMP path; both paths run the identical per-point code, so the outputs
// are bitwise equal.
ScanResult scan_arm(const Engine& engine, const ReferenceArm& arm,
                    const BeamSplitter& bs, double depth_start, double depth_stop,
                    std::size_t depth_points, bool parallel = true);

// Full protocol: H and V rotator arms share each delay point's phase table,
// and the combined trace r_t = r_h + r_v - 1 cancels the birefringent
// carrier.
Interferogram scan(const Engine& engine, const BeamSplitter& bs,
                   double depth_start, double depth_stop,
                   std::size_t depth_points, bool parallel = true);

// Closed-form varying term for a front surface plus one buried interface
// under a single constant-index layer, from the layer's Taylor data. Checks
// the topology and throws std::invalid_argument on anything else. Oracle for
// the engine, exact for constant-index layers.
cplx closed_form_two_layer(const LayeredSample& sample,
                           const TwinPhotonSource& source,
                           const ReferenceArm& arm, double s);

}  // namespace qoct
