#pragma once

#include <cstddef>
#include <vector>

#include "qoct/jones.hpp"
#include "qoct/materials.hpp"

namespace qoct {

// Layered birefringent sample probed in reflection. Interface m sits behind
// layers 0..m-1; interface 0 is the front surface. A sample always has one
// more interface than layers. Reflection at an interface is the isotropic
// r_m * sigma3; no Fresnel computation is attempted, r_m is given.

struct Layer {
  double thickness = 0.0;   // m, must be > 0
  double axis_angle = 0.0;  // fast-axis orientation (rad)
  IndexModel n_o;
  IndexModel n_e;
  double gvd_inject = 0.0;  // extra group-velocity dispersion (s^2/m), both axes
};

struct Interface {
  cplx reflectance{0.0, 0.0};  // |r| <= 1
};

struct LayeredSample {
  std::vector<Interface> interfaces;
  std::vector<Layer> layers;

  // interfaces.size() == layers.size() + 1, every thickness positive,
  // every |r| <= 1. Throws ConfigError on violation.
  void validate() const;
};

// Taylor data for one layer's average propagation constant around omega0:
// beta(omega) ~ beta0 + beta1*(omega - omega0) + (beta2/2)*(omega - omega0)^2,
// plus the birefringent split dbeta0 + dbeta1*(omega - omega0) between the
// two axes (sign convention: ordinary minus extraordinary). Constant-index
// layers give beta1 = navg/c exactly and beta2 equal to the injected
// dispersion; Sellmeier layers are differentiated by central differences
// with step 1e-4 * omega0.
struct DispersionExpansion {
  double omega0 = 0.0;
  double beta0 = 0.0;   // rad/m
  double beta1 = 0.0;   // s/m
  double beta2 = 0.0;   // s^2/m
  double dbeta0 = 0.0;  // rad/m
  double dbeta1 = 0.0;  // s/m
};

DispersionExpansion dispersion_expansion(const Layer& layer, double omega0);

// Single-pass retardance delta(omega) = omega * (n_o - n_e) * d / c. The
// injected dispersion is common to both axes and does not enter.
double layer_retardance(const Layer& layer, double omega);

// Common propagation phase Delta(omega) = [omega * navg(omega) / c
// + (gvd/2) * (omega - omega0)^2] * d.
double layer_phase(const Layer& layer, double omega, double omega0);

// Full one-way Jones matrix of the layer: e^{i Delta} times the retarder
// with the layer's axis angle. Unitary; diagonal when the axis is
// horizontal.
PolarizationMatrix layer_matrix(const Layer& layer, double omega, double omega0);

// Birefringence-only product from the surface down to interface m (identity
// for m = 0): the ordered retarder factors without their common phases.
PolarizationMatrix stack_matrix(const LayeredSample& sample, std::size_t m,
                                double omega);

// Phase accumulated over layers 0..m-1.
double stack_phase(const LayeredSample& sample, std::size_t m, double omega,
                   double omega0);

// Round-trip reflection operator of the whole stack. The echo from interface
// m traverses the stack, reflects with r_m * sigma3, and returns through the
// same layers with their axis angles negated; the return product equals
// sigma3 * B^T * sigma3, so each term collapses to r_m * B * B^T * sigma3
// times the doubled propagation phase.
PolarizationMatrix transfer_function(const LayeredSample& sample, double omega,
                                     double omega0);

// Per-interface polarization kernel: the round-trip birefringence of
// interface m conjugated by the quarter-wave plate and applied to the
// horizontal input, without the propagation phase and without r_m. Always a
// unit vector. Throws std::out_of_range for m past the last interface.
PolarizationVector interface_kernel(const LayeredSample& sample, std::size_t m,
                                    double omega);

// Transfer operator seen from the circular frame: Q H(omega) Q^dagger, and
// its action on the horizontal input e_s.
PolarizationMatrix sample_arm_operator(const LayeredSample& sample, double omega,
                                       double omega0);
PolarizationVector sample_arm_state(const LayeredSample& sample, double omega,
                                    double omega0);

// True when every layer shares one axis orientation (mod pi/2), which makes
// the retarder factors commute; other stacks are flagged in the scan
// sidecar because the printed product order then matters.
bool layers_coaligned(const LayeredSample& sample, double tol = 1e-12);

}  // namespace qoct
