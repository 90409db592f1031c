#include "qoct/sample.hpp"

#include <cmath>
#include <stdexcept>

#include "qoct/constants.hpp"
#include "qoct/errors.hpp"

namespace qoct {

void LayeredSample::validate() const {
  if (interfaces.size() != layers.size() + 1) {
    throw ConfigError("a sample needs exactly one more interface than layers");
  }
  for (const auto& layer : layers) {
    if (!(layer.thickness > 0.0)) {
      throw ConfigError("layer thickness must be positive");
    }
  }
  for (const auto& iface : interfaces) {
    if (std::abs(iface.reflectance) > 1.0 + 1e-12) {
      throw ConfigError("interface reflectance magnitude must not exceed 1");
    }
  }
}

DispersionExpansion dispersion_expansion(const Layer& layer, double omega0) {
  DispersionExpansion ex;
  ex.omega0 = omega0;
  if (layer.n_o.is_constant() && layer.n_e.is_constant()) {
    const double navg = 0.5 * (layer.n_o.n_value + layer.n_e.n_value);
    const double dn = layer.n_o.n_value - layer.n_e.n_value;
    ex.beta0 = omega0 * navg / kSpeedOfLight;
    ex.beta1 = navg / kSpeedOfLight;
    ex.beta2 = layer.gvd_inject;
    ex.dbeta0 = omega0 * dn / kSpeedOfLight;
    ex.dbeta1 = dn / kSpeedOfLight;
    return ex;
  }
  const auto beta_avg = [&](double omega) {
    const double navg =
        0.5 * (index_at_omega(layer.n_o, omega) + index_at_omega(layer.n_e, omega));
    return omega * navg / kSpeedOfLight;
  };
  const auto beta_diff = [&](double omega) {
    const double dn = index_at_omega(layer.n_o, omega) - index_at_omega(layer.n_e, omega);
    return omega * dn / kSpeedOfLight;
  };
  const double h = 1e-4 * omega0;
  ex.beta0 = beta_avg(omega0);
  ex.beta1 = (beta_avg(omega0 + h) - beta_avg(omega0 - h)) / (2.0 * h);
  ex.beta2 = (beta_avg(omega0 + h) - 2.0 * ex.beta0 + beta_avg(omega0 - h)) / (h * h) +
             layer.gvd_inject;
  ex.dbeta0 = beta_diff(omega0);
  ex.dbeta1 = (beta_diff(omega0 + h) - beta_diff(omega0 - h)) / (2.0 * h);
  return ex;
}

double layer_retardance(const Layer& layer, double omega) {
  const double dn = index_at_omega(layer.n_o, omega) - index_at_omega(layer.n_e, omega);
  return omega * dn * layer.thickness / kSpeedOfLight;
}

double layer_phase(const Layer& layer, double omega, double omega0) {
  const double navg =
      0.5 * (index_at_omega(layer.n_o, omega) + index_at_omega(layer.n_e, omega));
  const double detuning = omega - omega0;
  return (omega * navg / kSpeedOfLight + 0.5 * layer.gvd_inject * detuning * detuning) *
         layer.thickness;
}

PolarizationMatrix layer_matrix(const Layer& layer, double omega, double omega0) {
  const cplx phase = std::polar(1.0, layer_phase(layer, omega, omega0));
  return phase * wave_plate(layer_retardance(layer, omega), layer.axis_angle);
}

PolarizationMatrix stack_matrix(const LayeredSample& sample, std::size_t m,
                                double omega) {
  PolarizationMatrix product = identity();
  for (std::size_t l = 0; l < m; ++l) {
    // deeper layers multiply from the left: the light meets layer 0 first
    product = wave_plate(layer_retardance(sample.layers[l], omega),
                         sample.layers[l].axis_angle) *
              product;
  }
  return product;
}

double stack_phase(const LayeredSample& sample, std::size_t m, double omega,
                   double omega0) {
  double phase = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    phase += layer_phase(sample.layers[l], omega, omega0);
  }
  return phase;
}

PolarizationMatrix transfer_function(const LayeredSample& sample, double omega,
                                     double omega0) {
  const PolarizationMatrix sigma3 = pauli(3);
  PolarizationMatrix h = zero_matrix();
  PolarizationMatrix stack = identity();
  double phase = 0.0;
  for (std::size_t m = 0; m < sample.interfaces.size(); ++m) {
    if (m > 0) {
      const Layer& layer = sample.layers[m - 1];
      stack = wave_plate(layer_retardance(layer, omega), layer.axis_angle) * stack;
      phase += layer_phase(layer, omega, omega0);
    }
    const cplx amplitude =
        sample.interfaces[m].reflectance * std::polar(1.0, 2.0 * phase);
    h = h + amplitude * (stack * transpose(stack) * sigma3);
  }
  return h;
}

PolarizationVector interface_kernel(const LayeredSample& sample, std::size_t m,
                                    double omega) {
  if (m >= sample.interfaces.size()) {
    throw std::out_of_range("interface index past the back of the sample");
  }
  const PolarizationMatrix q = quarter_wave_45();
  const PolarizationMatrix stack = stack_matrix(sample, m, omega);
  const PolarizationMatrix round_trip = stack * transpose(stack) * pauli(3);
  return apply(q * round_trip * dagger(q), basis_s());
}

PolarizationMatrix sample_arm_operator(const LayeredSample& sample, double omega,
                                       double omega0) {
  const PolarizationMatrix q = quarter_wave_45();
  return q * transfer_function(sample, omega, omega0) * dagger(q);
}

PolarizationVector sample_arm_state(const LayeredSample& sample, double omega,
                                    double omega0) {
  return apply(sample_arm_operator(sample, omega, omega0), basis_s());
}

bool layers_coaligned(const LayeredSample& sample, double tol) {
  if (sample.layers.size() < 2) {
    return true;
  }
  const double half_pi = 0.5 * kPi;
  const double first = std::remainder(sample.layers.front().axis_angle, half_pi);
  for (const auto& layer : sample.layers) {
    const double folded = std::remainder(layer.axis_angle, half_pi);
    if (std::abs(std::remainder(folded - first, half_pi)) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace qoct
