#include "qoct/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "thread_cap.hpp"

namespace qoct {

namespace {

void check_scan_window(double depth_start, double depth_stop, std::size_t depth_points) {
  if (depth_points < 2) {
    throw ConfigError("scan needs at least two delay points");
  }
  if (!(depth_stop > depth_start)) {
    throw ConfigError("scan stop depth must exceed the start depth");
  }
}

}  // namespace

ReferenceArm ReferenceArm::rotator(double theta) { return {theta, 2.0 * theta, true}; }

ReferenceArm ReferenceArm::cascade(double theta, double phi) { return {theta, phi, false}; }

PolarizationVector reference_state(const ReferenceArm& arm) {
  const double phi = arm.rotator_mode ? 2.0 * arm.theta : arm.phi;
  const cplx pre = std::polar(std::sqrt(0.5), 0.25 * kPi);
  const double two_theta = 2.0 * arm.theta;
  const double two_rel = 2.0 * (phi - arm.theta);
  return {pre * cplx{std::sin(two_theta), std::sin(two_rel)},
          pre * cplx{std::cos(two_theta), std::cos(two_rel)}};
}

PolarizationMatrix reference_operator(const ReferenceArm& arm) {
  const PolarizationVector w = reference_state(arm);
  return {std::conj(w.v1), w.v0, -std::conj(w.v0), w.v1};
}

cplx sample_projection(const LayeredSample& sample, const ReferenceArm& arm, std::size_t m,
                       double omega) {
  return inner(reference_state(arm), interface_kernel(sample, m, omega));
}

double BeamSplitter::visibility() const {
  const double r2 = reflect_power;
  const double t2 = 1.0 - reflect_power;
  return 2.0 * r2 * t2 / (r2 * r2 + t2 * t2);
}

void BeamSplitter::validate() const {
  if (!(reflect_power > 0.0) || !(reflect_power < 1.0)) {
    throw ConfigError("beam splitter reflectance fraction must lie strictly between 0 and 1");
  }
}

Engine::Engine(const LayeredSample& sample, const TwinPhotonSource& source)
    : sample_(sample), source_(source) {
  sample_.validate();
  const std::size_t n = source_.grid.size();
  if (n == 0) {
    throw ConfigError("source carries no sampled spectrum");
  }
  v_plus_.resize(n);
  v_minus_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double offset = source_.grid.offsets[k];
    v_plus_[k] = sample_arm_state(sample_, source_.omega0 + offset, source_.omega0);
    v_minus_[k] = sample_arm_state(sample_, source_.omega0 - offset, source_.omega0);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += source_.grid.weights[k] * (std::norm(v_plus_[k].v0) + std::norm(v_plus_[k].v1));
  }
  lambda0_ = acc;
}

PolarizationMatrix Engine::delay_kernel(double s) const {
  PolarizationMatrix g = zero_matrix();
  for (std::size_t k = 0; k < v_plus_.size(); ++k) {
    const cplx rot = std::polar(source_.grid.weights[k], -source_.grid.offsets[k] * s);
    const PolarizationVector& vp = v_plus_[k];
    const cplx cm0 = std::conj(v_minus_[k].v0);
    const cplx cm1 = std::conj(v_minus_[k].v1);
    g.m00 += rot * vp.v0 * cm0;
    g.m01 += rot * vp.v0 * cm1;
    g.m10 += rot * vp.v1 * cm0;
    g.m11 += rot * vp.v1 * cm1;
  }
  return g;
}

std::vector<cplx> Engine::spectral_products(const ReferenceArm& arm) const {
  const PolarizationVector w = reference_state(arm);
  std::vector<cplx> products(v_plus_.size());
  for (std::size_t k = 0; k < v_plus_.size(); ++k) {
    const cplx f_plus = inner(w, v_plus_[k]);
    const cplx f_minus = inner(w, v_minus_[k]);
    products[k] = source_.grid.weights[k] * f_plus * std::conj(f_minus);
  }
  return products;
}

cplx Engine::lambda_varying(const ReferenceArm& arm, double s) const {
  const std::vector<cplx> products = spectral_products(arm);
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < products.size(); ++k) {
    acc += products[k] * std::polar(1.0, -source_.grid.offsets[k] * s);
  }
  return acc;
}

double Engine::coincidence_rate(const ReferenceArm& arm, const BeamSplitter& bs,
                                double tau) const {
  bs.validate();
  const double raw = lambda0_ - bs.visibility() * lambda_varying(arm, 2.0 * tau).real();
  return std::max(raw, 0.0);
}

ScanResult scan_arm(const Engine& engine, const ReferenceArm& arm, const BeamSplitter& bs,
                    double depth_start, double depth_stop, std::size_t depth_points,
                    bool parallel) {
  bs.validate();
  check_scan_window(depth_start, depth_stop, depth_points);
#ifndef _OPENMP
  (void)parallel;
#endif

  ScanResult out;
  out.depth_m.resize(depth_points);
  out.rate.resize(depth_points);
  const double step = (depth_stop - depth_start) / static_cast<double>(depth_points - 1);
  const double lambda0 = engine.lambda_constant();
  if (lambda0 <= 0.0) {
    for (std::size_t j = 0; j < depth_points; ++j) {
      out.depth_m[j] = depth_start + step * static_cast<double>(j);
      out.rate[j] = 0.0;
    }
    return out;
  }

  const std::vector<cplx> products = engine.spectral_products(arm);
  const std::vector<double>& offsets = engine.source().grid.offsets;
  const double vis = bs.visibility();
  std::vector<unsigned char> clipped(depth_points, 0);
  const long long total = static_cast<long long>(depth_points);

#ifdef _OPENMP
#pragma omp parallel for if (parallel) schedule(static) num_threads(detail::worker_count())
#endif
  for (long long j = 0; j < total; ++j) {
    const double depth = depth_start + step * static_cast<double>(j);
    const double s = 4.0 * depth / kSpeedOfLight;
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < products.size(); ++k) {
      acc += products[k] * std::polar(1.0, -offsets[k] * s);
    }
    double rate = 1.0 - vis * acc.real() / lambda0;
    if (rate < 0.0) {
      if (rate < -1e-9) {
        clipped[static_cast<std::size_t>(j)] = 1;
      }
      rate = 0.0;
    }
    out.depth_m[static_cast<std::size_t>(j)] = depth;
    out.rate[static_cast<std::size_t>(j)] = rate;
  }

  out.clip_count = 0;
  for (std::size_t j = 0; j < depth_points; ++j) {
    out.clip_count += clipped[j];
  }
  return out;
}

Interferogram scan(const Engine& engine, const BeamSplitter& bs, double depth_start,
                   double depth_stop, std::size_t depth_points, bool parallel) {
  bs.validate();
  check_scan_window(depth_start, depth_stop, depth_points);
#ifndef _OPENMP
  (void)parallel;
#endif

  Interferogram ig;
  ig.depth_m.resize(depth_points);
  ig.r_h.resize(depth_points);
  ig.r_v.resize(depth_points);
  ig.r_t.resize(depth_points);
  const double lambda0 = engine.lambda_constant();
  ig.lambda0_h = lambda0;
  ig.lambda0_v = lambda0;
  const double step = (depth_stop - depth_start) / static_cast<double>(depth_points - 1);

  if (lambda0 <= 0.0) {
    ig.empty_sample = true;
    for (std::size_t j = 0; j < depth_points; ++j) {
      ig.depth_m[j] = depth_start + step * static_cast<double>(j);
      ig.r_h[j] = 0.0;
      ig.r_v[j] = 0.0;
      ig.r_t[j] = 0.0;
    }
    return ig;
  }

  const std::vector<cplx> ph = engine.spectral_products(ReferenceArm::rotator(0.0));
  const std::vector<cplx> pv = engine.spectral_products(ReferenceArm::rotator(0.25 * kPi));
  const std::vector<double>& offsets = engine.source().grid.offsets;
  const double vis = bs.visibility();
  std::vector<unsigned char> clips(depth_points, 0);
  const long long total = static_cast<long long>(depth_points);

#ifdef _OPENMP
#pragma omp parallel for if (parallel) schedule(static) num_threads(detail::worker_count())
#endif
  for (long long j = 0; j < total; ++j) {
    const double depth = depth_start + step * static_cast<double>(j);
    const double s = 4.0 * depth / kSpeedOfLight;
    cplx acc_h{0.0, 0.0};
    cplx acc_v{0.0, 0.0};
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const cplx rot = std::polar(1.0, -offsets[k] * s);
      acc_h += ph[k] * rot;
      acc_v += pv[k] * rot;
    }
    double rh = 1.0 - vis * acc_h.real() / lambda0;
    double rv = 1.0 - vis * acc_v.real() / lambda0;
    double rt = rh + rv - 1.0;
    unsigned char clip = 0;
    if (rh < 0.0) {
      if (rh < -1e-9) {
        ++clip;
      }
      rh = 0.0;
    }
    if (rv < 0.0) {
      if (rv < -1e-9) {
        ++clip;
      }
      rv = 0.0;
    }
    if (rt < 0.0) {
      if (rt < -1e-9) {
        ++clip;
      }
      rt = 0.0;
    }
    const std::size_t idx = static_cast<std::size_t>(j);
    ig.depth_m[idx] = depth;
    ig.r_h[idx] = rh;
    ig.r_v[idx] = rv;
    ig.r_t[idx] = rt;
    clips[idx] = clip;
  }

  ig.clip_count = 0;
  for (std::size_t j = 0; j < depth_points; ++j) {
    ig.clip_count += clips[j];
  }
  return ig;
}

cplx closed_form_two_layer(const LayeredSample& sample, const TwinPhotonSource& source,
                           const ReferenceArm& arm, double s) {
  if (sample.interfaces.size() != 2 || sample.layers.size() != 1) {
    throw std::invalid_argument("closed form covers exactly two interfaces around one layer");
  }
  const Layer& layer = sample.layers.front();
  if (!layer.n_o.is_constant() || !layer.n_e.is_constant()) {
    throw std::invalid_argument("closed form assumes frequency independent indices");
  }

  const DispersionExpansion ex = dispersion_expansion(layer, source.omega0);
  const double z = layer.thickness;
  const cplx r0 = sample.interfaces[0].reflectance;
  const cplx r1 = sample.interfaces[1].reflectance;
  const PolarizationVector w = reference_state(arm);
  const cplx cw1 = std::conj(w.v0);
  const cplx cw2 = std::conj(w.v1);
  const cplx e2ia = std::polar(1.0, 2.0 * layer.axis_angle);
  const cplx f0 = kImag * r0 * cw2;

  cplx sum_bare{0.0, 0.0};
  cplx t11{0.0, 0.0};
  cplx t10{0.0, 0.0};
  cplx t01{0.0, 0.0};
  for (std::size_t k = 0; k < source.grid.size(); ++k) {
    const double om = source.grid.offsets[k];
    const double wk = source.grid.weights[k];
    const double ret_plus = (ex.dbeta0 + ex.dbeta1 * om) * z;
    const double ret_minus = (ex.dbeta0 - ex.dbeta1 * om) * z;
    const cplx f1p = kImag * r1 * (cw1 * std::sin(ret_plus) * e2ia + cw2 * std::cos(ret_plus));
    const cplx f1m = kImag * r1 * (cw1 * std::sin(ret_minus) * e2ia + cw2 * std::cos(ret_minus));
    sum_bare += wk * std::polar(1.0, -om * s);
    t11 += wk * f1p * std::conj(f1m) * std::polar(1.0, -om * (s - 4.0 * ex.beta1 * z));
    const double quad = ex.beta2 * z * om * om;
    const cplx shifted = std::polar(1.0, -om * (s - 2.0 * ex.beta1 * z));
    t10 += wk * f1p * std::conj(f0) * std::polar(1.0, quad) * shifted;
    t01 += wk * f0 * std::conj(f1m) * std::polar(1.0, -quad) * shifted;
  }

  const cplx bulk = std::polar(1.0, 2.0 * ex.beta0 * z);
  return std::norm(f0) * sum_bare + t11 + bulk * t10 + std::conj(bulk) * t01;
}

}  // namespace qoct
