#include "qoct/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qoct/constants.hpp"
#include "qoct/errors.hpp"
#include "thread_cap.hpp"

namespace qoct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// half-maximum crossing on one side of an extremum, linearly interpolated;
// NaN when the trace leaves the window before crossing
double half_crossing(const std::vector<double>& x, const std::vector<double>& y, std::size_t j,
                     double level, bool peak, int dir) {
  std::size_t k = j;
  while (true) {
    if ((dir < 0 && k == 0) || (dir > 0 && k + 1 == y.size())) {
      return kNaN;
    }
    const std::size_t n = dir < 0 ? k - 1 : k + 1;
    const bool crossed = peak ? (y[n] < level) : (y[n] > level);
    if (crossed) {
      const double t = (level - y[k]) / (y[n] - y[k]);
      return x[k] + t * (x[n] - x[k]);
    }
    k = n;
  }
}

struct NullGeometry {
  double c2t;
  double s2t;
  double c2f;
  double s2f;
};

NullGeometry null_geometry(double theta_star, double phi_star) {
  const double rel = phi_star - theta_star;
  return {std::cos(2.0 * theta_star), std::sin(2.0 * theta_star), std::cos(2.0 * rel),
          std::sin(2.0 * rel)};
}

// golden-section maximizer of f on [lo, hi] to an absolute bracket below tol
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double c1 = b - ratio * (b - a);
  double c2 = a + ratio * (b - a);
  double f1 = f(c1);
  double f2 = f(c2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + ratio * (b - a);
      f2 = f(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - ratio * (b - a);
      f1 = f(c1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<DipFeature> find_dips(const Interferogram& ig, double prominence) {
  if (!(prominence > 0.0) || !(prominence < 1.0)) {
    throw ConfigError("prominence threshold must lie strictly between 0 and 1");
  }
  std::vector<DipFeature> out;
  const std::vector<double>& x = ig.depth_m;
  const std::vector<double>& y = ig.r_t;
  if (y.size() < 3 || x.size() != y.size()) {
    return out;
  }
  const double step = x[1] - x[0];

  for (std::size_t j = 1; j + 1 < y.size(); ++j) {
    const bool is_min = y[j] < y[j - 1] && y[j] <= y[j + 1] && y[j] < 1.0 - prominence;
    const bool is_max = y[j] > y[j - 1] && y[j] >= y[j + 1] && y[j] > 1.0 + prominence;
    if (!is_min && !is_max) {
      continue;
    }
    const double ym = y[j - 1];
    const double y0 = y[j];
    const double yp = y[j + 1];
    const double denom = ym - 2.0 * y0 + yp;
    double off = 0.0;
    if (std::abs(denom) > 1e-300) {
      off = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    }
    DipFeature f;
    f.position = x[j] + off * step;
    f.extremum = y0 - 0.25 * (ym - yp) * off;
    f.is_peak = is_max;
    f.depth = is_max ? f.extremum - 1.0 : 1.0 - f.extremum;
    const double level = 0.5 * (1.0 + f.extremum);
    const double left = half_crossing(x, y, j, level, is_max, -1);
    const double right = half_crossing(x, y, j, level, is_max, +1);
    f.fwhm = (std::isnan(left) || std::isnan(right)) ? kNaN : right - left;
    out.push_back(f);
  }

  std::vector<double> dip_positions;
  for (const DipFeature& f : out) {
    if (!f.is_peak) {
      dip_positions.push_back(f.position);
    }
  }
  for (DipFeature& f : out) {
    if (f.is_peak) {
      f.kind = FeatureKind::Midpoint;
      continue;
    }
    f.kind = FeatureKind::InterfaceDip;
    for (std::size_t a = 0; a < dip_positions.size() && f.kind == FeatureKind::InterfaceDip;
         ++a) {
      for (std::size_t b = a + 1; b < dip_positions.size(); ++b) {
        const double lo = std::min(dip_positions[a], dip_positions[b]);
        const double hi = std::max(dip_positions[a], dip_positions[b]);
        if (f.position <= lo || f.position >= hi) {
          continue;
        }
        if (std::abs(f.position - 0.5 * (lo + hi)) <= step) {
          f.kind = FeatureKind::Midpoint;
          break;
        }
      }
    }
  }
  return out;
}

double delta_from_ratio(double lambda_v, double lambda_h) {
  const double lv = std::max(lambda_v, 0.0);
  const double lh = std::max(lambda_h, 0.0);
  if (lv + lh < 1e-12) {
    throw DegenerateError("both arm dip rates vanish; the retardance ratio is undefined");
  }
  return std::atan2(std::sqrt(lv), std::sqrt(lh));
}

std::vector<double> delta_branches(double principal, int max_winding) {
  if (max_winding < 0) {
    throw ConfigError("winding bound must be non-negative");
  }
  std::vector<double> out;
  for (int k = 0; k <= max_winding; ++k) {
    const double base = static_cast<double>(k) * kPi;
    for (const double cand : {base - principal, base + principal}) {
      if (cand >= 0.0) {
        out.push_back(cand);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            out.end());
  return out;
}

NullResult null_search(const Engine& engine, const BeamSplitter& bs, double tau_star,
                       double coarse_step) {
  bs.validate();
  if (!(coarse_step > 0.0) || coarse_step > 0.5) {
    throw ConfigError("coarse step must lie in (0, 0.5] radians");
  }
  const double lambda0 = engine.lambda_constant();
  if (lambda0 <= 0.0) {
    throw DegenerateError("sample reflects nothing; the null landscape is flat");
  }
  const PolarizationMatrix g = engine.delay_kernel(2.0 * tau_star);
  const double vis = bs.visibility();

  const auto rate = [&](double theta, double phi) {
    const PolarizationVector w = reference_state(ReferenceArm::cascade(theta, phi));
    const cplx gw0 = g.m00 * w.v0 + g.m01 * w.v1;
    const cplx gw1 = g.m10 * w.v0 + g.m11 * w.v1;
    const cplx quad = std::conj(w.v0) * gw0 + std::conj(w.v1) * gw1;
    return (lambda0 - vis * quad.real()) / lambda0;
  };

  const std::size_t cells = static_cast<std::size_t>(std::ceil(kPi / coarse_step));
  std::vector<double> table(cells * cells);
  const long long total = static_cast<long long>(table.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(detail::worker_count())
#endif
  for (long long idx = 0; idx < total; ++idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / cells;
    const std::size_t j = static_cast<std::size_t>(idx) % cells;
    table[static_cast<std::size_t>(idx)] =
        rate(static_cast<double>(i) * coarse_step, static_cast<double>(j) * coarse_step);
  }

  std::size_t best_idx = 0;
  double best = table[0];
  double low = table[0];
  for (std::size_t idx = 1; idx < table.size(); ++idx) {
    if (table[idx] > best) {
      best = table[idx];
      best_idx = idx;
    }
    low = std::min(low, table[idx]);
  }
  if (best - low < 1e-12 * std::max(std::abs(best), 1.0)) {
    throw DegenerateError("rate is independent of the reference-arm angles at this delay");
  }

  double th = static_cast<double>(best_idx / cells) * coarse_step;
  double ph = static_cast<double>(best_idx % cells) * coarse_step;
  double f_best = best;

  // Newton on the numeric gradient; quadratic convergence near the smooth
  // maximum, bail out to golden-section coordinate descent otherwise
  bool newton_ok = true;
  const double h = 1e-6;
  for (int iter = 0; iter < 60; ++iter) {
    const double f0 = rate(th, ph);
    const double fpt = rate(th + h, ph);
    const double fmt = rate(th - h, ph);
    const double fpp = rate(th, ph + h);
    const double fmp = rate(th, ph - h);
    const double g1 = (fpt - fmt) / (2.0 * h);
    const double g2 = (fpp - fmp) / (2.0 * h);
    if (std::hypot(g1, g2) < 1e-12) {
      break;
    }
    const double h11 = (fpt - 2.0 * f0 + fmt) / (h * h);
    const double h22 = (fpp - 2.0 * f0 + fmp) / (h * h);
    const double fa = rate(th + h, ph + h);
    const double fb = rate(th + h, ph - h);
    const double fc = rate(th - h, ph + h);
    const double fd = rate(th - h, ph - h);
    const double h12 = (fa - fb - fc + fd) / (4.0 * h * h);
    const double det = h11 * h22 - h12 * h12;
    if (!(std::abs(det) > 1e-18)) {
      newton_ok = false;
      break;
    }
    double dth = -(h22 * g1 - h12 * g2) / det;
    double dph = -(h11 * g2 - h12 * g1) / det;
    const double len = std::hypot(dth, dph);
    if (len > 0.2) {
      dth *= 0.2 / len;
      dph *= 0.2 / len;
    }
    const double cand = rate(th + dth, ph + dph);
    if (cand + 1e-15 < f0) {
      newton_ok = false;
      break;
    }
    th += dth;
    ph += dph;
    if (len < 1e-12) {
      break;
    }
  }
  if (!newton_ok) {
    double span = coarse_step;
    while (span > 1e-12) {
      th = golden_max([&](double t) { return rate(t, ph); }, th - span, th + span, 1e-14);
      ph = golden_max([&](double p) { return rate(th, p); }, ph - span, ph + span, 1e-14);
      span *= 0.5;
    }
  }

  // never report a point below the coarse maximum
  if (rate(th, ph) < f_best) {
    th = static_cast<double>(best_idx / cells) * coarse_step;
    ph = static_cast<double>(best_idx % cells) * coarse_step;
  }

  const auto fold = [](double a) {
    double r = std::fmod(a, kPi);
    if (r < 0.0) {
      r += kPi;
    }
    return r;
  };
  NullResult res;
  res.theta = fold(th);
  res.phi = fold(ph);
  res.rate = rate(res.theta, res.phi);
  return res;
}

double retardance_from_null(double theta_star, double phi_star) {
  const NullGeometry g = null_geometry(theta_star, phi_star);
  return std::atan2(std::hypot(g.c2t, g.c2f), std::hypot(g.s2t, g.s2f));
}

double alpha_from_null(double theta_star, double phi_star, double delta) {
  const NullGeometry g = null_geometry(theta_star, phi_star);
  const double det = g.s2t * g.s2t + g.s2f * g.s2f;
  if (det < 1e-300) {
    throw DegenerateError("null geometry carries no axis information");
  }
  const double cd = std::cos(delta);
  const double x = -cd * (g.s2t * g.c2t + g.s2f * g.c2f) / det;
  const double y = cd * (g.s2t * g.c2f - g.s2f * g.c2t) / det;
  if (std::hypot(x, y) < 1e-6) {
    throw DegenerateError("axis angle indeterminate: the retardance leaves no orientation signature");
  }
  double alpha = 0.5 * std::atan2(y, x);
  if (alpha < 0.0) {
    alpha += kPi;
  }
  return alpha;
}

std::vector<double> null_residuals(double theta_star, double phi_star, double delta,
                                   double alpha) {
  const NullGeometry g = null_geometry(theta_star, phi_star);
  const double cd = std::cos(delta);
  const double sd = std::sin(delta);
  const double xh = std::cos(2.0 * alpha);
  const double yh = std::sin(2.0 * alpha);
  return {cd * g.c2t + sd * (g.s2t * xh + g.s2f * yh),
          -cd * g.c2f + sd * (g.s2t * yh - g.s2f * xh)};
}

double refine_dip_delay(const Engine& engine, double tau_lo, double tau_hi) {
  if (!(tau_hi > tau_lo)) {
    throw ConfigError("dip refinement needs tau_hi > tau_lo");
  }
  const auto envelope_power = [&](double tau) {
    const PolarizationMatrix g = engine.delay_kernel(2.0 * tau);
    return std::norm(g.m00) + std::norm(g.m01) + std::norm(g.m10) + std::norm(g.m11);
  };
  return golden_max(envelope_power, tau_lo, tau_hi, 1e-22);
}

ExtractionReport layer_report(const std::vector<DipFeature>& features, double lambda0_h,
                              double lambda0_v) {
  ExtractionReport rep;
  rep.lambda0_h = lambda0_h;
  rep.lambda0_v = lambda0_v;

  std::vector<const DipFeature*> dips;
  for (const DipFeature& f : features) {
    if (f.kind == FeatureKind::Midpoint) {
      ++rep.midpoints_found;
    } else {
      ++rep.dips_found;
      dips.push_back(&f);
    }
  }
  std::sort(dips.begin(), dips.end(),
            [](const DipFeature* a, const DipFeature* b) { return a->position < b->position; });

  for (std::size_t i = 0; i < dips.size(); ++i) {
    LayerSummary s;
    s.position = dips[i]->position;
    s.separation = i == 0 ? 0.0 : dips[i]->position - dips[i - 1]->position;
    s.reflectance_sq = dips.front()->depth > 0.0 ? dips[i]->depth / dips.front()->depth : kNaN;
    rep.layers.push_back(s);
  }
  if (dips.size() >= 2 && dips[1]->depth > 0.0) {
    rep.reflectance_ratio = dips[0]->depth / dips[1]->depth;
  }
  return rep;
}

}  // namespace qoct
