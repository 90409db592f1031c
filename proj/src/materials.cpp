#include "qoct/materials.hpp"

#include <cmath>
#include <utility>

#include "qoct/constants.hpp"
#include "qoct/errors.hpp"

namespace qoct {

IndexModel IndexModel::constant(double n) {
  IndexModel model;
  model.kind = Kind::Constant;
  model.n_value = n;
  return model;
}

IndexModel IndexModel::sellmeier(double a, const std::array<SellmeierTerm, 3>& terms,
                                 double d, std::string citation) {
  IndexModel model;
  model.kind = Kind::Sellmeier;
  model.a = a;
  model.d = d;
  model.terms = terms;
  model.citation = std::move(citation);
  return model;
}

double refractive_index(const IndexModel& model, double wavelength) {
  if (model.is_constant()) {
    return model.n_value;
  }
  // band endpoints are admitted; the pump of the default source sits exactly
  // at the short edge
  const double slack = 1e-15;
  if (wavelength < kBandLoMeters - slack || wavelength > kBandHiMeters + slack) {
    throw PhysicsError("wavelength outside the supported index band 0.4..1.2 um");
  }
  const double lum = wavelength * 1e6;
  const double l2 = lum * lum;
  double n2 = model.a + model.d * l2;
  for (const auto& term : model.terms) {
    if (term.p == 0.0 && term.q == 0.0) {
      continue;
    }
    n2 += (term.p + term.q * l2) / (l2 - term.c);
  }
  if (!(n2 > 1.0) || !(n2 < 9.0)) {
    throw PhysicsError("refractive index outside (1, 3); check Sellmeier coefficients");
  }
  return std::sqrt(n2);
}

double index_at_omega(const IndexModel& model, double omega) {
  if (model.is_constant()) {
    return model.n_value;
  }
  return refractive_index(model, 2.0 * kPi * kSpeedOfLight / omega);
}

IndexModel bbo_ordinary() {
  return IndexModel::sellmeier(2.7405, {{{0.0184, 0.0, 0.0179}, {}, {}}}, -0.0155,
                               "Kato 1986");
}

IndexModel bbo_extraordinary() {
  return IndexModel::sellmeier(2.3730, {{{0.0128, 0.0, 0.0156}, {}, {}}}, -0.0044,
                               "Kato 1986");
}

IndexModel quartz_ordinary_sellmeier() {
  return IndexModel::sellmeier(1.28604141,
                               {{{0.0, 1.07044083, 0.0100585997},
                                 {0.0, 1.10202242, 100.0},
                                 {}}},
                               0.0, "Ghosh 1999");
}

IndexModel quartz_extraordinary_sellmeier() {
  return IndexModel::sellmeier(1.28851804,
                               {{{0.0, 1.09509924, 0.0102101864},
                                 {0.0, 1.15662475, 100.0},
                                 {}}},
                               0.0, "Ghosh 1999");
}

IndexModel quartz_ordinary_constant() { return IndexModel::constant(kQuartzNo); }

IndexModel quartz_extraordinary_constant() { return IndexModel::constant(kQuartzNe); }

}  // namespace qoct
