#include "qoct/quadrature.hpp"

#include <stdexcept>

namespace qoct {

std::vector<double> simpson_coefficients(std::size_t points, double step) {
  if (points < 3 || points % 2 == 0) {
    throw std::invalid_argument("composite Simpson needs an odd point count >= 3");
  }
  std::vector<double> coeff(points);
  const double third = step / 3.0;
  coeff.front() = third;
  coeff.back() = third;
  for (std::size_t k = 1; k + 1 < points; ++k) {
    coeff[k] = (k % 2 == 1 ? 4.0 : 2.0) * third;
  }
  return coeff;
}

}  // namespace qoct
