#pragma once

#include <cstddef>
#include <vector>

namespace qoct {

// Composite Simpson coefficients {h/3, 4h/3, 2h/3, ..., 4h/3, h/3} for an
// odd number of uniformly spaced points. Throws std::invalid_argument for
// even or too-small counts.
std::vector<double> simpson_coefficients(std::size_t points, double step);

}  // namespace qoct
