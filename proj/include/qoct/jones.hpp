#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

// Jones calculus for fully polarized light.
//
// Conventions used throughout this library:
//   - Jones vectors are written in the linear (horizontal, vertical) basis;
//     e_s = [1,0]^T is horizontal (signal), e_i = [0,1]^T is vertical (idler).
//   - sigma_1 = [[0,1],[1,0]], sigma_2 = [[0,-i],[i,0]], sigma_3 = [[1,0],[0,-1]].
//   - exp_pauli(gamma, sigma) evaluates e^{-i*gamma*sigma} = cos(gamma) I - i sin(gamma) sigma.
//   - rotator(alpha) = e^{-i*alpha*sigma_2} is the real rotation by alpha.
//   - A retarder with fast axis horizontal is b(delta) = e^{i(delta/2) sigma_3},
//     i.e. wave_plate(delta, 0); wave_plate(delta, a) = R(a) b(delta) R(a)^dag.
//   - quarter_wave_45() = e^{i(pi/4) sigma_1} converts horizontal/vertical to
//     the circular basis (handedness is a convention, not load-bearing).

namespace qoct {

using cplx = std::complex<double>;

inline constexpr cplx kImag{0.0, 1.0};

struct PolarizationVector {
  cplx v0{0.0, 0.0};
  cplx v1{0.0, 0.0};
};

// Row-major 2x2 complex operator acting on Jones vectors.
struct PolarizationMatrix {
  cplx m00{0.0, 0.0};
  cplx m01{0.0, 0.0};
  cplx m10{0.0, 0.0};
  cplx m11{0.0, 0.0};
};

inline PolarizationVector basis_s() { return {1.0, 0.0}; }
inline PolarizationVector basis_i() { return {0.0, 1.0}; }

inline PolarizationMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
inline PolarizationMatrix zero_matrix() { return {0.0, 0.0, 0.0, 0.0}; }

inline PolarizationMatrix operator+(const PolarizationMatrix& a, const PolarizationMatrix& b) {
  return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}

inline PolarizationMatrix operator-(const PolarizationMatrix& a, const PolarizationMatrix& b) {
  return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}

inline PolarizationMatrix operator*(const cplx& s, const PolarizationMatrix& m) {
  return {s * m.m00, s * m.m01, s * m.m10, s * m.m11};
}

inline PolarizationMatrix mul(const PolarizationMatrix& a, const PolarizationMatrix& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

inline PolarizationMatrix operator*(const PolarizationMatrix& a, const PolarizationMatrix& b) {
  return mul(a, b);
}

inline PolarizationVector apply(const PolarizationMatrix& m, const PolarizationVector& v) {
  return {m.m00 * v.v0 + m.m01 * v.v1, m.m10 * v.v0 + m.m11 * v.v1};
}

inline PolarizationMatrix dagger(const PolarizationMatrix& m) {
  return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01), std::conj(m.m11)};
}

inline PolarizationMatrix transpose(const PolarizationMatrix& m) {
  return {m.m00, m.m10, m.m01, m.m11};
}

// Conjugate-linear in the first argument: inner(u, v) = u^dag v.
inline cplx inner(const PolarizationVector& u, const PolarizationVector& v) {
  return std::conj(u.v0) * v.v0 + std::conj(u.v1) * v.v1;
}

inline double norm(const PolarizationVector& v) { return std::sqrt(std::norm(v.v0) + std::norm(v.v1)); }

inline PolarizationMatrix pauli(int index) {
  switch (index) {
    case 1:
      return {0.0, 1.0, 1.0, 0.0};
    case 2:
      return {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};
    case 3:
      return {1.0, 0.0, 0.0, -1.0};
    default:
      throw std::invalid_argument("pauli index must be 1, 2, or 3");
  }
}

// e^{-i*gamma*sigma} for sigma a Pauli matrix (sigma^2 = I).
inline PolarizationMatrix exp_pauli(double gamma, const PolarizationMatrix& sigma) {
  const double c = std::cos(gamma);
  const cplx is = kImag * std::sin(gamma);
  return {c - is * sigma.m00, -is * sigma.m01, -is * sigma.m10, c - is * sigma.m11};
}

inline PolarizationMatrix rotator(double alpha) { return exp_pauli(alpha, pauli(2)); }

// Retarder with fast axis at axis_angle from horizontal; phase split is
// +delta/2 on the fast axis and -delta/2 on the slow axis.
inline PolarizationMatrix wave_plate(double retardance, double axis_angle) {
  const PolarizationMatrix r = rotator(axis_angle);
  return r * exp_pauli(-0.5 * retardance, pauli(3)) * dagger(r);
}

inline PolarizationMatrix quarter_wave_45() { return exp_pauli(-0.25 * 3.141592653589793238462643383279502884, pauli(1)); }

inline double max_abs_diff(const PolarizationMatrix& a, const PolarizationMatrix& b) {
  return std::max(std::max(std::abs(a.m00 - b.m00), std::abs(a.m01 - b.m01)),
                  std::max(std::abs(a.m10 - b.m10), std::abs(a.m11 - b.m11)));
}

inline double unitarity_defect(const PolarizationMatrix& m) {
  return max_abs_diff(dagger(m) * m, identity());
}

}  // namespace qoct
