#pragma once

// Independent reference computations used as test oracles. These are written
// with explicit index loops and never call the library's tensor helpers.

#include <cmath>
#include <complex>

#include "twirlkit/linalg.h"

namespace oracle {

using twirlkit::Complex;
using twirlkit::Matrix;
using twirlkit::Vector;

inline Matrix pauli(char which) {
  Matrix m(2, 2);
  switch (which) {
    case 'I':
      m << 1, 0, 0, 1;
      break;
    case 'X':
      m << 0, 1, 1, 0;
      break;
    case 'Y':
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    default:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

inline Matrix ket_bra(const Vector& a, const Vector& b) { return a * b.adjoint(); }

inline Vector ket(std::initializer_list<Complex> amps) {
  Vector v(static_cast<Eigen::Index>(amps.size()));
  int k = 0;
  for (Complex a : amps) v(k++) = a;
  return v;
}

inline Vector plus() { return ket({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}); }
inline Vector minus() { return ket({1 / std::sqrt(2.0), -1 / std::sqrt(2.0)}); }
inline Vector plus_y() { return ket({1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0))}); }
inline Vector minus_y() { return ket({1 / std::sqrt(2.0), Complex(0, -1 / std::sqrt(2.0))}); }
inline Vector basis(int d, int k) {
  Vector v = Vector::Zero(d);
  v(k) = 1.0;
  return v;
}

/// (|00⟩ + s|11⟩)/√2 on two qubits.
inline Matrix bell(double sign = 1.0) {
  Vector v = Vector::Zero(4);
  v(0) = 1 / std::sqrt(2.0);
  v(3) = sign / std::sqrt(2.0);
  return v * v.adjoint();
}

inline Matrix kron_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Partial transpose of the second factor of a (da*db)-dim operator.
inline Matrix transpose_second(const Matrix& m, int da, int db) {
  Matrix out(da * db, da * db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int c = 0; c < da; ++c)
        for (int d = 0; d < db; ++d) out(a * db + b, c * db + d) = m(a * db + d, c * db + b);
  return out;
}

inline Matrix transpose_first(const Matrix& m, int da, int db) {
  Matrix out(da * db, da * db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int c = 0; c < da; ++c)
        for (int d = 0; d < db; ++d) out(a * db + b, c * db + d) = m(c * db + b, a * db + d);
  return out;
}

/// Tr_B of a (da*db)-dim operator.
inline Matrix trace_second(const Matrix& m, int da, int db) {
  Matrix out = Matrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int c = 0; c < da; ++c)
      for (int b = 0; b < db; ++b) out(a, c) += m(a * db + b, c * db + b);
  return out;
}

inline Matrix trace_first(const Matrix& m, int da, int db) {
  Matrix out = Matrix::Zero(db, db);
  for (int b = 0; b < db; ++b)
    for (int d = 0; d < db; ++d)
      for (int a = 0; a < da; ++a) out(b, d) += m(a * db + b, a * db + d);
  return out;
}

/// Channel action from Kraus operators.
inline Matrix apply_kraus(const std::vector<Matrix>& ks, const Matrix& rho) {
  Matrix out = Matrix::Zero(ks[0].rows(), ks[0].rows());
  for (const auto& k : ks) out += k * rho * k.adjoint();
  return out;
}

inline double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (m + m.adjoint()));
  return s.eigenvalues().minCoeff();
}

inline double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace oracle
