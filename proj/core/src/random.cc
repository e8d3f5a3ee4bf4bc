#include "twirlkit/random.h"

#include <algorithm>
#include <cmath>

namespace twirlkit {

Matrix random_ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = Complex(normal(rng), normal(rng));
  }
  return m;
}

Matrix random_unitary(int d, Rng& rng) {
  Matrix z = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    Complex diag = r(k, k);
    double mag = std::abs(diag);
    if (mag > 0) q.col(k) *= diag / mag;
  }
  return q;
}

RealMatrix random_orthogonal(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix z(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) z(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<RealMatrix> qr(z);
  RealMatrix q = qr.householderQ() * RealMatrix::Identity(d, d);
  RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    if (r(k, k) < 0) q.col(k) *= -1.0;
  }
  return q;
}

Matrix random_hermitian(int d, Rng& rng) {
  Matrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

Matrix random_density(int d, Rng& rng, int rank) {
  if (rank <= 0 || rank > d) rank = d;
  Matrix g = random_ginibre(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

Matrix random_real_density(int d, Rng& rng) {
  Matrix g = random_ginibre(d, d, rng).real().cast<Complex>();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

Matrix random_effect(int d, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Matrix u = random_unitary(d, rng);
  Matrix diag = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) diag(k, k) = uni(rng);
  Matrix e = u * diag * u.adjoint();
  return 0.5 * (e + e.adjoint());
}

namespace {

std::vector<Matrix> kraus_from_isometry(const Matrix& v, int dout, int rank) {
  std::vector<Matrix> ops;
  for (int a = 0; a < rank; ++a) ops.push_back(v.middleRows(a * dout, dout));
  return ops;
}

}  // namespace

Superoperator random_channel(const Factors& in, const Factors& out, Rng& rng, int kraus_rank) {
  const int din = total_dim(in);
  const int dout = total_dim(out);
  int rank = kraus_rank > 0 ? kraus_rank : std::max(1, std::min(din * dout, 4));
  while (rank * dout < din) ++rank;
  Matrix u = random_unitary(rank * dout, rng);
  return Superoperator::kraus(in, out, kraus_from_isometry(u.leftCols(din), dout, rank));
}

Superoperator random_real_channel(const Factors& in, const Factors& out, Rng& rng) {
  const int din = total_dim(in);
  const int dout = total_dim(out);
  int rank = std::max(1, std::min(din * dout, 4));
  while (rank * dout < din) ++rank;
  Matrix o = random_orthogonal(rank * dout, rng).cast<Complex>();
  return Superoperator::kraus(in, out, kraus_from_isometry(o.leftCols(din), dout, rank));
}

std::vector<double> random_probabilities(int n, Rng& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(n);
  double total = 0;
  for (auto& x : p) total += (x = ex(rng));
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace twirlkit
