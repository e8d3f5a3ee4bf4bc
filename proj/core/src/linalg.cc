#include "twirlkit/linalg.h"

#include <cstdlib>
#include <numeric>

namespace twirlkit {

namespace {

std::size_t read_max_dim() {
  const char* env = std::getenv("TWIRLKIT_MAX_DIM");
  if (env == nullptr || *env == '\0') return 256;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return 256;
  return static_cast<std::size_t>(v);
}

// Strides for row-major digit decomposition of a mixed-radix index.
std::vector<int> strides_of(const Dims& dims) {
  std::vector<int> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

void split_at(const Dims& dims, int p, int& before, int& after) {
  if (p < 0 || p >= static_cast<int>(dims.size())) throw ShapeError("factor index out of range");
  before = 1;
  after = 1;
  for (int k = 0; k < p; ++k) before *= dims[k];
  for (int k = p + 1; k < static_cast<int>(dims.size()); ++k) after *= dims[k];
}

}  // namespace

std::size_t max_composite_dim() {
  static const std::size_t cap = read_max_dim();
  return cap;
}

void check_dim_cap(std::size_t dim, const std::string& what) {
  if (dim > max_composite_dim()) {
    throw ShapeError(what + ": dimension " + std::to_string(dim) + " exceeds cap " +
                     std::to_string(max_composite_dim()) + " (set TWIRLKIT_MAX_DIM)");
  }
}

int product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: shape mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m, m.adjoint()) <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m * m.adjoint(), Matrix::Identity(m.rows(), m.cols())) <= tol;
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("eigenvalues of non-square matrix");
  if (m.rows() == 0) return RealVector();
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& m) {
  RealVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix permute_factors(const Matrix& m, const Dims& dims, const std::vector<int>& perm) {
  const int n = product(dims);
  if (m.rows() != n || m.cols() != n) throw ShapeError("permute_factors: shape mismatch");
  if (perm.size() != dims.size()) throw ShapeError("permute_factors: bad permutation");
  Dims new_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims[perm[k]];
  std::vector<int> old_strides = strides_of(dims);
  std::vector<int> new_strides = strides_of(new_dims);
  std::vector<int> map(n);
  for (int x = 0; x < n; ++x) {
    int y = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      int digit = (x / old_strides[perm[k]]) % dims[perm[k]];
      y += digit * new_strides[k];
    }
    map[x] = y;
  }
  Matrix out(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) out(map[r], map[c]) = m(r, c);
  }
  return out;
}

Matrix partial_transpose(const Matrix& m, const Dims& dims, int p) {
  const int n = product(dims);
  if (m.rows() != n || m.cols() != n) throw ShapeError("partial_transpose: shape mismatch");
  int before = 1;
  int after = 1;
  split_at(dims, p, before, after);
  const int stride = after;
  const int d = dims[p];
  Matrix out(n, n);
  for (int c = 0; c < n; ++c) {
    const int dc = (c / stride) % d;
    for (int r = 0; r < n; ++r) {
      const int dr = (r / stride) % d;
      out(r - dr * stride + dc * stride, c - dc * stride + dr * stride) = m(r, c);
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims, const std::vector<bool>& keep) {
  const int n = product(dims);
  if (m.rows() != n || m.cols() != n) throw ShapeError("partial_trace: shape mismatch");
  if (keep.size() != dims.size()) throw ShapeError("partial_trace: mask size mismatch");
  std::vector<int> strides = strides_of(dims);
  int kept_n = 1;
  int traced_n = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) (keep[k] ? kept_n : traced_n) *= dims[k];
  // Decompose each full index into (kept index, traced index).
  std::vector<std::vector<std::pair<int, int>>> by_traced(traced_n);
  for (int x = 0; x < n; ++x) {
    int ki = 0;
    int ti = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      int digit = (x / strides[k]) % dims[k];
      if (keep[k]) {
        ki = ki * dims[k] + digit;
      } else {
        ti = ti * dims[k] + digit;
      }
    }
    by_traced[ti].push_back({ki, x});
  }
  Matrix out = Matrix::Zero(kept_n, kept_n);
  for (const auto& group : by_traced) {
    for (const auto& [kc, xc] : group) {
      for (const auto& [kr, xr] : group) out(kr, kc) += m(xr, xc);
    }
  }
  return out;
}

Matrix left_multiply_factor(const Matrix& m, const Dims& row_dims, int p, const Matrix& l) {
  if (m.rows() != product(row_dims)) throw ShapeError("left_multiply_factor: row mismatch");
  int before = 1;
  int after = 1;
  split_at(row_dims, p, before, after);
  const int d_in = row_dims[p];
  if (l.cols() != d_in) throw ShapeError("left_multiply_factor: factor dim mismatch");
  const int d_out = static_cast<int>(l.rows());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(before) * d_out * after, m.cols());
  for (int a = 0; a < before; ++a) {
    for (int k = 0; k < d_out; ++k) {
      for (int i = 0; i < d_in; ++i) {
        const Complex coeff = l(k, i);
        if (coeff == Complex(0.0)) continue;
        out.middleRows((a * d_out + k) * after, after) +=
            coeff * m.middleRows((a * d_in + i) * after, after);
      }
    }
  }
  return out;
}

Matrix right_multiply_factor(const Matrix& m, const Dims& col_dims, int p, const Matrix& r) {
  if (m.cols() != product(col_dims)) throw ShapeError("right_multiply_factor: col mismatch");
  int before = 1;
  int after = 1;
  split_at(col_dims, p, before, after);
  const int d_in = col_dims[p];
  if (r.rows() != d_in) throw ShapeError("right_multiply_factor: factor dim mismatch");
  const int d_out = static_cast<int>(r.cols());
  Matrix out = Matrix::Zero(m.rows(), static_cast<Eigen::Index>(before) * d_out * after);
  for (int a = 0; a < before; ++a) {
    for (int k = 0; k < d_out; ++k) {
      for (int i = 0; i < d_in; ++i) {
        const Complex coeff = r(i, k);
        if (coeff == Complex(0.0)) continue;
        out.middleCols((a * d_out + k) * after, after) +=
            coeff * m.middleCols((a * d_in + i) * after, after);
      }
    }
  }
  return out;
}

Matrix sandwich_factor(const Matrix& m, const Dims& dims, int p, const Matrix& l) {
  Matrix left = left_multiply_factor(m, dims, p, l);
  return right_multiply_factor(left, dims, p, l.adjoint());
}

}  // namespace twirlkit
