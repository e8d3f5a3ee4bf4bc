#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace twirlkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

inline constexpr double kDefaultTol = 1e-9;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown, duplicated, or mismatched system labels.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Matrix sizes that do not match the declared factorization.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An object that violates a structural invariant (not Hermitian, not a group, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Composite dimension cap, read once from TWIRLKIT_MAX_DIM (default 256).
std::size_t max_composite_dim();

/// Throws ShapeError if `dim` exceeds max_composite_dim().
void check_dim_cap(std::size_t dim, const std::string& what);

int product(const Dims& dims);

/// Maximum absolute entry of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);

bool is_hermitian(const Matrix& m, double tol = kDefaultTol);
bool is_unitary(const Matrix& m, double tol = kDefaultTol);

/// Eigenvalues of the Hermitian part of m, ascending.
RealVector hermitian_eigenvalues(const Matrix& m);
double min_eigenvalue(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// Reorders the tensor factors of a square operator: factor k of the result
/// is factor perm[k] of the input.
Matrix permute_factors(const Matrix& m, const Dims& dims, const std::vector<int>& perm);

/// Partial transpose on factor p (row and column factorizations equal).
Matrix partial_transpose(const Matrix& m, const Dims& dims, int p);

/// Traces out every factor whose keep flag is false. Kept factors stay in order.
Matrix partial_trace(const Matrix& m, const Dims& dims, const std::vector<bool>& keep);

/// (I ⊗ L ⊗ I) * m where L acts on row factor p. Row factor p's dimension
/// becomes L.rows().
Matrix left_multiply_factor(const Matrix& m, const Dims& row_dims, int p, const Matrix& l);

/// m * (I ⊗ R ⊗ I) where R acts on column factor p. Column factor p's
/// dimension becomes R.cols().
Matrix right_multiply_factor(const Matrix& m, const Dims& col_dims, int p, const Matrix& r);

/// (I ⊗ L ⊗ I) m (I ⊗ L ⊗ I)† with square factorization `dims`.
Matrix sandwich_factor(const Matrix& m, const Dims& dims, int p, const Matrix& l);

}  // namespace twirlkit
