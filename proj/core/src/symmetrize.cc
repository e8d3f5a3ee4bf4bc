#include "twirlkit/symmetrize.h"

namespace twirlkit {

namespace {

Matrix before_action(const SymmetryRep& rep, const Factors& in, const Factors& out, Matrix j, int g) {
  Dims din = dims_of(in);
  Dims dout = dims_of(out);
  for (std::size_t p = 0; p < in.size(); ++p) {
    LocalAction a = rep.local(in[p], g);
    j = choi_before_local(j, din, dout, static_cast<int>(p), a.n, a.transpose);
  }
  return j;
}

Matrix after_action(const SymmetryRep& rep, const Factors& in, const Factors& out, Matrix j, int g) {
  Dims din = dims_of(in);
  Dims dout = dims_of(out);
  for (std::size_t p = 0; p < out.size(); ++p) {
    LocalAction a = rep.local(out[p], g);
    j = choi_after_local(j, din, dout, static_cast<int>(p), a.n, a.transpose);
  }
  return j;
}

Matrix product_basis(const ConjugationOp& c, const Factors& f) {
  Matrix b = Matrix::Identity(1, 1);
  for (const auto& s : f) b = kron(b, c.basis_for(s));
  return b;
}

}  // namespace

HermitianOperator twirl_operator(const SymmetryRep& rep, const HermitianOperator& o) {
  const int n = rep.order();
  Matrix sum = Matrix::Zero(o.dim(), o.dim());
  for (int g = 0; g < n; ++g) sum += act_collective(rep, o.factors(), g, o.matrix());
  sum /= static_cast<double>(n);
  return HermitianOperator(o.factors(), std::move(sum), o.role());
}

Superoperator twirl_superop(const SymmetryRep& rep, const Superoperator& s) {
  const int n = rep.order();
  Matrix sum = Matrix::Zero(s.choi().rows(), s.choi().cols());
  for (int g = 0; g < n; ++g) {
    Matrix j = before_action(rep, s.in_factors(), s.out_factors(), s.choi(), rep.group().inverse(g));
    sum += after_action(rep, s.in_factors(), s.out_factors(), std::move(j), g);
  }
  sum /= static_cast<double>(n);
  return Superoperator(s.in_factors(), s.out_factors(), std::move(sum));
}

Matrix choi_after_action(const SymmetryRep& rep, const Superoperator& s, int g) {
  return after_action(rep, s.in_factors(), s.out_factors(), s.choi(), g);
}

Matrix choi_before_action(const SymmetryRep& rep, const Superoperator& s, int g) {
  return before_action(rep, s.in_factors(), s.out_factors(), s.choi(), g);
}

double invariance_defect(const SymmetryRep& rep, const HermitianOperator& o) {
  double worst = 0.0;
  for (int g = 0; g < rep.order(); ++g) {
    worst = std::max(worst, max_abs_diff(act_collective(rep, o.factors(), g, o.matrix()), o.matrix()));
  }
  return worst;
}

double covariance_defect(const SymmetryRep& rep, const Superoperator& s) {
  double worst = 0.0;
  for (int g = 0; g < rep.order(); ++g) {
    worst = std::max(worst, max_abs_diff(choi_after_action(rep, s, g), choi_before_action(rep, s, g)));
  }
  return worst;
}

bool is_invariant(const SymmetryRep& rep, const HermitianOperator& o, double tol) {
  return invariance_defect(rep, o) <= tol;
}

bool is_covariant(const SymmetryRep& rep, const Superoperator& s, double tol) {
  return covariance_defect(rep, s) <= tol;
}

Matrix in_basis(const ConjugationOp& c, const HermitianOperator& o) {
  Matrix b = product_basis(c, o.factors());
  return b.adjoint() * o.matrix() * b;
}

Matrix choi_in_basis(const ConjugationOp& c, const Superoperator& s) {
  Matrix bin = product_basis(c, s.in_factors());
  Matrix bout = product_basis(c, s.out_factors());
  Matrix left = kron(bin.transpose(), bout.adjoint());
  return left * s.choi() * left.adjoint();
}

bool is_rqt_operator(const HermitianOperator& o, const ConjugationOp& basis, double tol) {
  Matrix m = in_basis(basis, o);
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

bool is_rqt_channel(const Superoperator& s, const ConjugationOp& basis, double tol) {
  Matrix j = choi_in_basis(basis, s);
  return j.size() == 0 || j.imag().cwiseAbs().maxCoeff() <= tol;
}

bool is_completely_real_preserving(const Superoperator& s, int probe_dim, const ConjugationOp& basis,
                                   double tol) {
  if (probe_dim < 1) throw ValidationError("probe dimension must be >= 1");
  Superoperator sb(s.in_factors(), s.out_factors(), choi_in_basis(basis, s));
  std::string probe_id = "probe";
  while (index_of(s.in_factors(), probe_id) >= 0 || index_of(s.out_factors(), probe_id) >= 0) probe_id += "_";
  Factors f = concat(s.in_factors(), {{probe_id, probe_dim}});
  const int n = total_dim(f);
  check_dim_cap(static_cast<std::size_t>(n), "real-preserving probe");
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      Matrix sigma = Matrix::Zero(n, n);
      sigma(j, k) = 1.0;
      sigma(k, j) = 1.0;
      Matrix image = apply_partial(sb, sigma, f, nullptr);
      if (image.size() > 0 && image.imag().cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

bool swirl_membership(const SymmetryRep& rep, const HermitianOperator& o, double tol) {
  return is_invariant(rep, o, tol);
}

bool swirl_membership(const SymmetryRep& rep, const Superoperator& s, double tol) {
  return is_covariant(rep, s, tol);
}

ConjugationOp conjugation_of(const SymmetryRep& rep) {
  std::map<std::string, Matrix> bases;
  for (const auto& id : rep.system_ids()) {
    const SystemAction& a = rep.action(id);
    if (a.conj_basis) bases[id] = *a.conj_basis;
  }
  return ConjugationOp(std::move(bases));
}

}  // namespace twirlkit
