#include "twirlkit/qops.h"

#include <mutex>
#include <sstream>

namespace twirlkit {

void validate_factors(const Factors& factors) {
  std::set<std::string> seen;
  for (const auto& f : factors) {
    if (f.dim < 1) throw ValidationError("system '" + f.id + "' has dim < 1");
    if (!seen.insert(f.id).second) throw LabelError("duplicate system id '" + f.id + "'");
  }
}

Dims dims_of(const Factors& factors) {
  Dims d;
  d.reserve(factors.size());
  for (const auto& f : factors) d.push_back(f.dim);
  return d;
}

int total_dim(const Factors& factors) { return product(dims_of(factors)); }

int index_of(const Factors& factors, const std::string& id) {
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].id == id) return static_cast<int>(k);
  }
  return -1;
}

std::string describe(const Factors& factors) {
  std::ostringstream out;
  out << "[";
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k > 0) out << ",";
    out << factors[k].id << ":" << factors[k].dim;
  }
  out << "]";
  return out.str();
}

Factors concat(const Factors& a, const Factors& b) {
  Factors out = a;
  out.insert(out.end(), b.begin(), b.end());
  validate_factors(out);
  return out;
}

std::vector<int> permutation_to(const Factors& factors, const std::vector<std::string>& ids) {
  if (ids.size() != factors.size()) {
    throw LabelError("factor reorder: expected " + std::to_string(factors.size()) + " ids");
  }
  std::vector<int> perm;
  std::set<int> used;
  for (const auto& id : ids) {
    int k = index_of(factors, id);
    if (k < 0) throw LabelError("unknown system id '" + id + "' in " + describe(factors));
    if (!used.insert(k).second) throw LabelError("duplicate id '" + id + "' in reorder");
    perm.push_back(k);
  }
  return perm;
}

Factors reorder(const Factors& factors, const std::vector<int>& perm) {
  Factors out;
  for (int k : perm) out.push_back(factors[k]);
  return out;
}

namespace {

std::vector<std::string> ids_of(const Factors& f) {
  std::vector<std::string> ids;
  for (const auto& s : f) ids.push_back(s.id);
  return ids;
}

bool is_identity_perm(const std::vector<int>& perm) {
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] != static_cast<int>(k)) return false;
  }
  return true;
}

void check_role(const Matrix& m, Role role, double tol) {
  if (role == Role::kGeneric) return;
  RealVector ev = hermitian_eigenvalues(m);
  if (ev.size() == 0) return;
  if (role == Role::kState) {
    if (ev.minCoeff() < -tol) throw ValidationError("state is not PSD");
    double tr = m.trace().real();
    if (tr > 1.0 + tol || tr < -tol) throw ValidationError("state trace outside [0, 1]");
  } else {
    if (ev.minCoeff() < -tol || ev.maxCoeff() > 1.0 + tol) {
      throw ValidationError("effect spectrum outside [0, 1]");
    }
  }
}

}  // namespace

HermitianOperator::HermitianOperator(Factors factors, Matrix matrix, Role role, double tol)
    : factors_(std::move(factors)), matrix_(std::move(matrix)), role_(role) {
  validate_factors(factors_);
  const int n = total_dim(factors_);
  check_dim_cap(static_cast<std::size_t>(n), "operator");
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw ShapeError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                     std::to_string(matrix_.cols()) + " but factors " + describe(factors_) +
                     " need " + std::to_string(n));
  }
  if (!is_hermitian(matrix_, tol)) throw ValidationError("operator is not Hermitian");
  check_role(matrix_, role_, tol);
}

HermitianOperator HermitianOperator::with_role(Role role, double tol) const {
  return HermitianOperator(factors_, matrix_, role, tol);
}

HermitianOperator HermitianOperator::reordered(const std::vector<std::string>& ids) const {
  std::vector<int> perm = permutation_to(factors_, ids);
  if (is_identity_perm(perm)) return *this;
  return HermitianOperator(reorder(factors_, perm), permute_factors(matrix_, dims(), perm), role_);
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  Factors f = concat(a.factors(), b.factors());
  Role role = Role::kGeneric;
  if (a.role() == Role::kState && b.role() == Role::kState) role = Role::kState;
  if (a.role() == Role::kEffect && b.role() == Role::kEffect) role = Role::kEffect;
  return HermitianOperator(std::move(f), kron(a.matrix(), b.matrix()), role);
}

HermitianOperator partial_trace(const HermitianOperator& o, const std::set<std::string>& keep) {
  for (const auto& id : keep) {
    if (index_of(o.factors(), id) < 0) throw LabelError("partial_trace: unknown system '" + id + "'");
  }
  std::vector<bool> mask;
  Factors kept;
  for (const auto& f : o.factors()) {
    bool k = keep.count(f.id) > 0;
    mask.push_back(k);
    if (k) kept.push_back(f);
  }
  Role role = o.role() == Role::kState ? Role::kState : Role::kGeneric;
  return HermitianOperator(std::move(kept), partial_trace(o.matrix(), o.dims(), mask), role);
}

bool is_psd(const HermitianOperator& o, double tol) { return min_eigenvalue(o) >= -tol; }

double min_eigenvalue(const HermitianOperator& o) { return min_eigenvalue(o.matrix()); }

double born_probability(const HermitianOperator& effect, const HermitianOperator& state) {
  HermitianOperator e = effect.reordered(ids_of(state.factors()));
  if (dims_of(e.factors()) != state.dims()) throw ShapeError("born_probability: dim mismatch");
  return e.matrix().cwiseProduct(state.matrix().transpose()).sum().real();
}

ConjugationOp::ConjugationOp(std::map<std::string, Matrix> bases) : bases_(std::move(bases)) {
  for (const auto& [id, b] : bases_) {
    if (!is_unitary(b)) throw ValidationError("conjugation basis for '" + id + "' is not unitary");
  }
}

Matrix ConjugationOp::basis_for(const SystemLabel& system) const {
  auto it = bases_.find(system.id);
  if (it == bases_.end()) return Matrix::Identity(system.dim, system.dim);
  if (it->second.rows() != system.dim) {
    throw ShapeError("conjugation basis for '" + system.id + "' has wrong dimension");
  }
  return it->second;
}

Matrix ConjugationOp::conjugator_for(const SystemLabel& system) const {
  Matrix b = basis_for(system);
  return b * b.transpose();
}

HermitianOperator conjugate(const ConjugationOp& c, const HermitianOperator& o) {
  Matrix m = Matrix::Identity(1, 1);
  for (const auto& f : o.factors()) m = kron(m, c.conjugator_for(f));
  return HermitianOperator(o.factors(), m * o.matrix().conjugate() * m.adjoint(), o.role());
}

HermitianOperator conjugate_partial(const ConjugationOp& c, const HermitianOperator& o,
                                    const std::set<std::string>& on) {
  Matrix m = o.matrix();
  Dims dims = o.dims();
  for (const auto& id : on) {
    int p = index_of(o.factors(), id);
    if (p < 0) throw LabelError("conjugate_partial: unknown system '" + id + "'");
  }
  for (std::size_t p = 0; p < o.factors().size(); ++p) {
    if (on.count(o.factors()[p].id) == 0) continue;
    m = partial_transpose(m, dims, static_cast<int>(p));
    m = sandwich_factor(m, dims, static_cast<int>(p), c.conjugator_for(o.factors()[p]));
  }
  return HermitianOperator(o.factors(), std::move(m), Role::kGeneric);
}

struct Superoperator::FlagCache {
  std::once_flag once;
  ChannelFlags flags;
};

Superoperator::Superoperator(Factors in, Factors out, Matrix choi)
    : in_(std::move(in)), out_(std::move(out)), choi_(std::move(choi)),
      cache_(std::make_shared<FlagCache>()) {
  validate_factors(in_);
  validate_factors(out_);
  const int din = total_dim(in_);
  const int dout = total_dim(out_);
  check_dim_cap(static_cast<std::size_t>(din), "superoperator input");
  check_dim_cap(static_cast<std::size_t>(dout), "superoperator output");
  const int n = din * dout;
  if (choi_.rows() != n || choi_.cols() != n) {
    throw ShapeError("Choi matrix is " + std::to_string(choi_.rows()) + "x" +
                     std::to_string(choi_.cols()) + " but " + describe(in_) + " -> " +
                     describe(out_) + " needs " + std::to_string(n));
  }
}

Superoperator Superoperator::with_declared(ChannelFlags f) && {
  declared_ = f;
  return std::move(*this);
}

Vector choi_vector(const Matrix& l) {
  const Eigen::Index din = l.cols();
  const Eigen::Index dout = l.rows();
  Vector v(din * dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index k = 0; k < dout; ++k) v(i * dout + k) = l(k, i);
  }
  return v;
}

Superoperator Superoperator::identity(const Factors& systems) {
  const int d = total_dim(systems);
  return unitary(systems, Matrix::Identity(d, d));
}

Superoperator Superoperator::unitary(const Factors& systems, const Matrix& u) {
  if (!is_unitary(u)) throw ValidationError("unitary channel: matrix is not unitary");
  Vector v = choi_vector(u);
  return Superoperator(systems, systems, v * v.adjoint())
      .with_declared({true, true, true, true});
}

Superoperator Superoperator::sandwich(const Factors& in, const Factors& out, const Matrix& l,
                                      const Matrix& r) {
  const int din = total_dim(in);
  const int dout = total_dim(out);
  if (l.rows() != dout || l.cols() != din || r.rows() != dout || r.cols() != din) {
    throw ShapeError("sandwich: operator shapes do not match factors");
  }
  return Superoperator(in, out, choi_vector(l) * choi_vector(r).adjoint());
}

Superoperator Superoperator::kraus(const Factors& in, const Factors& out,
                                   const std::vector<Matrix>& ops) {
  const int din = total_dim(in);
  const int dout = total_dim(out);
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : ops) {
    if (k.rows() != dout || k.cols() != din) throw ShapeError("kraus: operator shape mismatch");
    Vector v = choi_vector(k);
    j += v * v.adjoint();
  }
  return Superoperator(in, out, std::move(j));
}

Superoperator Superoperator::from_state(const HermitianOperator& rho) {
  return Superoperator({}, rho.factors(), rho.matrix());
}

Superoperator Superoperator::from_effect(const HermitianOperator& e) {
  return Superoperator(e.factors(), {}, e.matrix().transpose());
}

Superoperator Superoperator::transpose_sandwich(const Factors& systems, const Matrix& n) {
  const int d = total_dim(systems);
  if (n.rows() != d || n.cols() != d) throw ShapeError("transpose_sandwich: shape mismatch");
  Matrix j(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) j.block(i * d, k * d, d, d) = n.col(k) * n.col(i).adjoint();
  }
  return Superoperator(systems, systems, std::move(j));
}

Superoperator Superoperator::trace_and_prepare(const Factors& in, const HermitianOperator& rho) {
  const int din = total_dim(in);
  return Superoperator(in, rho.factors(), kron(Matrix::Identity(din, din), rho.matrix()));
}

ChannelFlags Superoperator::compute_flags(double tol) const {
  ChannelFlags f;
  f.hermitian_preserving = is_hermitian(choi_, tol);
  const int din = in_dim();
  Dims dims = in_dims();
  Dims od = out_dims();
  dims.insert(dims.end(), od.begin(), od.end());
  std::vector<bool> keep(dims.size(), false);
  for (std::size_t k = 0; k < in_.size(); ++k) keep[k] = true;
  Matrix reduced = partial_trace(choi_, dims, keep);
  Matrix id = Matrix::Identity(din, din);
  f.tp = max_abs_diff(reduced, id) <= tol;
  if (f.hermitian_preserving) {
    f.cp = min_eigenvalue(choi_) >= -tol;
    f.trace_nonincreasing = f.cp && min_eigenvalue(id - reduced) >= -tol;
  }
  return f;
}

const ChannelFlags& Superoperator::flags() const {
  std::call_once(cache_->once, [this] { cache_->flags = compute_flags(kDefaultTol); });
  return cache_->flags;
}

Superoperator Superoperator::reordered(const std::vector<std::string>& in_ids,
                                       const std::vector<std::string>& out_ids) const {
  std::vector<int> pin = permutation_to(in_, in_ids);
  std::vector<int> pout = permutation_to(out_, out_ids);
  if (is_identity_perm(pin) && is_identity_perm(pout)) return *this;
  Dims dims = in_dims();
  Dims od = out_dims();
  dims.insert(dims.end(), od.begin(), od.end());
  std::vector<int> perm = pin;
  for (int k : pout) perm.push_back(k + static_cast<int>(in_.size()));
  Superoperator out(reorder(in_, pin), reorder(out_, pout), permute_factors(choi_, dims, perm));
  out.declared_ = declared_;
  return out;
}

Superoperator Superoperator::relabeled(const std::map<std::string, std::string>& rename) const {
  auto apply_names = [&](Factors f) {
    for (auto& s : f) {
      auto it = rename.find(s.id);
      if (it != rename.end()) s.id = it->second;
    }
    return f;
  };
  Superoperator out(apply_names(in_), apply_names(out_), choi_);
  out.declared_ = declared_;
  return out;
}

Matrix Superoperator::apply_matrix(const Matrix& x) const {
  const int din = in_dim();
  const int dout = out_dim();
  if (x.rows() != din || x.cols() != din) throw ShapeError("apply: input dimension mismatch");
  Matrix y = Matrix::Zero(dout, dout);
  for (int l = 0; l < din; ++l) {
    for (int k = 0; k < din; ++k) {
      const Complex c = x(k, l);
      if (c == Complex(0.0)) continue;
      y += c * choi_.block(k * dout, l * dout, dout, dout);
    }
  }
  return y;
}

HermitianOperator apply(const Superoperator& s, const HermitianOperator& o) {
  HermitianOperator in = o.reordered(ids_of(s.in_factors()));
  if (in.factors() != s.in_factors()) throw ShapeError("apply: input dims do not match");
  return HermitianOperator(s.out_factors(), s.apply_matrix(in.matrix()));
}

Matrix apply_partial(const Superoperator& s, const Matrix& rho, const Factors& rho_factors,
                     Factors* result_factors) {
  std::vector<std::string> order = ids_of(s.in_factors());
  Factors rest;
  for (const auto& f : rho_factors) {
    if (index_of(s.in_factors(), f.id) < 0) {
      order.push_back(f.id);
      rest.push_back(f);
    }
  }
  std::vector<int> perm = permutation_to(rho_factors, order);
  Factors permuted = reorder(rho_factors, perm);
  for (std::size_t k = 0; k < s.in_factors().size(); ++k) {
    if (permuted[k] != s.in_factors()[k]) throw ShapeError("apply_partial: dim mismatch on " + permuted[k].id);
  }
  Matrix r = is_identity_perm(perm) ? rho : permute_factors(rho, dims_of(rho_factors), perm);
  const int din = s.in_dim();
  const int dout = s.out_dim();
  const int drest = total_dim(rest);
  check_dim_cap(static_cast<std::size_t>(dout) * drest, "apply_partial result");
  Matrix out = Matrix::Zero(dout * drest, dout * drest);
  for (int j = 0; j < din; ++j) {
    for (int i = 0; i < din; ++i) {
      auto block = r.block(i * drest, j * drest, drest, drest);
      if (block.cwiseAbs().maxCoeff() == 0.0) continue;
      out += kron(s.choi().block(i * dout, j * dout, dout, dout), block);
    }
  }
  if (result_factors != nullptr) *result_factors = concat(s.out_factors(), rest);
  return out;
}

Superoperator compose_seq(const Superoperator& s1, const Superoperator& s2) {
  if (s1.in_factors().size() != s2.out_factors().size()) {
    throw LabelError("compose_seq: " + describe(s2.out_factors()) + " does not feed " +
                     describe(s1.in_factors()));
  }
  Superoperator first = s1.reordered(ids_of(s2.out_factors()), ids_of(s1.out_factors()));
  if (first.in_factors() != s2.out_factors()) throw ShapeError("compose_seq: dimension mismatch");
  const int din = s2.in_dim();
  const int dmid = s2.out_dim();
  const int dout = s1.out_dim();
  Matrix j(din * dout, din * dout);
  for (int b = 0; b < din; ++b) {
    for (int a = 0; a < din; ++a) {
      Matrix mid = s2.choi().block(a * dmid, b * dmid, dmid, dmid);
      j.block(a * dout, b * dout, dout, dout) = first.apply_matrix(mid);
    }
  }
  return Superoperator(s2.in_factors(), s1.out_factors(), std::move(j));
}

Superoperator compose_par(const Superoperator& s1, const Superoperator& s2) {
  Factors in = concat(s1.in_factors(), s2.in_factors());
  Factors out = concat(s1.out_factors(), s2.out_factors());
  check_dim_cap(static_cast<std::size_t>(total_dim(in)), "compose_par input");
  check_dim_cap(static_cast<std::size_t>(total_dim(out)), "compose_par output");
  Dims dims = {s1.in_dim(), s1.out_dim(), s2.in_dim(), s2.out_dim()};
  Matrix j = permute_factors(kron(s1.choi(), s2.choi()), dims, {0, 2, 1, 3});
  return Superoperator(std::move(in), std::move(out), std::move(j));
}

namespace {

Dims joined(const Dims& a, const Dims& b) {
  Dims d = a;
  d.insert(d.end(), b.begin(), b.end());
  return d;
}

}  // namespace

Matrix choi_after_local(const Matrix& choi, const Dims& in, const Dims& out, int p,
                        const Matrix& l, bool transpose) {
  Dims dims = joined(in, out);
  const int q = static_cast<int>(in.size()) + p;
  Matrix j = transpose ? partial_transpose(choi, dims, q) : choi;
  Matrix left = left_multiply_factor(j, dims, q, l);
  return right_multiply_factor(left, dims, q, l.adjoint());
}

Matrix choi_before_local(const Matrix& choi, const Dims& in, const Dims& out, int p,
                         const Matrix& l, bool transpose) {
  Dims dims = joined(in, out);
  Matrix lt = l.transpose();
  Matrix left = left_multiply_factor(choi, dims, p, lt);
  Matrix j = right_multiply_factor(left, dims, p, lt.adjoint());
  if (!transpose) return j;
  Dims new_dims = dims;
  new_dims[p] = static_cast<int>(l.cols());
  return partial_transpose(j, new_dims, p);
}

}  // namespace twirlkit
