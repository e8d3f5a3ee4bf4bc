#include "twirlkit/gptcore.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twirlkit {

namespace {

Dims hilbert_dims(const GptShape& shape) { return Dims(shape.begin(), shape.end()); }

Factors party_factors(const GptShape& shape, const std::string& prefix) {
  Factors f;
  for (std::size_t i = 0; i < shape.size(); ++i) f.push_back({prefix + std::to_string(i), shape[i]});
  return f;
}

bool quantum_state_ok(const RealVector& v, const GptShape& shape, double tol) {
  Matrix rho = vector_to_operator(v, hilbert_dims(shape));
  return min_eigenvalue(rho) >= -tol && rho.trace().real() <= 1.0 + tol;
}

bool quantum_effect_ok(const RealVector& v, const GptShape& shape, double tol) {
  Dims dims = hilbert_dims(shape);
  Matrix e = vector_to_operator(v, dims);
  RealVector ev = hermitian_eigenvalues(e);
  return ev(0) >= -tol && ev(ev.size() - 1) <= 1.0 + tol;
}

bool quantum_transform_ok(const RealMatrix& t, const GptShape& in, const GptShape& out, double tol) {
  Matrix j = transfer_to_choi(t, hilbert_dims(in), hilbert_dims(out));
  Superoperator s(party_factors(in, "i"), party_factors(out, "o"), std::move(j));
  ChannelFlags f = s.compute_flags(tol);
  return f.cp && f.trace_nonincreasing;
}

/// PSD and PSD after partial transposition on every nonempty proper subset.
bool ppt_operator(const Matrix& m, const Dims& dims, double tol) {
  if (min_eigenvalue(m) < -tol) return false;
  const int n = static_cast<int>(dims.size());
  for (int mask = 1; mask + 1 < (1 << n); ++mask) {
    Matrix pt = m;
    for (int p = 0; p < n; ++p) {
      if (mask & (1 << p)) pt = partial_transpose(pt, dims, p);
    }
    if (min_eigenvalue(pt) < -tol) return false;
  }
  return true;
}

bool ppt_state_ok(const RealVector& v, const GptShape& shape, double tol) {
  Dims dims = hilbert_dims(shape);
  Matrix rho = vector_to_operator(v, dims);
  return rho.trace().real() <= 1.0 + tol && ppt_operator(rho, dims, tol);
}

bool ppt_effect_ok(const RealVector& v, const GptShape& shape, double tol) {
  Dims dims = hilbert_dims(shape);
  Matrix e = vector_to_operator(v, dims);
  Matrix comp = Matrix::Identity(e.rows(), e.cols()) - e;
  return ppt_operator(e, dims, tol) && ppt_operator(comp, dims, tol);
}

bool ppt_transform_ok(const RealMatrix& t, const GptShape& in, const GptShape& out, double tol) {
  Dims din = hilbert_dims(in);
  Dims dout = hilbert_dims(out);
  Matrix j = transfer_to_choi(t, din, dout);
  Dims all = din;
  all.insert(all.end(), dout.begin(), dout.end());
  const int n = static_cast<int>(din.size());
  // ℰ∘𝒞_S has the Choi matrix of ℰ partially transposed on input factors S.
  for (int mask = 0; mask < (1 << n); ++mask) {
    Matrix js = j;
    for (int p = 0; p < n; ++p) {
      if (mask & (1 << p)) js = partial_transpose(js, all, p);
    }
    Superoperator s(party_factors(in, "i"), party_factors(out, "o"), std::move(js));
    ChannelFlags f = s.compute_flags(tol);
    if (f.cp && f.trace_nonincreasing) return true;
  }
  return false;
}

/// Entanglement-breaking certificate for a PSD Choi matrix across in|out.
bool eb_certified(const Matrix& m, int din, int dout, double tol) {
  if (min_eigenvalue(m) < -tol) return false;
  double tr = m.trace().real();
  if (tr <= tol) return true;
  Dims cut = {din, dout};
  if (din * dout <= 6) return min_eigenvalue(partial_transpose(m, cut, 0)) >= -tol;
  // Product form: realignment has a single nonzero singular value.
  Matrix realigned(din * din, dout * dout);
  for (int i = 0; i < din; ++i) {
    for (int j = 0; j < din; ++j) {
      for (int k = 0; k < dout; ++k) {
        for (int l = 0; l < dout; ++l) realigned(i * din + j, k * dout + l) = m(i * dout + k, j * dout + l);
      }
    }
  }
  Eigen::JacobiSVD<Matrix> svd(realigned);
  const auto& sv = svd.singularValues();
  if (sv.size() < 2 || sv(1) <= tol) return true;
  // Separable ball around the maximally mixed state: tr ρ² ≤ 1/(D−1).
  Matrix rho = m / tr;
  const double d = din * dout;
  return (rho * rho).trace().real() <= 1.0 / (d - 1.0) + tol;
}

double ppt_margin(const Matrix& m, int din, int dout) {
  Dims cut = {din, dout};
  return std::min(min_eigenvalue(m), min_eigenvalue(partial_transpose(m, cut, 0)));
}

bool pmqt_transform_ok(const RealMatrix& t, const GptShape& in, const GptShape& out, double tol) {
  Matrix j = transfer_to_choi(t, hilbert_dims(in), hilbert_dims(out));
  Superoperator s(party_factors(in, "i"), party_factors(out, "o"), std::move(j));
  return pmqt_contains(s, tol);
}

bool cpt_state_ok(const RealVector& v, const GptShape&, double tol) {
  return v.minCoeff() >= -tol && v.sum() <= 1.0 + tol;
}

bool cpt_effect_ok(const RealVector& v, const GptShape&, double tol) {
  return v.minCoeff() >= -tol && v.maxCoeff() <= 1.0 + tol;
}

bool cpt_transform_ok(const RealMatrix& t, const GptShape&, const GptShape&, double tol) {
  if (t.size() == 0) return true;
  if (t.minCoeff() < -tol) return false;
  return t.colwise().sum().maxCoeff() <= 1.0 + tol;
}

RealVector hs(const Matrix& m) { return operator_to_vector(m, {static_cast<int>(m.rows())}); }

RealVector hs2(const Matrix& m, int d) { return operator_to_vector(m, {d, d}); }

Vector basis_ket(int d, int k) {
  Vector v = Vector::Zero(d);
  v(k) = 1.0;
  return v;
}

Matrix projector(const Vector& v) {
  Vector u = v.normalized();
  return u * u.adjoint();
}

void add_quantum_generators(GptTheory& t, int d, bool ppt_only) {
  Vector plus = (basis_ket(d, 0) + basis_ket(d, 1 % d)) / std::sqrt(2.0);
  Vector plus_y = (basis_ket(d, 0) + Complex(0, 1) * basis_ket(d, 1 % d)) / std::sqrt(2.0);
  if (d == 1) plus = plus_y = basis_ket(1, 0);
  for (int k = 0; k < d; ++k) t.states.push_back({"|" + std::to_string(k) + "><" + std::to_string(k) + "|", hs(projector(basis_ket(d, k)))});
  t.states.push_back({"maximally_mixed", hs(Matrix::Identity(d, d) / static_cast<double>(d))});
  if (d > 1) {
    t.states.push_back({"|+><+|", hs(projector(plus))});
    t.states.push_back({"|+y><+y|", hs(projector(plus_y))});
  }
  t.effects.push_back({"unit", hs(Matrix::Identity(d, d))});
  for (int k = 0; k < d; ++k) t.effects.push_back({"P" + std::to_string(k), hs(projector(basis_ket(d, k)))});
  if (d > 1) {
    t.effects.push_back({"P+", hs(projector(plus))});
    t.effects.push_back({"P+y", hs(projector(plus_y))});
  }

  const int dd = d * d;
  Vector phi = Vector::Zero(dd);
  for (int k = 0; k < d; ++k) phi(k * d + k) = 1.0;
  Vector singlet = Vector::Zero(dd);
  if (d > 1) {
    singlet(0 * d + 1) = 1.0;
    singlet(1 * d + 0) = -1.0;
  }
  Matrix prod00 = projector(basis_ket(dd, 0));
  Matrix mixed = Matrix::Identity(dd, dd) / static_cast<double>(dd);
  Matrix unit2 = Matrix::Identity(dd, dd);
  t.bipartite_states.push_back({"|00><00|", hs2(prod00, d)});
  t.bipartite_states.push_back({"maximally_mixed", hs2(mixed, d)});
  t.bipartite_effects.push_back({"unit", hs2(unit2, d)});
  t.bipartite_effects.push_back({"P00", hs2(prod00, d)});
  if (d > 1) {
    Matrix plus_plus = kron(projector(plus), projector(plus));
    t.bipartite_states.push_back({"|++><++|", hs2(plus_plus, d)});
    t.bipartite_effects.push_back({"P++", hs2(plus_plus, d)});
  }
  if (ppt_only) {
    // Isotropic state at the PPT boundary, visibility 1/(d+1).
    double v = 1.0 / (d + 1.0);
    Matrix iso = v * projector(phi) + (1.0 - v) * mixed;
    t.bipartite_states.push_back({"isotropic_ppt_boundary", hs2(iso, d)});
  } else if (d > 1) {
    t.bipartite_states.push_back({"Phi+", hs2(projector(phi), d)});
    t.bipartite_states.push_back({"Psi-", hs2(projector(singlet), d)});
    t.bipartite_effects.push_back({"P_Phi+", hs2(projector(phi), d)});
    t.bipartite_effects.push_back({"P_Psi-", hs2(projector(singlet), d)});
  }
}

GptTheory quantum_family(const std::string& name, int dim) {
  if (dim < 1) throw ValidationError("theory dimension must be positive");
  GptTheory t;
  t.name = name + ":" + std::to_string(dim);
  t.system_param = dim;
  t.quantum_based = true;
  t.vdim_of = [](int d) { return d * d; };
  t.unit_of = [](int d) { return hs(Matrix::Identity(d, d)); };
  return t;
}

Superoperator dft_channel(int d) {
  Matrix f(d, d);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) f(j, k) = std::polar(1.0 / std::sqrt(d), 2.0 * pi * j * k / d);
  }
  return Superoperator::unitary({{"A", d}}, f);
}

RealMatrix real_kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

RealMatrix permutation_matrix(int n, const std::function<int(int)>& image) {
  RealMatrix p = RealMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) p(image(k), k) = 1.0;
  return p;
}

}  // namespace

GptSystem GptTheory::system(const std::string& id) const {
  return {id, vdim_of(system_param), unit_of(system_param)};
}

int GptTheory::vdim(const GptShape& shape) const {
  int n = 1;
  for (int p : shape) n *= vdim_of(p);
  return n;
}

RealVector GptTheory::unit(const GptShape& shape) const {
  RealMatrix u = RealMatrix::Ones(1, 1);
  for (int p : shape) u = real_kron(u, unit_of(p));
  return u.col(0);
}

RealMatrix kron_all(const std::vector<RealMatrix>& ms) {
  RealMatrix out = RealMatrix::Ones(1, 1);
  for (const auto& m : ms) out = real_kron(out, m);
  return out;
}

std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j) {
    Matrix m = Matrix::Zero(d, d);
    m(j, j) = 1.0;
    basis.push_back(m);
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = m(k, j) = r;
      basis.push_back(m);
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = Complex(0, r);
      m(k, j) = Complex(0, -r);
      basis.push_back(m);
    }
  }
  return basis;
}

std::vector<Matrix> composite_hermitian_basis(const Dims& dims) {
  std::vector<Matrix> out = {Matrix::Ones(1, 1)};
  for (int d : dims) {
    std::vector<Matrix> local = hermitian_basis(d);
    std::vector<Matrix> next;
    next.reserve(out.size() * local.size());
    for (const auto& a : out) {
      for (const auto& b : local) next.push_back(kron(a, b));
    }
    out = std::move(next);
  }
  return out;
}

RealVector operator_to_vector(const Matrix& o, const Dims& dims) {
  if (o.rows() != product(dims) || o.cols() != o.rows()) throw ShapeError("operator does not match dims");
  std::vector<Matrix> basis = composite_hermitian_basis(dims);
  RealVector v(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) v(k) = basis[k].transpose().cwiseProduct(o).sum().real();
  return v;
}

Matrix vector_to_operator(const RealVector& v, const Dims& dims) {
  std::vector<Matrix> basis = composite_hermitian_basis(dims);
  if (static_cast<std::size_t>(v.size()) != basis.size()) throw ShapeError("vector does not match dims");
  const int n = product(dims);
  Matrix o = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < basis.size(); ++k) o += v(k) * basis[k];
  return o;
}

RealMatrix superop_to_transfer(const Superoperator& s) {
  Dims din = s.in_dims();
  Dims dout = s.out_dims();
  std::vector<Matrix> bin = composite_hermitian_basis(din);
  std::vector<Matrix> bout = composite_hermitian_basis(dout);
  RealMatrix t(bout.size(), bin.size());
  for (std::size_t l = 0; l < bin.size(); ++l) {
    Matrix y = s.apply_matrix(bin[l]);
    for (std::size_t k = 0; k < bout.size(); ++k) t(k, l) = bout[k].transpose().cwiseProduct(y).sum().real();
  }
  return t;
}

Matrix transfer_to_choi(const RealMatrix& t, const Dims& in, const Dims& out) {
  std::vector<Matrix> bin = composite_hermitian_basis(in);
  std::vector<Matrix> bout = composite_hermitian_basis(out);
  if (t.rows() != static_cast<Eigen::Index>(bout.size()) || t.cols() != static_cast<Eigen::Index>(bin.size())) {
    throw ShapeError("transfer matrix does not match dims");
  }
  const int di = product(in);
  const int d_o = product(out);
  Matrix j = Matrix::Zero(di * d_o, di * d_o);
  for (std::size_t l = 0; l < bin.size(); ++l) {
    Matrix img = Matrix::Zero(d_o, d_o);
    for (std::size_t k = 0; k < bout.size(); ++k) {
      if (t(k, l) != 0.0) img += t(k, l) * bout[k];
    }
    j += kron(bin[l].transpose(), img);
  }
  return j;
}

bool pmqt_contains(const Superoperator& s, double tol) {
  ChannelFlags f = s.compute_flags(tol);
  if (!f.cp || !f.trace_nonincreasing) return false;
  const Matrix& j = s.choi();
  const int din = s.in_dim();
  const int dout = s.out_dim();
  if (eb_certified(j, din, dout, tol)) return true;
  Dims in = s.in_dims();
  Dims out = s.out_dims();
  if (in.size() != out.size() || in.empty()) return false;
  // Candidate party permutations with matching dimensions.
  std::vector<int> perm(in.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t k = 0; k < perm.size(); ++k) ok = ok && out[k] == in[perm[k]];
    if (!ok) continue;
    // Output factor k carries input factor perm[k].
    Matrix u = Matrix::Zero(dout, din);
    for (int x = 0; x < din; ++x) {
      std::vector<int> digits(in.size());
      int rem = x;
      for (int p = static_cast<int>(in.size()) - 1; p >= 0; --p) {
        digits[p] = rem % in[p];
        rem /= in[p];
      }
      int y = 0;
      for (std::size_t k = 0; k < out.size(); ++k) y = y * out[k] + digits[perm[k]];
      u(y, x) = 1.0;
    }
    Vector v = choi_vector(u);
    Matrix jp = v * v.adjoint();
    if (max_abs_diff(j, jp) <= tol) return true;
    // The PSD-and-PPT margin of J − p J_π is concave in p.
    auto margin = [&](double p) { return ppt_margin(j - p * jp, din, dout); };
    double lo = 0.0;
    double hi = 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
      double a = hi - phi * (hi - lo);
      double b = lo + phi * (hi - lo);
      if (margin(a) < margin(b)) {
        lo = a;
      } else {
        hi = b;
      }
    }
    double p = 0.5 * (lo + hi);
    if (margin(p) >= -tol && eb_certified(j - p * jp, din, dout, tol)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

GptTheory quantum_as_gpt(int dim) {
  GptTheory t = quantum_family("qt", dim);
  t.state_ok = quantum_state_ok;
  t.effect_ok = quantum_effect_ok;
  t.transform_ok = quantum_transform_ok;
  add_quantum_generators(t, dim, false);
  Factors a = {{"A", dim}};
  t.transforms.push_back({"identity", superop_to_transfer(Superoperator::identity(a))});
  t.transforms.push_back({"fourier", superop_to_transfer(dft_channel(dim))});
  return t;
}

GptTheory pmqt_theory(int dim) {
  GptTheory t = quantum_family("pmqt", dim);
  t.state_ok = quantum_state_ok;
  t.effect_ok = quantum_effect_ok;
  t.transform_ok = pmqt_transform_ok;
  add_quantum_generators(t, dim, false);
  Factors a = {{"A", dim}};
  t.transforms.push_back({"identity", superop_to_transfer(Superoperator::identity(a))});
  HermitianOperator zero = HermitianOperator::state(a, projector(basis_ket(dim, 0)));
  t.transforms.push_back({"discard_prepare_0", superop_to_transfer(Superoperator::trace_and_prepare(a, zero))});
  std::vector<Matrix> kraus;
  for (int k = 0; k < dim; ++k) kraus.push_back(basis_ket(dim, 0) * basis_ket(dim, k).adjoint());
  t.transforms.push_back({"measure_Z_prepare_0", superop_to_transfer(Superoperator::kraus(a, a, kraus))});
  return t;
}

GptTheory ppt_world(int dim) {
  GptTheory t = quantum_family("pptworld", dim);
  t.state_ok = ppt_state_ok;
  t.effect_ok = ppt_effect_ok;
  t.transform_ok = ppt_transform_ok;
  add_quantum_generators(t, dim, true);
  Factors a = {{"A", dim}};
  t.transforms.push_back({"identity", superop_to_transfer(Superoperator::identity(a))});
  t.transforms.push_back(
      {"conjugation", superop_to_transfer(Superoperator::transpose_sandwich(a, Matrix::Identity(dim, dim)))});
  return t;
}

GptTheory cpt_as_gpt(int card) {
  if (card < 1) throw ValidationError("classical cardinality must be positive");
  GptTheory t;
  t.name = "cpt:" + std::to_string(card);
  t.system_param = card;
  t.vdim_of = [](int c) { return c; };
  t.unit_of = [](int c) { return RealVector::Ones(c); };
  t.state_ok = cpt_state_ok;
  t.effect_ok = cpt_effect_ok;
  t.transform_ok = cpt_transform_ok;
  for (int k = 0; k < card; ++k) {
    RealVector v = RealVector::Unit(card, k);
    t.states.push_back({"point" + std::to_string(k), v});
    t.effects.push_back({"indicator" + std::to_string(k), v});
  }
  t.states.push_back({"uniform", RealVector::Constant(card, 1.0 / card)});
  t.effects.push_back({"unit", RealVector::Ones(card)});
  t.transforms.push_back({"identity", RealMatrix::Identity(card, card)});
  t.transforms.push_back({"shift", permutation_matrix(card, [card](int k) { return (k + 1) % card; })});
  t.transforms.push_back({"reset", permutation_matrix(card, [](int) { return 0; })});
  const int cc = card * card;
  RealVector diag = RealVector::Zero(cc);
  for (int k = 0; k < card; ++k) diag(k * card + k) = 1.0;
  t.bipartite_states.push_back({"point00", RealVector::Unit(cc, 0)});
  t.bipartite_states.push_back({"correlated", diag / card});
  t.bipartite_states.push_back({"uniform", RealVector::Constant(cc, 1.0 / cc)});
  t.bipartite_effects.push_back({"unit", RealVector::Ones(cc)});
  t.bipartite_effects.push_back({"equal", diag});
  t.bipartite_effects.push_back({"indicator00", RealVector::Unit(cc, 0)});
  return t;
}

GptTheory theory_from_name(const std::string& name) {
  auto colon = name.find(':');
  if (colon == std::string::npos) throw LabelError("theory name must look like family:dim, got '" + name + "'");
  std::string family = name.substr(0, colon);
  int dim = 0;
  try {
    std::size_t used = 0;
    dim = std::stoi(name.substr(colon + 1), &used);
    if (used != name.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw LabelError("bad dimension in theory name '" + name + "'");
  }
  if (dim < 1 || dim > 4) throw LabelError("theory dimension must be in 1..4, got " + std::to_string(dim));
  if (family == "qt") return quantum_as_gpt(dim);
  if (family == "cpt") return cpt_as_gpt(dim);
  if (family == "pmqt") return pmqt_theory(dim);
  if (family == "pptworld") return ppt_world(dim);
  throw LabelError("unknown theory family '" + family + "' (expected qt, cpt, pmqt, pptworld)");
}

void GptSymmetry::validate(const GptTheory& theory, double tol) const {
  const int n = group.order();
  if (static_cast<int>(action.size()) != n) throw ValidationError("symmetry needs one matrix per group element");
  const int v = theory.vdim_of(theory.system_param);
  for (const auto& f : action) {
    if (f.rows() != v || f.cols() != v) throw ShapeError("symmetry matrix does not match the system");
    if (Eigen::FullPivLU<RealMatrix>(f).rank() != v) throw ValidationError("symmetry matrix is not invertible");
  }
  if ((action[group.identity()] - RealMatrix::Identity(v, v)).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("identity element must act trivially");
  }
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if ((action[g] * action[h] - action[group.mul(g, h)]).cwiseAbs().maxCoeff() > tol) {
        throw ValidationError("symmetry is not a homomorphism");
      }
    }
  }
  for (const auto& f : action) {
    for (const auto& s : theory.states) {
      for (const auto& e : theory.effects) {
        if (std::abs((f * e.v).dot(f * s.v) - e.v.dot(s.v)) > tol) {
          throw ValidationError("symmetry does not preserve the probability of (" + e.name + ", " + s.name + ")");
        }
      }
    }
  }
}

GptSymmetry symmetry_from_rep(const std::string& name, const SymmetryRep& rep, int dim) {
  GptSymmetry sym;
  sym.name = name;
  sym.group = rep.group();
  SystemLabel a{"A", dim};
  for (int g = 0; g < rep.order(); ++g) sym.action.push_back(superop_to_transfer(superop_of(rep, a, g)));
  return sym;
}

GptSymmetry symmetry_from_name(const GptTheory& theory, const std::string& name) {
  GptSymmetry sym;
  if (theory.quantum_based) {
    const int d = theory.system_param;
    sym = symmetry_from_rep(name, preset_rep(name, {{"A", d}}), d);
  } else {
    const int c = theory.system_param;
    sym.name = name;
    if (name == "trivial") {
      sym.action = {RealMatrix::Identity(c, c)};
    } else if (name == "cyclic") {
      sym.group = FiniteGroup::cyclic(c);
      for (int g = 0; g < c; ++g) sym.action.push_back(permutation_matrix(c, [g, c](int k) { return (k + g) % c; }));
    } else {
      throw LabelError("unknown classical symmetry '" + name + "' (expected trivial, cyclic)");
    }
  }
  sym.validate(theory);
  return sym;
}

FiducialRepresentation fiducial_representation(const std::vector<HermitianOperator>& states,
                                               const std::vector<HermitianOperator>& fiducials,
                                               const std::vector<HermitianOperator>& others) {
  FiducialRepresentation out;
  const int k = static_cast<int>(fiducials.size());
  if (k == 0) throw ValidationError("fiducial set is empty");
  for (const auto& rho : states) {
    RealVector p(k);
    for (int i = 0; i < k; ++i) p(i) = born_probability(fiducials[i], rho);
    out.state_vectors.push_back(p);
  }
  for (int i = 0; i < k; ++i) out.fiducial_effect_vectors.push_back(RealVector::Unit(k, i));
  if (!others.empty()) {
    const Dims dims = fiducials.front().dims();
    RealMatrix a(product(dims) * product(dims), k);
    for (int i = 0; i < k; ++i) a.col(i) = operator_to_vector(fiducials[i].matrix(), dims);
    auto qr = a.colPivHouseholderQr();
    for (const auto& e : others) {
      if (e.dims() != dims) throw ShapeError("effect does not match the fiducial system");
      RealVector target = operator_to_vector(e.matrix(), dims);
      RealVector r = qr.solve(target);
      out.other_effect_vectors.push_back(r);
      out.residuals.push_back((a * r - target).norm());
    }
  }
  return out;
}

std::string class_name(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::kPhysical:
      return "physical";
    case SymmetryClass::kWeaklyNonphysical:
      return "weakly_nonphysical";
    case SymmetryClass::kStronglyNonphysical:
      return "strongly_nonphysical";
    case SymmetryClass::kIndeterminate:
      return "indeterminate";
  }
  return "unknown";
}

Classification classify_symmetry(const GptTheory& theory, const GptSymmetry& sym, double tol) {
  Classification out;
  const GptShape one = theory.elementary(1);
  const GptShape two = theory.elementary(2);
  std::vector<int> failing;
  for (int g = 0; g < sym.group.order(); ++g) {
    if (!theory.transform_ok(sym.action[g], one, one, tol)) failing.push_back(g);
  }
  if (failing.empty()) {
    out.verdict = SymmetryClass::kPhysical;
    return out;
  }
  out.nonphysical_element = failing.front();
  auto flag = [&](const std::string& what, std::optional<double> value) {
    if (out.verdict == SymmetryClass::kStronglyNonphysical) return;
    out.verdict = SymmetryClass::kStronglyNonphysical;
    out.witness = what;
    out.witness_value = value;
  };
  const int v = theory.vdim_of(theory.system_param);
  const RealMatrix id = RealMatrix::Identity(v, v);
  for (int g : failing) {
    const std::string fg = "F_" + std::to_string(g);
    for (const auto& s : theory.states) {
      RealVector moved = sym.action[g] * s.v;
      for (const auto& e : theory.effects) {
        double p = e.v.dot(moved);
        if (p < -tol || p > 1.0 + tol) flag("<" + e.name + ", " + fg + " " + s.name + ">", p);
      }
    }
    for (const auto& s : theory.bipartite_states) {
      for (int side = 0; side < 2; ++side) {
        RealMatrix partial = side == 0 ? real_kron(sym.action[g], id) : real_kron(id, sym.action[g]);
        std::string label = side == 0 ? fg + " (x) id" : "id (x) " + fg;
        out.probed.push_back(label + " on " + s.name);
        RealVector moved = partial * s.v;
        for (const auto& e : theory.bipartite_effects) {
          double p = e.v.dot(moved);
          if (p < -tol || p > 1.0 + tol) flag("<" + e.name + ", " + label + " " + s.name + ">", p);
        }
        if (!theory.state_ok(moved, two, tol)) flag(label + " maps " + s.name + " outside the state space", std::nullopt);
      }
    }
  }
  if (out.verdict != SymmetryClass::kStronglyNonphysical) {
    out.verdict = theory.bipartite_states.empty() ? SymmetryClass::kIndeterminate : SymmetryClass::kWeaklyNonphysical;
  }
  return out;
}

GptFrame classical_frame(const FiniteGroup& group) {
  GptFrame f;
  const int n = group.order();
  f.param = n;
  f.classical = true;
  for (int g = 0; g < n; ++g) {
    f.actions.push_back(permutation_matrix(n, [&group, g](int h) { return group.mul(g, h); }));
    f.states.push_back(RealVector::Unit(n, g));
  }
  return f;
}

GptFrame quantum_frame(const FiniteGroup& group) {
  GptFrame f;
  const int n = group.order();
  f.param = n;
  Factors r = {{"R", n}};
  std::vector<Matrix> reg = regular_representation(group);
  for (int g = 0; g < n; ++g) {
    f.actions.push_back(superop_to_transfer(Superoperator::unitary(r, reg[g])));
    f.states.push_back(hs(projector(basis_ket(n, g))));
  }
  return f;
}

RealMatrix collective_action(const GptSymmetry& sym, const GptFrame& frame, int parties, int g) {
  std::vector<RealMatrix> ms;
  for (int p = 0; p < parties; ++p) {
    ms.push_back(frame.actions[g]);
    ms.push_back(sym.action[g]);
  }
  return kron_all(ms);
}

namespace {

void check_frame(const GptSymmetry& sym, const GptFrame& frame, double tol) {
  const int n = sym.group.order();
  if (static_cast<int>(frame.states.size()) != n || static_cast<int>(frame.actions.size()) != n) {
    throw ValidationError("RF needs one state and one action per group element");
  }
  for (int g = 0; g < n; ++g) {
    if ((frame.actions[g] * frame.states[sym.group.identity()] - frame.states[g]).cwiseAbs().maxCoeff() > tol) {
      throw ValidationError("RF states are not the orbit of the fiducial");
    }
    for (int h = 0; h < n; ++h) {
      double want = g == h ? 1.0 : 0.0;
      double got = frame.states[g].dot(frame.states[h]);
      if (std::abs(got - want) > tol) {
        throw ValidationError("RF orbit is not orthogonal: <w_" + std::to_string(g) + ", w_" + std::to_string(h) +
                              "> = " + std::to_string(got));
      }
    }
  }
}

}  // namespace

DollarTResult dollar_T(const GptTheory& theory, const GptSymmetry& sym, const GptTransform& t,
                       const GptFrame& frame, double tol) {
  check_frame(sym, frame, tol);
  const int n = sym.group.order();
  const int v = theory.vdim_of(theory.system_param);
  for (int p : t.in) {
    if (p != theory.system_param) throw ShapeError("dollar_T parties must be elementary systems of the theory");
  }
  for (int p : t.out) {
    if (p != theory.system_param) throw ShapeError("dollar_T parties must be elementary systems of the theory");
  }
  if (t.matrix.rows() != theory.vdim(t.out) || t.matrix.cols() != theory.vdim(t.in)) {
    throw ShapeError("transform matrix does not match its shape");
  }
  DollarTResult res;
  res.classical_rf = frame.classical;
  if (frame.classical) res.note = "classical RF adjoined";
  Classification c = classify_symmetry(theory, sym, tol);
  if (c.verdict != SymmetryClass::kPhysical) {
    int g = *c.nonphysical_element;
    const RealVector& we = frame.states[sym.group.identity()];
    res.witness = real_kron(frame.states[g] * we.transpose(), sym.action[g]);
    res.witness_element = g;
    res.note = "F_" + std::to_string(g) + " is not a transformation of " + theory.name +
               "; the identity channel's image contains w_g (x) <w_e,.> (x) F_g";
    return res;
  }
  RealMatrix enc = RealMatrix::Zero(frame.vdim() * v, v);
  RealMatrix dec = RealMatrix::Zero(v, frame.vdim() * v);
  for (int g = 0; g < n; ++g) {
    RealMatrix wg = frame.states[g];
    enc += real_kron(wg, sym.action[g]);
    dec += real_kron(wg.transpose(), sym.action[g].inverse());
  }
  enc /= static_cast<double>(n);
  std::vector<RealMatrix> encs(t.out.size(), enc);
  std::vector<RealMatrix> decs(t.in.size(), dec);
  GptTransform img;
  for (std::size_t k = 0; k < t.in.size(); ++k) {
    img.in.push_back(frame.param);
    img.in.push_back(theory.system_param);
  }
  for (std::size_t k = 0; k < t.out.size(); ++k) {
    img.out.push_back(frame.param);
    img.out.push_back(theory.system_param);
  }
  img.matrix = kron_all(encs) * t.matrix * kron_all(decs);
  res.image = std::move(img);
  res.accepted = true;
  return res;
}

DollarTValidity check_dollar_T_image(const GptTheory& theory, const GptSymmetry& sym, const GptFrame& frame,
                                     const GptTransform& original, const GptTransform& image, double tol) {
  DollarTValidity out;
  const int n = sym.group.order();
  const int nin = static_cast<int>(original.in.size());
  const int nout = static_cast<int>(original.out.size());
  for (int g = 0; g < n; ++g) {
    RealMatrix lhs = collective_action(sym, frame, nout, g) * image.matrix;
    RealMatrix rhs = image.matrix * collective_action(sym, frame, nin, g);
    out.covariance_defect = std::max(out.covariance_defect, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  out.covariant = out.covariance_defect <= tol;
  // Blocks indexed by one group element per output and per input party.
  std::vector<RealMatrix> inv;
  for (const auto& f : sym.action) inv.push_back(f.inverse());
  const int total = nin + nout;
  std::vector<int> idx(total, 0);
  out.blocks_valid = true;
  while (true) {
    std::vector<RealMatrix> left;
    std::vector<RealMatrix> right;
    for (int k = 0; k < nout; ++k) left.push_back(sym.action[idx[k]]);
    for (int k = 0; k < nin; ++k) right.push_back(inv[idx[nout + k]]);
    RealMatrix block = kron_all(left) * original.matrix * kron_all(right);
    if (!theory.transform_ok(block, original.in, original.out, tol)) {
      out.blocks_valid = false;
      break;
    }
    int pos = 0;
    while (pos < total && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == total) break;
  }
  return out;
}

}  // namespace twirlkit
