#include "twirlkit/simmaps.h"

#include <cmath>

namespace twirlkit {

std::string map_name(MapKind kind) {
  switch (kind) {
    case MapKind::kDollar:
      return "dollar";
    case MapKind::kEuro:
      return "euro";
    case MapKind::kDollarC:
      return "dollarC";
  }
  return "unknown";
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "dollar") return MapKind::kDollar;
  if (name == "euro") return MapKind::kEuro;
  if (name == "dollarC") return MapKind::kDollarC;
  throw LabelError("unknown simulation map '" + name + "' (expected dollar, euro, dollarC)");
}

std::string default_rf_label(const std::string& system_id) { return "R_" + system_id; }

Simulator::Simulator(SymmetryRep rep, MapKind kind, RfAssignment labels)
    : rep_(std::move(rep)), kind_(kind), labels_(std::move(labels)) {
  if (kind_ == MapKind::kDollarC) {
    if (rep_.order() != 2) throw ValidationError("dollarC needs a two-element time-reversal group");
    for (const auto& id : rep_.system_ids()) {
      const SystemAction& a = rep_.action(id);
      if (a.system.dim > 1 && !a.antilinear[1 - rep_.group().identity()]) {
        throw ValidationError("dollarC needs the nonidentity element to be antilinear on '" + id + "'");
      }
    }
  } else if (rep_.has_antilinear()) {
    throw ValidationError(map_name(kind_) + " needs a unitary representation");
  }
}

bool Simulator::needs_frame(const SystemLabel& system) const { return !rep_.acts_trivially(system); }

std::string Simulator::rf_label(const std::string& system_id) const {
  auto it = labels_.find(system_id);
  return it == labels_.end() ? default_rf_label(system_id) : it->second;
}

ReferenceFrame Simulator::frame_for(const SystemLabel& system) const {
  std::string id = rf_label(system.id);
  return kind_ == MapKind::kDollarC ? time_reversal_frame(id) : build_reference_frame(rep_, id);
}

Factors Simulator::image_factors(const Factors& factors) const {
  Factors out;
  for (const auto& f : factors) {
    if (needs_frame(f)) out.push_back(frame_for(f).system);
    out.push_back(f);
  }
  validate_factors(out);
  return out;
}

SymmetryRep Simulator::extended_rep(const Factors& factors) const {
  SymmetryRep ext = rep_;
  for (const auto& f : factors) {
    if (!needs_frame(f)) continue;
    ReferenceFrame rf = frame_for(f);
    if (rep_.has_system(rf.system.id)) throw LabelError("RF label '" + rf.system.id + "' collides with a system");
    ext = ext.with_system(rf.action());
  }
  return ext;
}

Matrix Simulator::encode_output(Matrix j, const Dims& in, Dims& out, int p, const SystemLabel& s) const {
  ReferenceFrame rf = frame_for(s);
  const int n = rep_.order();
  const int dr = rf.system.dim;
  Matrix acc;
  if (kind_ == MapKind::kEuro) {
    Matrix k_adj = Matrix::Zero(dr * s.dim, s.dim);
    for (int g = 0; g < n; ++g) k_adj += kron(rf.frame_states[g], rep_.local(s, g).n);
    k_adj /= std::sqrt(static_cast<double>(n));
    acc = choi_after_local(j, in, out, p, k_adj, false);
  } else {
    for (int g = 0; g < n; ++g) {
      LocalAction a = rep_.local(s, g);
      Matrix term = choi_after_local(j, in, out, p, kron(rf.frame_states[g], a.n), a.transpose);
      if (acc.size() == 0) {
        acc = std::move(term);
      } else {
        acc += term;
      }
    }
    acc /= static_cast<double>(n);
  }
  out[p] *= dr;
  return acc;
}

Matrix Simulator::decode_input(Matrix j, Dims& in, const Dims& out, int p, const SystemLabel& s) const {
  ReferenceFrame rf = frame_for(s);
  const int n = rep_.order();
  const int dr = rf.system.dim;
  Matrix acc;
  if (kind_ == MapKind::kEuro) {
    Matrix k = Matrix::Zero(s.dim, dr * s.dim);
    for (int g = 0; g < n; ++g) {
      k += kron(rf.frame_states[g].adjoint(), rep_.local(s, g).n.adjoint());
    }
    k /= std::sqrt(static_cast<double>(n));
    acc = choi_before_local(j, in, out, p, k, false);
  } else {
    for (int g = 0; g < n; ++g) {
      LocalAction a = rep_.local(s, rep_.group().inverse(g));
      Matrix row = a.transpose ? Matrix(rf.frame_states[g].transpose()) : Matrix(rf.frame_states[g].adjoint());
      Matrix term = choi_before_local(j, in, out, p, kron(row, a.n), a.transpose);
      if (acc.size() == 0) {
        acc = std::move(term);
      } else {
        acc += term;
      }
    }
  }
  in[p] *= dr;
  return acc;
}

Superoperator Simulator::map(const Superoperator& s) const {
  Factors in_img = image_factors(s.in_factors());
  Factors out_img = image_factors(s.out_factors());
  Matrix j = s.choi();
  Dims in = s.in_dims();
  Dims out = s.out_dims();
  for (std::size_t p = 0; p < s.in_factors().size(); ++p) {
    if (!needs_frame(s.in_factors()[p])) continue;
    check_dim_cap(static_cast<std::size_t>(product(in)) * frame_for(s.in_factors()[p]).system.dim,
                  "simulation image input");
    j = decode_input(std::move(j), in, out, static_cast<int>(p), s.in_factors()[p]);
  }
  for (std::size_t p = 0; p < s.out_factors().size(); ++p) {
    if (!needs_frame(s.out_factors()[p])) continue;
    check_dim_cap(static_cast<std::size_t>(product(out)) * frame_for(s.out_factors()[p]).system.dim,
                  "simulation image output");
    j = encode_output(std::move(j), in, out, static_cast<int>(p), s.out_factors()[p]);
  }
  return Superoperator(std::move(in_img), std::move(out_img), std::move(j));
}

HermitianOperator Simulator::map_state(const HermitianOperator& rho) const {
  Superoperator img = map(Superoperator::from_state(rho));
  return HermitianOperator(img.out_factors(), img.choi());
}

HermitianOperator Simulator::map_effect(const HermitianOperator& e) const {
  Superoperator img = map_effect_functional(e);
  return HermitianOperator(img.in_factors(), img.choi().transpose());
}

Superoperator Simulator::map_effect_functional(const HermitianOperator& e) const {
  return map(Superoperator::from_effect(e));
}

namespace {

Simulator sim(const SymmetryRep& rep, MapKind kind, const RfAssignment& labels) {
  return Simulator(rep, kind, labels);
}

}  // namespace

HermitianOperator dollar_state(const SymmetryRep& rep, const HermitianOperator& rho, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollar, labels).map_state(rho);
}
Superoperator dollar_effect(const SymmetryRep& rep, const HermitianOperator& e, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollar, labels).map_effect_functional(e);
}
Superoperator dollar_channel(const SymmetryRep& rep, const Superoperator& s, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollar, labels).map(s);
}
HermitianOperator euro_state(const SymmetryRep& rep, const HermitianOperator& rho, const RfAssignment& labels) {
  return sim(rep, MapKind::kEuro, labels).map_state(rho);
}
Superoperator euro_effect(const SymmetryRep& rep, const HermitianOperator& e, const RfAssignment& labels) {
  return sim(rep, MapKind::kEuro, labels).map_effect_functional(e);
}
Superoperator euro_channel(const SymmetryRep& rep, const Superoperator& s, const RfAssignment& labels) {
  return sim(rep, MapKind::kEuro, labels).map(s);
}
HermitianOperator dollarC_state(const SymmetryRep& rep, const HermitianOperator& rho, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollarC, labels).map_state(rho);
}
HermitianOperator dollarC_effect(const SymmetryRep& rep, const HermitianOperator& e, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollarC, labels).map_effect(e);
}
Superoperator dollarC_channel(const SymmetryRep& rep, const Superoperator& s, const RfAssignment& labels) {
  return sim(rep, MapKind::kDollarC, labels).map(s);
}

NonlinearityWitness euroC_nonlinearity_witness() {
  // Frame part |+y⟩⟨+y| ⊗ ρ + |−y⟩⟨−y| ⊗ ρ̄ for ρ = |0⟩⟨0|, then the
  // projector ½(𝟙 + C_R ⊗ C_A) onto vectors fixed by joint conjugation.
  // |±y⟩⟨±y| = (𝟙 ± Y)/2 written out so every entry is exact.
  Matrix plus_y(2, 2);
  plus_y << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  Matrix frame_part = kron(plus_y, rho) + kron(plus_y.conjugate(), rho.conjugate());
  const int n = 4;
  RealMatrix x(2 * n, 2 * n);
  x << frame_part.real(), -frame_part.imag(), frame_part.imag(), frame_part.real();
  RealMatrix conj = RealMatrix::Identity(2 * n, 2 * n);
  conj.bottomRightCorner(n, n) *= -1.0;
  NonlinearityWitness w;
  w.realified = 0.5 * (RealMatrix::Identity(2 * n, 2 * n) + conj) * x;

  auto apply = [&](const Vector& v) {
    RealVector r(2 * n);
    r << v.real(), v.imag();
    RealVector out = w.realified * r;
    Vector c(n);
    for (int k = 0; k < n; ++k) c(k) = Complex(out(k), out(n + k));
    return c;
  };
  Vector v00 = Vector::Zero(n);
  v00(0) = 1.0;
  w.image_of_00 = apply(v00);
  w.image_of_i00 = apply(Complex(0, 1) * v00);
  // Complex-linear iff the realified map commutes with multiplication by i.
  RealMatrix mul_i = RealMatrix::Zero(2 * n, 2 * n);
  mul_i.topRightCorner(n, n) = -RealMatrix::Identity(n, n);
  mul_i.bottomLeftCorner(n, n) = RealMatrix::Identity(n, n);
  w.complex_linear = (w.realified * mul_i - mul_i * w.realified).cwiseAbs().maxCoeff() <= kDefaultTol;
  return w;
}

RelationalCheck relational_noninvariance_check(const SymmetryRep& rep, const HermitianOperator& rho, int g,
                                               double tol) {
  RelationalCheck out;
  Matrix moved = act_collective(rep, rho.factors(), g, rho.matrix());
  out.applicable = max_abs_diff(moved, rho.matrix()) > tol;
  if (!out.applicable) return out;
  auto moved_by_relational = [&](MapKind kind) {
    Simulator s(rep, kind);
    HermitianOperator img = s.map_state(rho);
    std::vector<bool> mask;
    for (const auto& f : img.factors()) mask.push_back(rep.has_system(f.id));
    Matrix shifted = act_on(rep, img.factors(), mask, g, img.matrix());
    return max_abs_diff(shifted, img.matrix()) > tol;
  };
  out.dollar_moved = moved_by_relational(MapKind::kDollar);
  out.euro_moved = moved_by_relational(MapKind::kEuro);
  return out;
}

}  // namespace twirlkit
