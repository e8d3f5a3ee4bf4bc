#include "twirlkit/verification.h"

#include <cstdio>
#include <limits>

namespace twirlkit {

namespace {

std::vector<std::string> ids(const Factors& f) {
  std::vector<std::string> out;
  for (const auto& s : f) out.push_back(s.id);
  return out;
}

double choi_diff(const Superoperator& a, const Superoperator& b) {
  return max_abs_diff(a.choi(), b.reordered(ids(a.in_factors()), ids(a.out_factors())).choi());
}

Superoperator pad(const Superoperator& s, const Factors& extra) {
  return extra.empty() ? s : compose_par(s, Superoperator::identity(extra));
}

Factors missing(const Factors& from, const Factors& in) {
  Factors out;
  for (const auto& f : from) {
    if (index_of(in, f.id) < 0) out.push_back(f);
  }
  return out;
}

bool shares_wire(const Gate& a, const Gate& b) {
  for (const auto& w : a.in) {
    for (const auto& v : b.out) {
      if (w == v) return true;
    }
  }
  for (const auto& w : a.out) {
    for (const auto& v : b.in) {
      if (w == v) return true;
    }
  }
  return false;
}

/// tr(img(X)) = tr(X) for X supported on the vectors the coherent encoding
/// reaches: P (tr_out J)ᵀ P = P, with P the product over input systems S of
/// (1/|G|) Σ_g L_g ⊗ U_g on (R_S, S).
bool tp_on_invariant(const Simulator& sim, const SymmetryRep& ext, const Superoperator& orig,
                     const Superoperator& img, double tol) {
  const int din = img.in_dim();
  const int dout = img.out_dim();
  Matrix m = Matrix::Zero(din, din);
  for (int a = 0; a < din; ++a) {
    for (int b = 0; b < din; ++b) m(a, b) = img.choi().block(a * dout, b * dout, dout, dout).trace();
  }
  Matrix proj = Matrix::Identity(1, 1);
  for (const auto& f : orig.in_factors()) {
    if (!sim.needs_frame(f)) {
      proj = kron(proj, Matrix::Identity(f.dim, f.dim));
      continue;
    }
    SystemLabel rf = sim.frame_for(f).system;
    Matrix pair = Matrix::Zero(rf.dim * f.dim, rf.dim * f.dim);
    for (int g = 0; g < ext.order(); ++g) pair += kron(ext.local(rf, g).n, ext.local(f, g).n);
    proj = kron(proj, pair / static_cast<double>(ext.order()));
  }
  return max_abs_diff(proj * m.transpose() * proj, proj) <= tol;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

Simulator simulator_for(const Circuit& c, const std::string& rep_name, MapKind kind, RfAssignment labels) {
  return Simulator(preset_rep(rep_name, c.gpt_factors()), kind, std::move(labels));
}

double sequential_defect(const Simulator& sim, const Superoperator& s2, const Superoperator& s1) {
  Superoperator p1 = pad(s1, missing(s2.in_factors(), s1.out_factors()));
  Superoperator p2 = pad(s2, missing(s1.out_factors(), s2.in_factors()));
  return choi_diff(sim.map(compose_seq(p2, p1)), compose_seq(sim.map(p2), sim.map(p1)));
}

double parallel_defect(const Simulator& sim, const Superoperator& s1, const Superoperator& s2) {
  return choi_diff(sim.map(compose_par(s1, s2)), compose_par(sim.map(s1), sim.map(s2)));
}

SimulationReport verify_simulation(const Simulator& sim, const Circuit& c, double tol, bool functoriality) {
  if (!c.evaluable_ops()) throw ValidationError("every gate needs an op to verify a simulation");
  SimulationReport r;
  r.map = map_name(sim.kind());
  r.tol = tol;
  Circuit mapped = map_circuit(sim, c);
  r.statistics_max_error = max_distribution_diff(evaluate(c), evaluate(mapped));
  if (!r.statistics_ok()) r.failure_witness = "statistics differ by " + fmt(r.statistics_max_error);

  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& g : c.gates()) {
    const Superoperator& orig = *g.op;
    const Superoperator& img = *mapped.gate(g.id).op;
    GateImageCheck chk;
    chk.gate = g.id;
    chk.cp = img.is_cp(tol);
    SymmetryRep ext = sim.extended_rep(concat(orig.in_factors(), orig.out_factors()));
    // The coherent map is trace preserving on the invariant sector only.
    chk.tp = !orig.is_tp(tol) || (sim.kind() == MapKind::kEuro ? tp_on_invariant(sim, ext, orig, img, tol) : img.is_tp(tol));
    chk.member = sim.kind() == MapKind::kDollarC ? swirl_membership(ext, img, tol) : is_covariant(ext, img, tol);
    chk.min_eigenvalue = min_eigenvalue(img.choi());
    if (chk.min_eigenvalue < r.min_eigenvalue) {
      r.min_eigenvalue = chk.min_eigenvalue;
      r.min_eigenvalue_gate = g.id;
    }
    if (!chk.valid()) {
      r.all_valid = false;
      if (r.failure_witness.empty()) {
        r.failure_witness = "image of gate " + g.id + " is invalid (cp=" + (chk.cp ? "1" : "0") +
                            " tp=" + (chk.tp ? "1" : "0") + " member=" + (chk.member ? "1" : "0") +
                            ", min eigenvalue " + fmt(chk.min_eigenvalue) + ")";
      }
    }
    r.gates.push_back(std::move(chk));
  }
  if (c.gates().empty()) r.min_eigenvalue = 0.0;

  if (functoriality) {
    const auto& gates = c.gates();
    auto attempt = [&](auto&& f) {
      try {
        r.functoriality_max_error = std::max(r.functoriality_max_error, f());
        ++r.functoriality_checked;
      } catch (const ShapeError&) {
        ++r.functoriality_skipped;
      }
    };
    std::set<std::pair<int, int>> seq;
    for (const auto& w : c.wires()) {
      int p = c.producer(w.id);
      int q = c.consumer(w.id);
      if (p >= 0 && q >= 0) seq.insert({p, q});
    }
    for (const auto& [p, q] : seq) attempt([&] { return sequential_defect(sim, *gates[q].op, *gates[p].op); });
    for (std::size_t a = 0; a < gates.size(); ++a) {
      for (std::size_t b = a + 1; b < gates.size(); ++b) {
        if (shares_wire(gates[a], gates[b])) continue;
        attempt([&] { return parallel_defect(sim, *gates[a].op, *gates[b].op); });
      }
    }
    if (!r.functorial() && r.failure_witness.empty()) {
      r.failure_witness = "functoriality defect " + fmt(r.functoriality_max_error);
    }
  }
  return r;
}

}  // namespace twirlkit
