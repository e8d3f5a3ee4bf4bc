#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twirlkit/symgroup.h"

namespace twirlkit {

/// Per-party system parameter: Hilbert dimension for quantum-based theories,
/// cardinality for classical ones.
using GptShape = std::vector<int>;

struct GptSystem {
  std::string id;
  int vdim = 1;
  RealVector unit_effect;
};

struct NamedVector {
  std::string name;
  RealVector v;
};

struct NamedMatrix {
  std::string name;
  RealMatrix m;
};

/// Finite-dimensional tomographically local GPT. Composites are Kronecker
/// products of the parties' vector spaces; probabilities are dot products.
struct GptTheory {
  std::string name;
  /// Parameter of the theory's elementary system.
  int system_param = 1;
  /// True when vectors are Hermitian operators in the HS-orthonormal basis.
  bool quantum_based = false;

  std::function<int(int)> vdim_of;
  std::function<RealVector(int)> unit_of;
  std::function<bool(const RealVector&, const GptShape&, double)> state_ok;
  std::function<bool(const RealVector&, const GptShape&, double)> effect_ok;
  std::function<bool(const RealMatrix&, const GptShape&, const GptShape&, double)> transform_ok;

  /// Generators on the elementary system.
  std::vector<NamedVector> states;
  std::vector<NamedVector> effects;
  std::vector<NamedMatrix> transforms;
  /// Generators on two elementary systems.
  std::vector<NamedVector> bipartite_states;
  std::vector<NamedVector> bipartite_effects;

  GptSystem system(const std::string& id) const;
  int vdim(const GptShape& shape) const;
  RealVector unit(const GptShape& shape) const;
  GptShape elementary(int parties) const { return GptShape(parties, system_param); }
};

/// HS-orthonormal Hermitian basis on ℂ^d: diagonal units, then symmetric and
/// antisymmetric off-diagonal pairs.
std::vector<Matrix> hermitian_basis(int d);
/// Kronecker products of the per-factor bases, in Kronecker index order.
std::vector<Matrix> composite_hermitian_basis(const Dims& dims);
RealVector operator_to_vector(const Matrix& o, const Dims& dims);
Matrix vector_to_operator(const RealVector& v, const Dims& dims);
/// T_kl = tr(σ_k ℰ(σ_l)) over the composite bases of the in and out factors.
RealMatrix superop_to_transfer(const Superoperator& s);
/// Choi matrix Σ_kl T_kl σ_lᵀ ⊗ σ_k of a transfer matrix.
Matrix transfer_to_choi(const RealMatrix& t, const Dims& in, const Dims& out);

GptTheory quantum_as_gpt(int dim);
GptTheory cpt_as_gpt(int card);
/// Quantum states and effects; transforms are mixtures of a party
/// permutation with an entanglement-breaking part.
GptTheory pmqt_theory(int dim);
/// PSD and PPT states and effects; transforms are CP trace-nonincreasing
/// maps, possibly after a partial conjugation of the inputs.
GptTheory ppt_world(int dim);
/// "qt:<d>", "cpt:<c>", "pmqt:<d>", "pptworld:<d>".
GptTheory theory_from_name(const std::string& name);

/// True when the convex hull of a party permutation and entanglement-breaking
/// channels certifiably contains the map (see pmqt_theory).
bool pmqt_contains(const Superoperator& s, double tol = kDefaultTol);

struct GptSymmetry {
  std::string name;
  FiniteGroup group = FiniteGroup::trivial();
  /// F_g on the elementary system.
  std::vector<RealMatrix> action;
  /// Checks invertibility, F_g F_h = F_gh, and inner-product preservation on
  /// the theory's generator state/effect pairs.
  void validate(const GptTheory& theory, double tol = kDefaultTol) const;
};

/// Symmetry induced by an (anti)unitary rep on a quantum-based theory.
GptSymmetry symmetry_from_rep(const std::string& name, const SymmetryRep& rep, int dim);
/// Named preset symmetry. Quantum-based theories take rep presets
/// ("trivial", "z2phase", "z3cyclic", "time-reversal", "conjugation");
/// classical ones take "trivial" and "cyclic".
GptSymmetry symmetry_from_name(const GptTheory& theory, const std::string& name);

struct FiducialRepresentation {
  std::vector<RealVector> state_vectors;
  std::vector<RealVector> fiducial_effect_vectors;
  std::vector<RealVector> other_effect_vectors;
  /// Frobenius distance from each non-fiducial effect to the fiducial span.
  std::vector<double> residuals;
};

/// States become their probability vectors over the fiducial effects; other
/// effects are regressed (least squares) onto the fiducial span.
FiducialRepresentation fiducial_representation(const std::vector<HermitianOperator>& states,
                                               const std::vector<HermitianOperator>& fiducials,
                                               const std::vector<HermitianOperator>& others = {});

enum class SymmetryClass { kPhysical, kWeaklyNonphysical, kStronglyNonphysical, kIndeterminate };
std::string class_name(SymmetryClass c);

struct Classification {
  SymmetryClass verdict = SymmetryClass::kIndeterminate;
  /// First element whose F_g fails the transform oracle, if any.
  std::optional<int> nonphysical_element;
  /// Generators probed in the partial-application test.
  std::vector<std::string> probed;
  /// Description and value of the first logical inconsistency found.
  std::string witness;
  std::optional<double> witness_value;
};

Classification classify_symmetry(const GptTheory& theory, const GptSymmetry& sym,
                                 double tol = kDefaultTol);

/// Transform between composites of parties (states have no inputs, effects
/// no outputs). matrix is vdim(out) × vdim(in). In a dollar_T image each
/// party is preceded by an RF entry holding the frame's parameter.
struct GptTransform {
  GptShape in;
  GptShape out;
  RealMatrix matrix;
};

/// RF system for $_T with orthogonal orbit ω_g = F_g(ω_e).
struct GptFrame {
  int param = 1;
  /// Classical RF adjoined to the theory rather than one of its own systems.
  bool classical = false;
  std::vector<RealVector> states;
  std::vector<RealMatrix> actions;
  int vdim() const { return static_cast<int>(states.front().size()); }
};

/// Classical RF: regular permutation action on a |G|-simplex.
GptFrame classical_frame(const FiniteGroup& group);
/// Quantum RF: regular representation on qt:|G| with |e⟩⟨e| fiducial.
GptFrame quantum_frame(const FiniteGroup& group);

struct DollarTResult {
  bool accepted = false;
  std::optional<GptTransform> image;
  /// For a nonphysical symmetry: the term ω_g ⊗ ⟨ω_e,·⟩ ⊗ F_g of the
  /// identity channel's image and the element g.
  std::optional<RealMatrix> witness;
  std::optional<int> witness_element;
  bool classical_rf = false;
  std::string note;
};

/// Incoherent simulation in a GPT: every party gets its own RF placed just
/// before it. Encoding (1/|G|) Σ_g ω_g ⊗ F_g, decoding Σ_g ⟨ω_g,·⟩ ⊗ F_g⁻¹.
DollarTResult dollar_T(const GptTheory& theory, const GptSymmetry& sym, const GptTransform& t,
                       const GptFrame& frame, double tol = kDefaultTol);

/// Collective action of g on `parties` (RF, party) pairs of a dollar_T image.
RealMatrix collective_action(const GptSymmetry& sym, const GptFrame& frame, int parties, int g);

struct DollarTValidity {
  /// F_g^out ∘ T = T ∘ F_g^in for all g.
  bool covariant = false;
  double covariance_defect = 0.0;
  /// Every classical-control block F_g ∘ T ∘ F_h⁻¹ passes the transform oracle.
  bool blocks_valid = false;
};
DollarTValidity check_dollar_T_image(const GptTheory& theory, const GptSymmetry& sym,
                                     const GptFrame& frame, const GptTransform& original,
                                     const GptTransform& image, double tol = kDefaultTol);

/// Real Kronecker product of a list of matrices.
RealMatrix kron_all(const std::vector<RealMatrix>& ms);

}  // namespace twirlkit
