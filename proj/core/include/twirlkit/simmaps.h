#pragma once

#include <map>
#include <string>

#include "twirlkit/symmetrize.h"

namespace twirlkit {

enum class MapKind { kDollar, kEuro, kDollarC };

std::string map_name(MapKind kind);
/// Accepts "dollar", "euro", "dollarC".
MapKind parse_map_kind(const std::string& name);

/// Explicit RF label per system id; unlisted systems get default_rf_label.
using RfAssignment = std::map<std::string, std::string>;
std::string default_rf_label(const std::string& system_id);

/// Applies a simulation map to states, effects, and channels.
///
/// Every factor on which the rep acts nontrivially gets its own RF system,
/// inserted immediately before it. The incoherent maps encode with
/// (1/|G|) Σ_g |g⟩⟨g| ⊗ 𝒜_g and decode with Σ_g 𝒜_g⁻¹(⟨g|·|g⟩); the coherent
/// map uses the coisometry K = |G|^{-1/2} Σ_g ⟨g| ⊗ U_g†.
class Simulator {
 public:
  Simulator(SymmetryRep rep, MapKind kind, RfAssignment labels = {});

  MapKind kind() const { return kind_; }
  const SymmetryRep& rep() const { return rep_; }

  bool needs_frame(const SystemLabel& system) const;
  std::string rf_label(const std::string& system_id) const;
  ReferenceFrame frame_for(const SystemLabel& system) const;
  /// Factors of an image: each nontrivial S becomes (R_S, S).
  Factors image_factors(const Factors& factors) const;
  /// The rep extended with an RF action for every nontrivial system in `factors`.
  SymmetryRep extended_rep(const Factors& factors) const;

  Superoperator map(const Superoperator& s) const;
  HermitianOperator map_state(const HermitianOperator& rho) const;
  /// Effect operator F with $(tr(E·)) = tr(F·).
  HermitianOperator map_effect(const HermitianOperator& e) const;
  Superoperator map_effect_functional(const HermitianOperator& e) const;

 private:
  Matrix encode_output(Matrix j, const Dims& in, Dims& out, int p, const SystemLabel& s) const;
  Matrix decode_input(Matrix j, Dims& in, const Dims& out, int p, const SystemLabel& s) const;

  SymmetryRep rep_;
  MapKind kind_;
  RfAssignment labels_;
};

HermitianOperator dollar_state(const SymmetryRep& rep, const HermitianOperator& rho,
                               const RfAssignment& labels = {});
Superoperator dollar_effect(const SymmetryRep& rep, const HermitianOperator& e,
                            const RfAssignment& labels = {});
Superoperator dollar_channel(const SymmetryRep& rep, const Superoperator& s,
                             const RfAssignment& labels = {});
HermitianOperator euro_state(const SymmetryRep& rep, const HermitianOperator& rho,
                             const RfAssignment& labels = {});
Superoperator euro_effect(const SymmetryRep& rep, const HermitianOperator& e,
                          const RfAssignment& labels = {});
Superoperator euro_channel(const SymmetryRep& rep, const Superoperator& s,
                           const RfAssignment& labels = {});
/// Time-reversal analogues; the rep must be the time-reversal preset (or any
/// Z2 rep whose nonidentity element is antilinear on every nontrivial system).
HermitianOperator dollarC_state(const SymmetryRep& rep, const HermitianOperator& rho,
                                const RfAssignment& labels = {});
HermitianOperator dollarC_effect(const SymmetryRep& rep, const HermitianOperator& e,
                                 const RfAssignment& labels = {});
Superoperator dollarC_channel(const SymmetryRep& rep, const Superoperator& s,
                              const RfAssignment& labels = {});

/// Real-linear action of the coherent time-reversal image of |0⟩⟨0| on the
/// RF-qubit-plus-qubit space, realified as an 8x8 real matrix.
struct NonlinearityWitness {
  RealMatrix realified;
  Vector image_of_00;
  Vector image_of_i00;
  bool complex_linear = true;
};
NonlinearityWitness euroC_nonlinearity_witness();

struct RelationalCheck {
  /// False when ρ is already invariant under 𝒰_g (the implication is vacuous).
  bool applicable = false;
  bool dollar_moved = false;
  bool euro_moved = false;

  bool holds() const { return !applicable || (dollar_moved && euro_moved); }
};
/// If ρ is moved by 𝒰_g then both $(ρ) and €(ρ) are moved by ℐ_R ⊗ 𝒰_g.
RelationalCheck relational_noninvariance_check(const SymmetryRep& rep, const HermitianOperator& rho,
                                               int g, double tol = kDefaultTol);

}  // namespace twirlkit
