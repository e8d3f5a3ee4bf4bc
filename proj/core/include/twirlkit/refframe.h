#pragma once

#include <vector>

#include "twirlkit/random.h"
#include "twirlkit/symmetrize.h"

namespace twirlkit {

/// Relational probes of a bipartite state ρ on (R1, R2): the first factor is
/// held fixed and the group acts on the second.

/// Largest entry of τ − (ℐ ⊗ 𝒰_g)(τ) over g ≠ e, with τ the collective twirl of ρ.
double relational_defect(const SymmetryRep& rep, const HermitianOperator& rho);
/// Hilbert-Schmidt overlap tr(τ (ℐ ⊗ 𝒰_g)(τ)) with τ the collective twirl of ρ.
double relational_overlap(const SymmetryRep& rep, const HermitianOperator& rho, int g);

/// The twirled state is moved by the relational action of some g ≠ e.
bool is_shared_rf_state(const SymmetryRep& rep, const HermitianOperator& rho, double tol = kDefaultTol);
/// Every g ≠ e takes the twirled state to an orthogonal state. Requires a
/// shared RF state (a fixed state is never orthogonal to itself).
bool is_perfect_shared_rf(const SymmetryRep& rep, const HermitianOperator& rho, double tol = kDefaultTol);

/// For an invariant ρ, largest entry of (ℐ ⊗ 𝒰_g)(ρ) − (𝒰_{g⁻¹} ⊗ ℐ)(ρ) over g.
double representation_choice_defect(const SymmetryRep& rep, const HermitianOperator& rho);

struct ShareBatteryReport {
  int samples = 0;
  /// Separable samples classified as shared RF states (0 expected).
  int positives = 0;
  /// Largest relational defect over the separable samples.
  double max_violation = 0.0;
  /// Largest collective-invariance defect of the samples (they are twirled-world states).
  double max_invariance_defect = 0.0;
  /// Largest representation-choice defect over the samples.
  double max_representation_defect = 0.0;
  /// Maximally entangled control on the same pair.
  bool control_shared = false;
  bool control_perfect = false;

  bool passed() const { return positives == 0 && control_shared; }
};

/// Random mixtures Σ p_i ρ_i ⊗ σ_i of invariant local states on `pair`
/// (exactly two systems of the rep), 1 to 4 terms each.
ShareBatteryReport separable_share_battery(const SymmetryRep& rep, const Factors& pair, int samples, Rng& rng,
                                         double tol = kDefaultTol);

/// (|00⟩ + ... + |d−1,d−1⟩)/√d on the pair.
HermitianOperator maximally_entangled(const Factors& pair);

}  // namespace twirlkit
