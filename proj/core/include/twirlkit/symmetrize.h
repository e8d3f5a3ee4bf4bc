#pragma once

#include "twirlkit/symgroup.h"

namespace twirlkit {

/// (1/|G|) Σ_g 𝒜_g(o) over the collective action on o's factors.
HermitianOperator twirl_operator(const SymmetryRep& rep, const HermitianOperator& o);
/// (1/|G|) Σ_g 𝒜_g ∘ s ∘ 𝒜_g⁻¹ with collective actions on inputs and outputs.
Superoperator twirl_superop(const SymmetryRep& rep, const Superoperator& s);

/// Largest entrywise deviation max_g |𝒜_g(o) − o|.
double invariance_defect(const SymmetryRep& rep, const HermitianOperator& o);
/// Largest Choi deviation max_g |J(𝒜_g∘s) − J(s∘𝒜_g)|.
double covariance_defect(const SymmetryRep& rep, const Superoperator& s);

bool is_invariant(const SymmetryRep& rep, const HermitianOperator& o, double tol = kDefaultTol);
bool is_covariant(const SymmetryRep& rep, const Superoperator& s, double tol = kDefaultTol);

/// Choi of 𝒜_g^out ∘ s (collective on all output factors).
Matrix choi_after_action(const SymmetryRep& rep, const Superoperator& s, int g);
/// Choi of s ∘ 𝒜_g^in (collective on all input factors).
Matrix choi_before_action(const SymmetryRep& rep, const Superoperator& s, int g);

/// Matrix of o in the product basis of c: B† O B.
Matrix in_basis(const ConjugationOp& c, const HermitianOperator& o);
/// Choi of s with input and output expressed in the bases of c.
Matrix choi_in_basis(const ConjugationOp& c, const Superoperator& s);

bool is_rqt_operator(const HermitianOperator& o, const ConjugationOp& basis = {},
                     double tol = kDefaultTol);
bool is_rqt_channel(const Superoperator& s, const ConjugationOp& basis = {},
                    double tol = kDefaultTol);
/// (s ⊗ id_probe)(σ) is real for every real symmetric basis element σ on
/// in ⊗ probe, all in the bases of c.
bool is_completely_real_preserving(const Superoperator& s, int probe_dim,
                                   const ConjugationOp& basis = {}, double tol = kDefaultTol);

/// Membership in the world swirled by an (anti)unitary rep.
bool swirl_membership(const SymmetryRep& rep, const HermitianOperator& o, double tol = kDefaultTol);
bool swirl_membership(const SymmetryRep& rep, const Superoperator& s, double tol = kDefaultTol);

/// The conjugation bases of a time-reversal rep, as a ConjugationOp.
ConjugationOp conjugation_of(const SymmetryRep& rep);

}  // namespace twirlkit
