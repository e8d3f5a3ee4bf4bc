#include "twirlkit/symgroup.h"

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.h"
#include "twirlkit/random.h"

using namespace twirlkit;

namespace {

const Factors kA = {{"A", 2}};
const Factors kAB = {{"A", 2}, {"B", 2}};

Matrix act(const Superoperator& s, const Matrix& m) { return s.apply_matrix(m); }

}  // namespace

TEST(FiniteGroup, CyclicTables) {
  FiniteGroup z3 = FiniteGroup::cyclic(3);
  EXPECT_EQ(z3.order(), 3);
  EXPECT_EQ(z3.identity(), 0);
  EXPECT_EQ(z3.mul(1, 2), 0);
  EXPECT_EQ(z3.inverse(1), 2);
  EXPECT_EQ(FiniteGroup::trivial().order(), 1);
}

TEST(FiniteGroup, RejectsNonGroups) {
  EXPECT_THROW(FiniteGroup({{0, 1}, {1, 1}}), ValidationError);    // no inverse for 1
  EXPECT_THROW(FiniteGroup({{1, 0}, {0, 0}}), ValidationError);    // no identity
  EXPECT_THROW(FiniteGroup({{0, 1}, {1}}), ValidationError);       // ragged
  // A Latin square with identity that is not associative.
  std::vector<std::vector<int>> t = {
      {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  EXPECT_THROW(FiniteGroup{t}, ValidationError);
}

TEST(FiniteGroup, KleinFourIsAccepted) {
  FiniteGroup v({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
  for (int g = 0; g < 4; ++g) EXPECT_EQ(v.inverse(g), g);
}

TEST(SuperopOf, IdentityElement) {
  SymmetryRep rep = z2_phase_rep(kA);
  EXPECT_LT(max_abs_diff(superop_of(rep, kA[0], 0).choi(), Superoperator::identity(kA).choi()), 1e-15);
}

TEST(SuperopOf, TimeReversalConjugatesY) {
  SymmetryRep rep = time_reversal_rep(kA);
  EXPECT_LT(max_abs_diff(act(superop_of(rep, kA[0], 1), oracle::pauli('Y')), -oracle::pauli('Y')), 1e-15);
  EXPECT_LT(max_abs_diff(act(superop_of(rep, kA[0], 1), oracle::pauli('X')), oracle::pauli('X')), 1e-15);
}

TEST(SuperopOf, PhaseFlipMapsPlusToMinus) {
  SymmetryRep rep = z2_phase_rep(kA);
  Matrix plus = oracle::ket_bra(oracle::plus(), oracle::plus());
  Matrix minus = oracle::ket_bra(oracle::minus(), oracle::minus());
  EXPECT_LT(max_abs_diff(act(superop_of(rep, kA[0], 1), plus), minus), 1e-12);
  EXPECT_THROW(superop_of(rep, {"Q", 2}, 1), LabelError);
  EXPECT_THROW(superop_of(rep, kA[0], 5), LabelError);
}

TEST(Collective, SingleSystemAndTwoQubitPhase) {
  SymmetryRep rep = z2_phase_rep(kAB);
  EXPECT_LT(max_abs_diff(collective(rep, kA, 1).choi(), superop_of(rep, kA[0], 1).choi()), 1e-15);
  Matrix zz = oracle::kron_loops(oracle::pauli('Z'), oracle::pauli('Z'));
  Matrix rho = oracle::bell();
  EXPECT_LT(max_abs_diff(act(collective(rep, kAB, 1), rho), zz * rho * zz.adjoint()), 1e-12);
  EXPECT_LT(max_abs_diff(act(collective(rep, kAB, 1), rho), rho), 1e-12);
  EXPECT_THROW(collective(rep, {}, 0), LabelError);
}

TEST(Collective, TimeReversalFixesRealBell) {
  SymmetryRep rep = time_reversal_rep(kAB);
  EXPECT_LT(max_abs_diff(act(collective(rep, kAB, 1), oracle::bell()), oracle::bell()), 1e-12);
  Rng rng(1);
  Matrix rho = random_density(4, rng);
  EXPECT_LT(max_abs_diff(act(collective(rep, kAB, 1), rho), rho.conjugate()), 1e-12);
}

TEST(Collective, CommutesWithSwap) {
  Rng rng(2);
  Factors f = {{"A", 2}, {"B", 3}};
  SymmetryRep rep = z3_cyclic_rep(f);
  Matrix rho = random_density(6, rng);
  for (int g = 0; g < 3; ++g) {
    Matrix direct = act_collective(rep, f, g, rho);
    Factors swapped = {{"B", 3}, {"A", 2}};
    Matrix rho_sw = permute_factors(rho, {2, 3}, {1, 0});
    Matrix via = permute_factors(act_collective(rep, swapped, g, rho_sw), {3, 2}, {1, 0});
    EXPECT_LT(max_abs_diff(direct, via), 1e-12);
    EXPECT_LT(max_abs_diff(direct, collective(rep, f, g).apply_matrix(rho)), 1e-12);
  }
}

TEST(Relational, PhaseFlipOnSecondQubit) {
  SymmetryRep rep = z2_phase_rep(kAB);
  Superoperator r0 = relational(rep, kA, {{"B", 2}}, 0);
  EXPECT_LT(max_abs_diff(r0.choi(), Superoperator::identity(kAB).choi()), 1e-15);
  Superoperator r1 = relational(rep, kA, {{"B", 2}}, 1);
  Matrix out = act(r1, oracle::bell());
  EXPECT_LT(max_abs_diff(out, oracle::bell(-1.0)), 1e-12);
  EXPECT_NEAR((out * oracle::bell()).trace().real(), 0.0, 1e-12);
  EXPECT_THROW(relational(rep, kA, kA, 1), LabelError);
}

TEST(Relational, InvariantProductsAreFixed) {
  SymmetryRep rep = z2_phase_rep(kAB);
  Matrix inv_a = Matrix::Zero(2, 2);
  inv_a(0, 0) = 0.3;
  inv_a(1, 1) = 0.7;
  Matrix inv_b = Matrix::Identity(2, 2) / 2.0;
  Matrix prod = oracle::kron_loops(inv_a, inv_b);
  EXPECT_LT(max_abs_diff(act(relational(rep, kA, {{"B", 2}}, 1), prod), prod), 1e-12);
}

TEST(ReferenceFrame, RegularZ2AndZ3) {
  ReferenceFrame z2 = build_reference_frame(z2_phase_rep(kA), "R");
  EXPECT_EQ(z2.system.dim, 2);
  EXPECT_LT(max_abs_diff(z2.matrices[1], oracle::pauli('X')), 1e-15);
  EXPECT_LT(max_abs_diff(z2.frame_states[0], oracle::basis(2, 0)), 1e-15);
  EXPECT_LT(max_abs_diff(z2.frame_states[1], oracle::basis(2, 1)), 1e-15);
  ReferenceFrame z3 = build_reference_frame(z3_cyclic_rep(kA), "R");
  EXPECT_EQ(z3.system.dim, 3);
  // Cyclic shift |h⟩ ↦ |h+1⟩.
  Matrix shift = Matrix::Zero(3, 3);
  shift(1, 0) = shift(2, 1) = shift(0, 2) = 1.0;
  EXPECT_LT(max_abs_diff(z3.matrices[1], shift), 1e-15);
  EXPECT_LT(max_abs_diff(z3.gram(), Matrix::Identity(3, 3)), 1e-15);
  EXPECT_THROW(build_reference_frame(time_reversal_rep(kA), "R"), ValidationError);
}

TEST(ReferenceFrame, TimeReversalFrameIsOrthonormal) {
  ReferenceFrame rf = time_reversal_frame("R");
  EXPECT_LT(max_abs_diff(rf.gram(), Matrix::Identity(2, 2)), 1e-15);
  // |−y⟩⟨−y| is the conjugate of |+y⟩⟨+y|.
  Matrix p = oracle::ket_bra(rf.frame_states[0], rf.frame_states[0]);
  Matrix m = oracle::ket_bra(rf.frame_states[1], rf.frame_states[1]);
  EXPECT_LT(max_abs_diff(p.conjugate(), m), 1e-15);
  EXPECT_LT(max_abs_diff(p, oracle::ket_bra(oracle::plus_y(), oracle::plus_y())), 1e-15);
}

TEST(Validation, HomomorphismHoldsOnOperatorBasis) {
  // Direct check 𝒜_g(𝒜_h(E_ij)) = 𝒜_gh(E_ij) on the Z3 clock rep of a qutrit.
  SymmetryRep rep = z3_cyclic_rep({{"A", 3}});
  for (int g = 0; g < 3; ++g) {
    for (int h = 0; h < 3; ++h) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          Matrix e = Matrix::Zero(3, 3);
          e(i, j) = 1.0;
          Matrix lhs = act_collective(rep, {{"A", 3}}, g, act_collective(rep, {{"A", 3}}, h, e));
          Matrix rhs = act_collective(rep, {{"A", 3}}, rep.group().mul(g, h), e);
          EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
        }
      }
    }
  }
}

TEST(Validation, ProjectivePhasesAreAccepted) {
  // Pauli group mod phases: Z2 x Z2 on a qubit with {1, X, Z, XZ}.
  FiniteGroup v({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
  SystemAction a;
  a.system = {"A", 2};
  a.matrices = {oracle::pauli('I'), oracle::pauli('X'), oracle::pauli('Z'), oracle::pauli('X') * oracle::pauli('Z')};
  a.antilinear = {false, false, false, false};
  EXPECT_NO_THROW(SymmetryRep(v, {a}));
}

TEST(Validation, RejectsBrokenReps) {
  SystemAction bad;
  bad.system = {"A", 2};
  bad.matrices = {oracle::pauli('I'), oracle::pauli('X')};
  bad.antilinear = {false, false};
  // X on Z3 is not a homomorphism.
  SystemAction z3_bad = bad;
  z3_bad.matrices.push_back(oracle::pauli('X'));
  z3_bad.antilinear.push_back(false);
  EXPECT_THROW(SymmetryRep(FiniteGroup::cyclic(3), {z3_bad}), ValidationError);
  // Flags that are not a homomorphism: antilinear identity.
  SystemAction flag_bad = bad;
  flag_bad.antilinear = {true, false};
  EXPECT_THROW(SymmetryRep(FiniteGroup::cyclic(2), {flag_bad}), ValidationError);
  // Non-unitary matrix.
  SystemAction nonu = bad;
  nonu.matrices[1] = 2.0 * oracle::pauli('X');
  EXPECT_THROW(SymmetryRep(FiniteGroup::cyclic(2), {nonu}), ValidationError);
  // Antilinear X in Z2: (X conj)^2 = 1, valid.
  SystemAction anti = bad;
  anti.antilinear = {false, true};
  EXPECT_NO_THROW(SymmetryRep(FiniteGroup::cyclic(2), {anti}));
}

TEST(Validation, FlaggedElementsFormACoset) {
  SymmetryRep rep = time_reversal_rep(kAB);
  const FiniteGroup& g = rep.group();
  for (int a = 0; a < g.order(); ++a) {
    for (int b = 0; b < g.order(); ++b) {
      bool fa = rep.action("A").antilinear[a];
      bool fb = rep.action("A").antilinear[b];
      EXPECT_EQ(rep.action("A").antilinear[g.mul(a, b)], fa != fb);
    }
  }
}

TEST(Triviality, DetectsScalarActions) {
  SymmetryRep rep = z3_cyclic_rep(kA);
  EXPECT_FALSE(rep.acts_trivially(kA[0]));
  EXPECT_TRUE(rep.acts_trivially({"classical", 4}));
  EXPECT_TRUE(trivial_rep(kA, 3).acts_trivially(kA[0]));
  EXPECT_TRUE(z2_phase_rep({{"A", 1}}).acts_trivially({"A", 1}));
}

TEST(Presets, NamesResolve) {
  for (const auto& name : preset_rep_names()) EXPECT_NO_THROW(preset_rep(name, kAB));
  EXPECT_THROW(preset_rep("nope", kAB), LabelError);
  SymmetryRep z3 = preset_rep("z3cyclic", kA);
  Complex w = std::polar(1.0, 2 * std::numbers::pi / 3);
  EXPECT_LT(std::abs(z3.action("A").matrices[1](1, 1) - w), 1e-15);
}
