#include "twirlkit/gptcore.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.h"
#include "twirlkit/random.h"
#include "twirlkit/simmaps.h"

using namespace twirlkit;

namespace {

const Factors kA = {{"A", 2}};

RealVector vec1(const Matrix& m) { return operator_to_vector(m, {static_cast<int>(m.rows())}); }

double min_pt_eig(const Matrix& m) { return oracle::min_eig(oracle::transpose_second(m, 2, 2)); }

Matrix isotropic(double v) { return v * oracle::bell() + (1.0 - v) * Matrix::Identity(4, 4) / 4.0; }

}  // namespace

TEST(HermitianBasis, OrthonormalAndComplete) {
  for (int d = 1; d <= 3; ++d) {
    std::vector<Matrix> b = hermitian_basis(d);
    ASSERT_EQ(static_cast<int>(b.size()), d * d);
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_TRUE(is_hermitian(b[i]));
      for (std::size_t j = 0; j < b.size(); ++j) {
        EXPECT_NEAR(std::abs((b[i] * b[j]).trace()), i == j ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(HermitianBasis, RoundTripsAndTensorsLocally) {
  Rng rng(1);
  Matrix a = random_hermitian(2, rng);
  Matrix b = random_hermitian(3, rng);
  EXPECT_LT(max_abs_diff(vector_to_operator(vec1(a), {2}), a), 1e-12);
  RealVector ab = operator_to_vector(oracle::kron_loops(a, b), {2, 3});
  RealVector va = vec1(a);
  RealVector vb = vec1(b);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 9; ++j) EXPECT_NEAR(ab(i * 9 + j), va(i) * vb(j), 1e-12);
  }
}

TEST(Transfer, MatchesApplyAndRoundTripsThroughChoi) {
  Rng rng(2);
  Superoperator s = random_channel(kA, {{"B", 3}}, rng);
  RealMatrix t = superop_to_transfer(s);
  EXPECT_EQ(t.rows(), 9);
  EXPECT_EQ(t.cols(), 4);
  EXPECT_LT(max_abs_diff(transfer_to_choi(t, {2}, {3}), s.choi()), 1e-12);
  Matrix rho = random_density(2, rng);
  RealVector got = t * vec1(rho);
  EXPECT_LT((got - operator_to_vector(s.apply_matrix(rho), {3})).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(QuantumAsGpt, ShapeUnitAndBornRule) {
  GptTheory qt = quantum_as_gpt(2);
  EXPECT_EQ(qt.system("A").vdim, 4);
  EXPECT_LT((qt.unit({2}) - vec1(Matrix::Identity(2, 2))).cwiseAbs().maxCoeff(), 1e-15);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    Matrix rho = random_density(2, rng);
    Matrix e = random_effect(2, rng);
    double direct = (e * rho).trace().real();
    EXPECT_NEAR(vec1(e).dot(vec1(rho)), direct, 1e-12);
    EXPECT_TRUE(qt.state_ok(vec1(rho), {2}, kDefaultTol));
    EXPECT_TRUE(qt.effect_ok(vec1(e), {2}, kDefaultTol));
  }
  EXPECT_FALSE(qt.state_ok(vec1(oracle::pauli('Z')), {2}, kDefaultTol));
  EXPECT_FALSE(qt.effect_ok(vec1(2.0 * Matrix::Identity(2, 2)), {2}, kDefaultTol));
}

TEST(Theories, GeneratorsPassTheirOwnOraclesAndGiveProbabilities) {
  for (const std::string name : {"qt:2", "qt:3", "cpt:2", "cpt:3", "pmqt:2", "pptworld:2", "pptworld:3"}) {
    SCOPED_TRACE(name);
    GptTheory t = theory_from_name(name);
    GptShape one = t.elementary(1);
    GptShape two = t.elementary(2);
    for (const auto& s : t.states) {
      EXPECT_TRUE(t.state_ok(s.v, one, kDefaultTol)) << s.name;
      EXPECT_NEAR(t.unit(one).dot(s.v), 1.0, 1e-12) << s.name;
      for (const auto& e : t.effects) {
        double p = e.v.dot(s.v);
        EXPECT_GE(p, -1e-12);
        EXPECT_LE(p, 1.0 + 1e-12);
      }
    }
    for (const auto& e : t.effects) EXPECT_TRUE(t.effect_ok(e.v, one, kDefaultTol)) << e.name;
    for (const auto& m : t.transforms) EXPECT_TRUE(t.transform_ok(m.m, one, one, kDefaultTol)) << m.name;
    for (const auto& s : t.bipartite_states) {
      EXPECT_TRUE(t.state_ok(s.v, two, kDefaultTol)) << s.name;
      EXPECT_NEAR(t.unit(two).dot(s.v), 1.0, 1e-12);
      for (const auto& e : t.bipartite_effects) {
        double p = e.v.dot(s.v);
        EXPECT_GE(p, -1e-12);
        EXPECT_LE(p, 1.0 + 1e-12);
      }
    }
    for (const auto& e : t.bipartite_effects) EXPECT_TRUE(t.effect_ok(e.v, two, kDefaultTol)) << e.name;
  }
}

TEST(Theories, NameParsing) {
  EXPECT_EQ(theory_from_name("pmqt:2").name, "pmqt:2");
  EXPECT_THROW(theory_from_name("qt"), LabelError);
  EXPECT_THROW(theory_from_name("qt:x"), LabelError);
  EXPECT_THROW(theory_from_name("boxworld:2"), LabelError);
}

TEST(CptAsGpt, SimplexAndStochasticMatrices) {
  GptTheory c = cpt_as_gpt(2);
  EXPECT_EQ(c.system("A").vdim, 2);
  EXPECT_TRUE(c.state_ok(RealVector::Constant(2, 0.5), {2}, kDefaultTol));
  RealMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_TRUE(c.transform_ok(swap, {2}, {2}, kDefaultTol));
  EXPECT_TRUE(c.transform_ok(RealMatrix::Identity(2, 2), {2}, {2}, kDefaultTol));
  RealMatrix bad(2, 2);
  bad << 1, 0.5, 0.5, 0;
  EXPECT_FALSE(c.transform_ok(bad, {2}, {2}, kDefaultTol));
  EXPECT_FALSE(c.state_ok(RealVector::Constant(2, 0.6), {2}, kDefaultTol));
}

TEST(Pmqt, TransformOracle) {
  EXPECT_TRUE(pmqt_contains(Superoperator::identity(kA)));
  Matrix h = (oracle::pauli('X') + oracle::pauli('Z')) / std::sqrt(2.0);
  EXPECT_FALSE(pmqt_contains(Superoperator::unitary(kA, h)));
  EXPECT_FALSE(pmqt_contains(Superoperator::unitary(kA, oracle::pauli('Z'))));
  // Measure Z, reprepare |0⟩: Kraus |0⟩⟨k|.
  std::vector<Matrix> kraus = {oracle::ket_bra(oracle::basis(2, 0), oracle::basis(2, 0)),
                               oracle::ket_bra(oracle::basis(2, 0), oracle::basis(2, 1))};
  EXPECT_TRUE(pmqt_contains(Superoperator::kraus(kA, kA, kraus)));
  // Mixture of the identity with full depolarization: Choi pΦ + (1−p)𝟙/2.
  for (double p : {0.2, 0.5, 0.9}) {
    Matrix j = p * 2.0 * oracle::bell() + (1 - p) * Matrix::Identity(4, 4) / 2.0;
    EXPECT_TRUE(pmqt_contains(Superoperator(kA, kA, j))) << p;
  }
  // Two-qubit swap is a party permutation.
  Factors ab = {{"A", 2}, {"B", 2}};
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
  EXPECT_TRUE(pmqt_contains(Superoperator::unitary(ab, swap)));
  Rng rng(4);
  EXPECT_FALSE(pmqt_contains(Superoperator::unitary(kA, random_unitary(2, rng))));
}

TEST(PptWorld, StatesAndIsotropicThreshold) {
  GptTheory w = ppt_world(2);
  EXPECT_TRUE(w.state_ok(operator_to_vector(Matrix::Identity(4, 4) / 4.0, {2, 2}), {2, 2}, kDefaultTol));
  EXPECT_FALSE(w.state_ok(operator_to_vector(oracle::bell(), {2, 2}), {2, 2}, kDefaultTol));
  EXPECT_NEAR(min_pt_eig(oracle::bell()), -0.5, 1e-12);
  // Oracle threshold by bisection on the partial-transpose eigenvalue.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (min_pt_eig(isotropic(mid)) >= 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 1.0 / 3.0, 1e-12);
  for (double v : {0.0, 0.2, 1.0 / 3.0}) {
    EXPECT_TRUE(w.state_ok(operator_to_vector(isotropic(v), {2, 2}), {2, 2}, kDefaultTol)) << v;
  }
  for (double v : {0.34, 0.5, 0.9}) {
    EXPECT_FALSE(w.state_ok(operator_to_vector(isotropic(v), {2, 2}), {2, 2}, kDefaultTol)) << v;
  }
}

TEST(PptWorld, ConjugationIsATransformation) {
  GptTheory w = ppt_world(2);
  RealMatrix conj = superop_to_transfer(Superoperator::transpose_sandwich(kA, Matrix::Identity(2, 2)));
  EXPECT_TRUE(w.transform_ok(conj, {2}, {2}, kDefaultTol));
  EXPECT_FALSE(quantum_as_gpt(2).transform_ok(conj, {2}, {2}, kDefaultTol));
}

TEST(Fiducial, QubitExamplesAndStatistics) {
  auto eff = [](const Vector& v) { return HermitianOperator::effect(kA, oracle::ket_bra(v, v)); };
  std::vector<HermitianOperator> fid = {eff(oracle::plus()), eff(oracle::plus_y()), eff(oracle::basis(2, 0)),
                                        HermitianOperator::effect(kA, Matrix::Identity(2, 2))};
  Rng rng(5);
  std::vector<HermitianOperator> states = {
      HermitianOperator::state(kA, oracle::ket_bra(oracle::basis(2, 0), oracle::basis(2, 0))),
      HermitianOperator::state(kA, Matrix::Identity(2, 2) / 2.0)};
  for (int i = 0; i < 10; ++i) states.push_back(HermitianOperator::state(kA, random_density(2, rng)));
  std::vector<HermitianOperator> others;
  for (int i = 0; i < 10; ++i) others.push_back(HermitianOperator::effect(kA, random_effect(2, rng)));
  FiducialRepresentation rep = fiducial_representation(states, fid, others);
  RealVector want0(4);
  want0 << 0.5, 0.5, 1.0, 1.0;
  RealVector want_mixed(4);
  want_mixed << 0.5, 0.5, 0.5, 1.0;
  EXPECT_LT((rep.state_vectors[0] - want0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((rep.state_vectors[1] - want_mixed).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t k = 0; k < fid.size(); ++k) {
      EXPECT_NEAR(rep.fiducial_effect_vectors[k].dot(rep.state_vectors[s]),
                  (fid[k].matrix() * states[s].matrix()).trace().real(), 1e-9);
    }
    for (std::size_t k = 0; k < others.size(); ++k) {
      EXPECT_LT(rep.residuals[k], 1e-9);
      EXPECT_NEAR(rep.other_effect_vectors[k].dot(rep.state_vectors[s]),
                  (others[k].matrix() * states[s].matrix()).trace().real(), 1e-9);
    }
  }
}

TEST(Fiducial, IncompleteSetReportsResidual) {
  std::vector<HermitianOperator> fid = {HermitianOperator::effect(kA, Matrix::Identity(2, 2))};
  HermitianOperator p0 = HermitianOperator::effect(kA, oracle::ket_bra(oracle::basis(2, 0), oracle::basis(2, 0)));
  FiducialRepresentation rep = fiducial_representation({}, fid, {p0});
  EXPECT_GT(rep.residuals[0], 0.5);
}

TEST(Classify, HeadlineVerdicts) {
  GptTheory qt = quantum_as_gpt(2);
  Classification c1 = classify_symmetry(qt, symmetry_from_name(qt, "time-reversal"));
  EXPECT_EQ(c1.verdict, SymmetryClass::kStronglyNonphysical);
  ASSERT_TRUE(c1.witness_value.has_value());
  EXPECT_NEAR(*c1.witness_value, -0.5, 1e-12);
  EXPECT_FALSE(c1.probed.empty());

  GptTheory pm = pmqt_theory(2);
  Classification c2 = classify_symmetry(pm, symmetry_from_name(pm, "z2phase"));
  EXPECT_EQ(c2.verdict, SymmetryClass::kWeaklyNonphysical);
  EXPECT_EQ(c2.nonphysical_element, 1);

  GptTheory ppt = ppt_world(2);
  EXPECT_EQ(classify_symmetry(ppt, symmetry_from_name(ppt, "conjugation")).verdict, SymmetryClass::kPhysical);
}

TEST(Classify, OtherCombinations) {
  GptTheory qt = quantum_as_gpt(2);
  EXPECT_EQ(classify_symmetry(qt, symmetry_from_name(qt, "z2phase")).verdict, SymmetryClass::kPhysical);
  EXPECT_EQ(classify_symmetry(qt, symmetry_from_name(qt, "z3cyclic")).verdict, SymmetryClass::kPhysical);
  GptTheory pm = pmqt_theory(2);
  EXPECT_EQ(classify_symmetry(pm, symmetry_from_name(pm, "time-reversal")).verdict,
            SymmetryClass::kStronglyNonphysical);
  EXPECT_EQ(classify_symmetry(pm, symmetry_from_name(pm, "trivial")).verdict, SymmetryClass::kPhysical);
  GptTheory c = cpt_as_gpt(3);
  EXPECT_EQ(classify_symmetry(c, symmetry_from_name(c, "cyclic")).verdict, SymmetryClass::kPhysical);
}

TEST(Classify, MissingBipartiteGeneratorsIsIndeterminate) {
  GptTheory qt = quantum_as_gpt(2);
  qt.bipartite_states.clear();
  qt.bipartite_effects.clear();
  EXPECT_EQ(classify_symmetry(qt, symmetry_from_name(qt, "time-reversal")).verdict, SymmetryClass::kIndeterminate);
}

TEST(Classify, OrderInvariantAndMonotone) {
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry tr = symmetry_from_name(qt, "time-reversal");
  Rng rng(6);
  for (int i = 0; i < 5; ++i) {
    GptTheory shuffled = qt;
    std::shuffle(shuffled.bipartite_states.begin(), shuffled.bipartite_states.end(), rng);
    std::shuffle(shuffled.bipartite_effects.begin(), shuffled.bipartite_effects.end(), rng);
    EXPECT_EQ(classify_symmetry(shuffled, tr).verdict, SymmetryClass::kStronglyNonphysical);
  }
  // Nested generator sets: once strongly nonphysical, supersets stay so.
  GptTheory nested = qt;
  nested.bipartite_states.clear();
  nested.bipartite_effects = qt.bipartite_effects;
  bool seen_strong = false;
  for (const auto& s : qt.bipartite_states) {
    nested.bipartite_states.push_back(s);
    bool strong = classify_symmetry(nested, tr).verdict == SymmetryClass::kStronglyNonphysical;
    if (seen_strong) EXPECT_TRUE(strong);
    seen_strong = seen_strong || strong;
  }
  EXPECT_TRUE(seen_strong);
  // A physical verdict does not depend on generators at all.
  GptTheory ppt = ppt_world(2);
  GptSymmetry conj = symmetry_from_name(ppt, "conjugation");
  ppt.bipartite_states.clear();
  EXPECT_EQ(classify_symmetry(ppt, conj).verdict, SymmetryClass::kPhysical);
}

TEST(Symmetry, ValidationRejectsNonHomomorphism) {
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry s = symmetry_from_name(qt, "z2phase");
  s.action[1] = 2.0 * s.action[1];
  EXPECT_THROW(s.validate(qt), ValidationError);
}

TEST(DollarT, TrivialSymmetryIsIdentity) {
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry triv = symmetry_from_name(qt, "trivial");
  Rng rng(7);
  GptTransform t{{2}, {2}, superop_to_transfer(random_channel(kA, kA, rng))};
  DollarTResult r = dollar_T(qt, triv, t, quantum_frame(triv.group));
  ASSERT_TRUE(r.accepted);
  EXPECT_LT((r.image->matrix - t.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DollarT, MatchesQuantumDollarUnderIsomorphism) {
  Rng rng(8);
  GptTheory qt = quantum_as_gpt(2);
  for (const std::string name : {"z2phase", "z3cyclic"}) {
    SCOPED_TRACE(name);
    GptSymmetry sym = symmetry_from_name(qt, name);
    GptFrame frame = quantum_frame(sym.group);
    Factors ab = {{"A", 2}, {"B", 2}};
    SymmetryRep rep = preset_rep(name, concat(ab, {{"C", 2}}));
    Simulator sim(rep, MapKind::kDollar);
    // Bipartite channel, state, effect.
    Superoperator ch = random_channel({{"A", 2}}, {{"B", 2}, {"C", 2}}, rng);
    DollarTResult r = dollar_T(qt, sym, {{2}, {2, 2}, superop_to_transfer(ch)}, frame);
    ASSERT_TRUE(r.accepted);
    EXPECT_LT((r.image->matrix - superop_to_transfer(sim.map(ch))).cwiseAbs().maxCoeff(), 1e-9);

    HermitianOperator rho = HermitianOperator::state(kA, random_density(2, rng));
    RealMatrix sv = vec1(rho.matrix());
    DollarTResult rs = dollar_T(qt, sym, {{}, {2}, sv}, frame);
    HermitianOperator img = sim.map_state(rho);
    EXPECT_LT((rs.image->matrix.col(0) - operator_to_vector(img.matrix(), img.dims())).cwiseAbs().maxCoeff(), 1e-9);

    HermitianOperator e = HermitianOperator::effect(kA, random_effect(2, rng));
    RealMatrix ev = vec1(e.matrix()).transpose();
    DollarTResult re = dollar_T(qt, sym, {{2}, {}, ev}, frame);
    HermitianOperator eimg = sim.map_effect(e);
    EXPECT_LT((re.image->matrix.row(0).transpose() - operator_to_vector(eimg.matrix(), eimg.dims()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
  }
}

TEST(DollarT, PreservesStatisticsAndIsCovariant) {
  Rng rng(9);
  struct Case {
    std::string theory;
    std::string sym;
    bool classical;
  };
  for (const Case& c : {Case{"qt:2", "z2phase", false}, Case{"qt:2", "z3cyclic", true},
                        Case{"pptworld:2", "conjugation", true}, Case{"cpt:3", "cyclic", true}}) {
    SCOPED_TRACE(c.theory + " " + c.sym);
    GptTheory t = theory_from_name(c.theory);
    GptSymmetry sym = symmetry_from_name(t, c.sym);
    GptFrame frame = c.classical ? classical_frame(sym.group) : quantum_frame(sym.group);
    const int p = t.system_param;
    for (int i = 0; i < 5; ++i) {
      RealMatrix tm;
      RealVector s;
      RealVector e;
      if (t.quantum_based) {
        tm = superop_to_transfer(random_channel({{"A", p}}, {{"B", p}}, rng));
        s = vec1(random_density(p, rng));
        e = vec1(random_effect(p, rng));
      } else {
        tm = RealMatrix::Zero(p, p);
        for (int col = 0; col < p; ++col) {
          std::vector<double> w = random_probabilities(p, rng);
          for (int row = 0; row < p; ++row) tm(row, col) = w[row];
        }
        std::vector<double> w = random_probabilities(p, rng);
        s = Eigen::Map<RealVector>(w.data(), p);
        e = RealVector::Random(p).cwiseAbs();
      }
      GptTransform tt{{p}, {p}, tm};
      DollarTResult rt = dollar_T(t, sym, tt, frame);
      DollarTResult rs = dollar_T(t, sym, {{}, {p}, RealMatrix(s)}, frame);
      DollarTResult re = dollar_T(t, sym, {{p}, {}, RealMatrix(e.transpose())}, frame);
      ASSERT_TRUE(rt.accepted && rs.accepted && re.accepted);
      EXPECT_EQ(rt.classical_rf, c.classical);
      double want = e.dot(tm * s);
      double got = (re.image->matrix * rt.image->matrix * rs.image->matrix)(0, 0);
      EXPECT_NEAR(got, want, 1e-9);
      DollarTValidity v = check_dollar_T_image(t, sym, frame, tt, *rt.image);
      EXPECT_TRUE(v.covariant) << v.covariance_defect;
      EXPECT_TRUE(v.blocks_valid);
      // Images of states are invariant under the collective action.
      for (int g = 0; g < sym.group.order(); ++g) {
        RealMatrix moved = collective_action(sym, frame, 1, g) * rs.image->matrix;
        EXPECT_LT((moved - rs.image->matrix).cwiseAbs().maxCoeff(), 1e-9);
      }
    }
  }
}

TEST(DollarT, NonphysicalSymmetryRejectedWithWitness) {
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry tr = symmetry_from_name(qt, "time-reversal");
  GptFrame frame = classical_frame(tr.group);
  GptTransform id{{2}, {2}, RealMatrix::Identity(4, 4)};
  DollarTResult r = dollar_T(qt, tr, id, frame);
  EXPECT_FALSE(r.accepted);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness_element, 1);
  RealMatrix want = kron_all({RealMatrix(frame.states[1] * frame.states[0].transpose()), tr.action[1]});
  EXPECT_LT((*r.witness - want).cwiseAbs().maxCoeff(), 1e-15);
  // The witness term is not a transformation of the theory.
  EXPECT_FALSE(qt.transform_ok(tr.action[1], {2}, {2}, kDefaultTol));
}

TEST(DollarT, NonOrthogonalFrameRejected) {
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry sym = symmetry_from_name(qt, "z2phase");
  GptFrame frame = quantum_frame(sym.group);
  frame.states[1] = frame.states[0];
  frame.actions[1] = RealMatrix::Identity(frame.vdim(), frame.vdim());
  EXPECT_THROW(dollar_T(qt, sym, {{2}, {2}, RealMatrix::Identity(4, 4)}, frame), ValidationError);
}
