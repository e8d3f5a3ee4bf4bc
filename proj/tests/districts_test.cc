#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.h"
#include "twirlkit/districts.h"
#include "twirlkit/presets.h"

namespace twirlkit {
namespace {

using Names = std::set<std::string>;

Names gate_set(const District& d) { return Names(d.gates.begin(), d.gates.end()); }

const District& district_with(const std::vector<District>& ds, const std::string& gate) {
  for (const auto& d : ds) {
    if (gate_set(d).count(gate)) return d;
  }
  throw std::runtime_error("no district holds " + gate);
}

/// The fragment with the full circuit's ops restored; pruned copy gates get a
/// fresh fan-out onto their surviving branches.
Circuit fragment_circuit(const District& d, const Circuit& full) {
  std::vector<Gate> gates = d.fragment.gates();
  for (auto& g : gates) {
    if (g.kind == GateKind::kCopy) {
      Factors outs;
      for (const auto& w : g.out) outs.push_back(d.fragment.wire(w).label());
      g.op = classical_copy(d.fragment.wire(g.in[0]).label(), outs);
    } else {
      g.op = full.gate(g.id).op;
    }
  }
  return Circuit(d.fragment.wires(), std::move(gates));
}

std::map<std::string, int> assignment(const Distribution& p, int r, int c) {
  std::map<std::string, int> v;
  std::vector<int> iv = decode_index(r, p.input_cards);
  std::vector<int> ov = decode_index(c, p.output_cards);
  for (std::size_t k = 0; k < iv.size(); ++k) v[p.inputs[k]] = iv[k];
  for (std::size_t k = 0; k < ov.size(); ++k) v[p.outputs[k]] = ov[k];
  return v;
}

double lookup(const Distribution& f, const std::map<std::string, int>& v) {
  std::vector<int> o;
  std::vector<int> i;
  for (const auto& name : f.outputs) o.push_back(v.at(name));
  for (const auto& name : f.inputs) i.push_back(v.at(name));
  return f.prob(o, i);
}

/// Largest gap between P and the product of the separately evaluated district
/// fragments: an evaluation route that never looks at P's marginals.
double fragment_product_error(const Circuit& full) {
  Distribution p = evaluate(full);
  std::vector<Distribution> parts;
  for (const auto& d : districts(structure_of(full))) parts.push_back(evaluate(fragment_circuit(d, full)));
  double err = 0.0;
  for (int r = 0; r < p.input_count(); ++r) {
    for (int c = 0; c < p.output_count(); ++c) {
      auto v = assignment(p, r, c);
      double prod = 1.0;
      for (const auto& f : parts) prod *= lookup(f, v);
      err = std::max(err, std::abs(prod - p.table(r, c)));
    }
  }
  return err;
}

TEST(Districts, BigCircuitPartitionMatchesFigure) {
  Preset p = preset("bigcircuit");
  auto ds = districts(p.structure);
  ASSERT_EQ(ds.size(), 3u);
  const District& d1 = district_with(ds, "S1");
  EXPECT_EQ(gate_set(d1), (Names{"S1", "g2", "g3", "g6", "g7", "g8"}));
  EXPECT_EQ(d1.outputs, (Names{"A", "B", "C"}));
  EXPECT_EQ(d1.inputs, (Names{"F", "H"}));
  EXPECT_EQ(d1.reconnected, (Names{"B"}));
  const District& d2 = district_with(ds, "g9");
  EXPECT_EQ(gate_set(d2), (Names{"g9"}));
  EXPECT_EQ(d2.outputs, (Names{"F"}));
  EXPECT_EQ(d2.inputs, (Names{"G"}));
  EXPECT_TRUE(d2.latent_wires.empty());
  const District& d3 = district_with(ds, "S2");
  EXPECT_EQ(gate_set(d3), (Names{"S2", "g13", "g14"}));
  EXPECT_EQ(d3.outputs, (Names{"D", "E"}));
  EXPECT_EQ(d3.inputs, (Names{"B", "C"}));
  EXPECT_TRUE(d3.reconnected.empty());
  // Two fragments carry latent systems; the classical singleton does not.
  int latent = 0;
  for (const auto& d : ds) latent += d.latent_wires.empty() ? 0 : 1;
  EXPECT_EQ(latent, 2);
  // The copy of B inside the first fragment keeps its open branch and the
  // branch into g8, and drops the branch into g13.
  const Gate& cb = d1.fragment.gate("copyB");
  EXPECT_EQ(cb.out, (std::vector<std::string>{"B.out", "B.8"}));
  EXPECT_FALSE(d3.fragment.has_wire("B"));
  EXPECT_TRUE(d3.fragment.has_wire("B.13"));
}

TEST(Districts, DoubleBellSplitsIntoTwoBellScenarios) {
  auto ds = districts(preset("dbell").structure);
  ASSERT_EQ(ds.size(), 2u);
  const District& a = district_with(ds, "S1");
  EXPECT_EQ(gate_set(a), (Names{"S1", "g4", "g6"}));
  EXPECT_EQ(a.inputs, (Names{"B", "D"}));
  EXPECT_EQ(a.outputs, (Names{"C", "E"}));
  const District& b = district_with(ds, "S2");
  EXPECT_EQ(gate_set(b), (Names{"S2", "g3", "g5"}));
  EXPECT_EQ(b.inputs, (Names{"A", "C"}));
  EXPECT_EQ(b.outputs, (Names{"B", "D"}));
  // Each fragment is a Bell-type structure: one source, two measurements.
  for (const auto& d : ds) {
    int states = 0;
    for (const auto& g : d.fragment.gates()) states += g.kind == GateKind::kState ? 1 : 0;
    EXPECT_EQ(states, 1);
  }
}

TEST(Districts, PartitionInvariantsOnEveryPreset) {
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    CausalStructure cs = preset(name).structure;
    auto ds = districts(cs);
    Names seen;
    Names outputs;
    for (const auto& d : ds) {
      for (const auto& g : d.gates) EXPECT_TRUE(seen.insert(g).second);
      for (const auto& v : d.outputs) EXPECT_TRUE(outputs.insert(v).second);
      for (const auto& v : d.inputs) EXPECT_FALSE(d.outputs.count(v));
      for (const auto& v : d.reconnected) {
        EXPECT_TRUE(d.outputs.count(v));
        EXPECT_FALSE(d.inputs.count(v));
      }
    }
    Names expected_gates;
    Names produced;
    for (const auto& g : cs.gates()) {
      bool junction = g.kind == GateKind::kCopy && cs.wire(g.in[0]).observed();
      if (junction) continue;
      expected_gates.insert(g.id);
      for (const auto& w : g.out) {
        if (cs.wire(w).observed()) produced.insert(cs.wire(w).var());
      }
    }
    EXPECT_EQ(seen, expected_gates);
    EXPECT_EQ(outputs, produced);
    // Every latent wire joins two gates of one district.
    for (const auto& w : cs.wires()) {
      if (w.observed() || cs.producer(w.id) < 0 || cs.consumer(w.id) < 0) continue;
      const District& d = district_with(ds, cs.gates()[cs.producer(w.id)].id);
      EXPECT_TRUE(gate_set(d).count(cs.gates()[cs.consumer(w.id)].id)) << w.id;
    }
  }
}

TEST(Districts, RootVariableFollowsCopies) {
  CausalStructure cs = preset("bigcircuit").structure;
  EXPECT_EQ(root_variable(cs, "B.13"), "B");
  EXPECT_EQ(root_variable(cs, "F.8"), "F");
  EXPECT_EQ(root_variable(cs, "G"), "G");
}

TEST(Districts, FactorizationHoldsOnEveryPresetCircuit) {
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    Preset p = preset(name);
    ASSERT_TRUE(p.circuit.has_value());
    Distribution dist = evaluate(*p.circuit);
    DistrictFactorization f = district_factorization_check(p.structure, dist);
    EXPECT_TRUE(f.factorizes) << f.max_error;
    EXPECT_LE(f.max_error, 1e-9);
    EXPECT_EQ(f.factors.size(), districts(p.structure).size());
  }
}

TEST(Districts, FragmentProductOracleAgreesWithCircuit) {
  for (const auto& name : {"bigcircuit", "dbell", "bilocality", "evans"}) {
    SCOPED_TRACE(name);
    EXPECT_LE(fragment_product_error(*preset(name).circuit), 1e-10);
  }
}

TEST(Districts, FactorsEqualFragmentDistributions) {
  Preset p = preset("bigcircuit");
  Distribution dist = evaluate(*p.circuit);
  auto ds = districts(p.structure);
  DistrictFactorization f = district_factorization_check(p.structure, dist);
  ASSERT_EQ(f.factors.size(), ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    Distribution frag = evaluate(fragment_circuit(ds[k], *p.circuit));
    const Distribution& q = f.factors[k];
    double err = 0.0;
    for (int r = 0; r < q.input_count(); ++r) {
      for (int c = 0; c < q.output_count(); ++c) {
        auto v = assignment(q, r, c);
        err = std::max(err, std::abs(lookup(frag, v) - q.table(r, c)));
      }
    }
    EXPECT_LE(err, 1e-9) << k;
  }
}

TEST(Districts, CorrelationAcrossDistrictsIsRejected) {
  // E copies the open input A; A reaches E only through the other district's
  // outputs, which are uniform.
  CausalStructure cs = preset("dbell").structure;
  Distribution p;
  p.inputs = {"A"};
  p.input_cards = {2};
  p.outputs = {"B", "C", "D", "E"};
  p.output_cards = {2, 2, 2, 2};
  p.table = RealMatrix::Zero(2, 16);
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 16; ++c) {
      if (decode_index(c, p.output_cards)[3] == a) p.table(a, c) = 1.0 / 8;
    }
  }
  DistrictFactorization f = district_factorization_check(cs, p);
  EXPECT_FALSE(f.factorizes);
  // Any product of the two factors leaves E independent of A, so some entry
  // misses by at least half of 1/8.
  EXPECT_GE(f.max_error, 1.0 / 16 - 1e-12);
}

TEST(Districts, ChshCorrelationsFactorizeTriviallyInOneDistrict) {
  Preset p = preset("bell");
  Distribution dist = evaluate(*p.circuit);
  EXPECT_NEAR(chsh_value(dist), 2 * std::sqrt(2.0), 1e-9);
  DistrictFactorization f = district_factorization_check(p.structure, dist);
  ASSERT_EQ(f.factors.size(), 1u);
  EXPECT_LE(max_distribution_diff(f.factors[0], dist), 1e-12);
}

TEST(Districts, MissingObservedOutputIsAValidationError) {
  CausalStructure cs = preset("dbell").structure;
  Distribution p;
  p.inputs = {"A"};
  p.input_cards = {2};
  p.outputs = {"B"};
  p.output_cards = {2};
  p.table = RealMatrix::Constant(2, 2, 0.5);
  EXPECT_THROW(district_factorization_check(cs, p), ValidationError);
}

TEST(Gap, VerdictsMatchStructureMetadata) {
  for (const auto& name : preset_names()) {
    Preset p = preset(name);
    if (p.metadata.expected_verdict.empty()) continue;
    SCOPED_TRACE(name);
    GapReport r = gap_necessary_conditions(p.structure, p.metadata);
    EXPECT_EQ(r.verdict(), p.metadata.expected_verdict);
  }
}

TEST(Gap, ReasonsPerStructure) {
  GapReport bell = gap_necessary_conditions(preset("bell").structure, preset("bell").metadata);
  ASSERT_EQ(bell.districts.size(), 1u);
  EXPECT_EQ(bell.districts[0].shared_rf_possible, true);
  EXPECT_EQ(bell.districts[0].shared_rf_ancestor, "S");

  GapReport tri = gap_necessary_conditions(preset("triangle").structure, preset("triangle").metadata);
  ASSERT_EQ(tri.districts.size(), 1u);
  EXPECT_EQ(tri.districts[0].shared_rf_possible, false);
  EXPECT_FALSE(tri.excluded);

  // Algebraic with independent sources: only the algebraic condition fires.
  GapReport mod = gap_necessary_conditions(preset("evansmod").structure, preset("evansmod").metadata);
  EXPECT_TRUE(mod.excluded);
  EXPECT_FALSE(mod.districts[0].excluded);

  GapReport cj = gap_necessary_conditions(preset("cjbilo").structure, preset("cjbilo").metadata);
  ASSERT_EQ(cj.districts.size(), 1u);
  EXPECT_FALSE(cj.districts[0].unrestricted);
  EXPECT_FALSE(cj.districts[0].shared_rf_possible.has_value());
  EXPECT_FALSE(cj.excluded);
  // The same structure declared algebraic is still not excluded: the flag
  // only applies when no gate restricts its influence.
  StructureMetadata alg = preset("cjbilo").metadata;
  alg.algebraic = true;
  EXPECT_FALSE(gap_necessary_conditions(preset("cjbilo").structure, alg).excluded);

  GapReport db = gap_necessary_conditions(preset("dbell").structure, preset("dbell").metadata);
  ASSERT_EQ(db.districts.size(), 2u);
  EXPECT_TRUE(db.districts[0].excluded && db.districts[1].excluded);

  GapReport big = gap_necessary_conditions(preset("bigcircuit").structure, preset("bigcircuit").metadata);
  ASSERT_EQ(big.districts.size(), 3u);
  EXPECT_TRUE(big.excluded);
  EXPECT_EQ(district_with(districts(preset("bigcircuit").structure), "g9").latent_wires.size(), 0u);
}

TEST(Presets, CjBilocalityRestrictsInfluenceLikeBilocality) {
  Preset cj = preset("cjbilo");
  Preset bilo = preset("bilo");
  auto observed_pairs = [](const CausalStructure& cs) {
    std::set<WirePair> out;
    for (const auto& pr : influence_closure(cs)) {
      if (cs.wire(pr.first).observed() && cs.wire(pr.second).observed()) out.insert(pr);
    }
    return out;
  };
  auto cj_pairs = observed_pairs(cj.structure);
  EXPECT_FALSE(cj_pairs.count({"X", "B"}));
  EXPECT_TRUE(cj_pairs.count({"X", "A"}));
  EXPECT_EQ(cj_pairs, observed_pairs(bilo.structure));
  // The middle gate's op honours its declared relation.
  const Gate& m = cj.circuit->gate("gB");
  EXPECT_TRUE(check_no_influence(m, {"qm"}, {"qc"}));
  // The outcome alone is uniform for any input; jointly with qc it is not.
  EXPECT_TRUE(check_no_influence(m, {"qm"}, {"B"}));
  EXPECT_FALSE(check_no_influence(m, {"qm"}, {"B", "qc"}));
  EXPECT_TRUE(m.op->is_cp());
  EXPECT_TRUE(m.op->is_tp());
  // Entanglement swapping through the middle gate reproduces the bilocal
  // Bell-state-measurement statistics exactly.
  Distribution pc = evaluate(*cj.circuit);
  Distribution pb = evaluate(*bilo.circuit);
  EXPECT_LE(max_distribution_diff(pc, pb), 1e-12);
  EXPECT_NEAR(pb.prob({0, 0, 0}, {0, 0}), 1.0 / 8, 1e-12);
}

TEST(Presets, AliasesAndUnknownNames) {
  EXPECT_LE(max_distribution_diff(evaluate(*preset("chsh").circuit), evaluate(*preset("bell").circuit)), 0.0);
  EXPECT_EQ(districts(preset("bilo").structure).size(), 1u);
  EXPECT_THROW(preset("nope"), LabelError);
}

TEST(Presets, RandomCompatibleCircuitsAreValidAndSeeded) {
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    Preset p = preset(name);
    for (const auto& g : p.circuit->gates()) {
      ASSERT_TRUE(g.op.has_value()) << g.id;
      EXPECT_TRUE(g.op->is_cp()) << g.id;
      EXPECT_TRUE(g.op->is_tp()) << g.id;
    }
    Distribution d = evaluate(*p.circuit);
    for (int r = 0; r < d.input_count(); ++r) EXPECT_NEAR(d.table.row(r).sum(), 1.0, 1e-10);
    EXPECT_GE(d.table.minCoeff(), -1e-12);
    EXPECT_EQ(evaluate(*preset(name).circuit).to_text(), d.to_text());
  }
}

TEST(Presets, RandomCompatibleCircuitsHonourDeclaredNoInfluence) {
  Rng rng(77);
  for (const auto& name : preset_names()) {
    SCOPED_TRACE(name);
    Preset p = preset(name);
    for (int s = 0; s < 3; ++s) {
      Circuit c = random_compatible_circuit(p.structure, rng);
      for (const auto& g : c.gates()) {
        EXPECT_TRUE(g.op->is_cp() && g.op->is_tp()) << g.id;
        for (const auto& [i, o] : g.no_influence) EXPECT_TRUE(check_no_influence(g, {i}, {o})) << g.id;
      }
      Distribution d = evaluate(c);
      EXPECT_LT(district_factorization_check(p.structure, d).max_error, 1e-9);
    }
  }
}

}  // namespace
}  // namespace twirlkit
