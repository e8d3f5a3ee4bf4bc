#include "twirlkit/presets.h"

#include <cmath>
#include <map>
#include <set>

namespace twirlkit {

namespace {

class Builder {
 public:
  void gpt(const std::string& id, int dim = 2) { wires_.push_back(Wire{id, WireKind::kGptLatent, dim, ""}); }
  void obs(const std::string& id, int card = 2, const std::string& var = "") {
    wires_.push_back(Wire{id, WireKind::kClassicalObserved, card, var});
  }
  void gate(const std::string& id, std::vector<std::string> in, std::vector<std::string> out, GateKind kind,
            std::set<WirePair> no_influence = {}) {
    gates_.push_back(Gate{id, std::move(in), std::move(out), std::nullopt, std::move(no_influence), kind});
  }
  /// Fan-out of observed wire `in` onto an open output named after its
  /// variable plus one branch per consumer.
  void copy(const std::string& id, const std::string& in, const std::vector<std::string>& branches) {
    const Wire* src = nullptr;
    for (const auto& w : wires_) {
      if (w.id == in) src = &w;
    }
    const std::string var = src->var();
    const int card = src->dim;
    std::vector<std::string> outs;
    for (const auto& b : branches) {
      obs(b, card, var);
      outs.push_back(b);
    }
    gate(id, {in}, outs, GateKind::kCopy);
  }
  CausalStructure build() const { return CausalStructure(wires_, gates_); }

 private:
  std::vector<Wire> wires_;
  std::vector<Gate> gates_;
};

Matrix bell_projector(int k) {
  const double r = 1 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (k) {
    case 0:
      v(0) = r, v(3) = r;
      break;
    case 1:
      v(0) = r, v(3) = -r;
      break;
    case 2:
      v(1) = r, v(2) = r;
      break;
    default:
      v(1) = r, v(2) = -r;
      break;
  }
  return v * v.adjoint();
}

Matrix phi_plus() { return bell_projector(0); }

CausalStructure bell_structure(bool settings) {
  Builder b;
  b.gpt("qa");
  b.gpt("qb");
  if (settings) {
    b.obs("x");
    b.obs("y");
  }
  b.obs("a");
  b.obs("b");
  b.gate("S", {}, {"qa", "qb"}, GateKind::kState);
  b.gate("A", settings ? std::vector<std::string>{"x", "qa"} : std::vector<std::string>{"qa"}, {"a"},
         GateKind::kEffect);
  b.gate("B", settings ? std::vector<std::string>{"y", "qb"} : std::vector<std::string>{"qb"}, {"b"},
         GateKind::kEffect);
  return b.build();
}

/// Replaces the listed gates' ops; other gates keep theirs.
Circuit with_ops(const CausalStructure& cs, const std::map<std::string, Superoperator>& ops) {
  std::vector<Gate> gates = cs.gates();
  for (auto& g : gates) {
    auto it = ops.find(g.id);
    if (it != ops.end()) g.op = it->second;
  }
  return Circuit(cs.wires(), std::move(gates));
}

SystemLabel lab(const std::string& id, int dim = 2) { return {id, dim}; }

Preset make_bell(const std::string& name) {
  Preset p;
  p.name = name;
  p.description = "Bell scenario: one bipartite source, two parties with binary settings x, y";
  p.structure = bell_structure(true);
  p.circuit = with_ops(
      p.structure,
      {{"S", Superoperator({}, {lab("qa"), lab("qb")}, phi_plus())},
       {"A", measurement_with_setting(lab("x"), {lab("qa")}, lab("a"), {xz_projectors(0), xz_projectors(M_PI / 2)})},
       {"B", measurement_with_setting(lab("y"), {lab("qb")}, lab("b"),
                                      {xz_projectors(M_PI / 4), xz_projectors(-M_PI / 4)})}});
  p.metadata = {false, kGapExcluded, "one source prepares every latent GPT system"};
  return p;
}

Preset make_bell_bipartite() {
  Preset p;
  p.name = "bell-bipartite";
  p.description = "Bell-state source measured in Z on both wings";
  p.structure = bell_structure(false);
  p.circuit = with_ops(p.structure, {{"S", Superoperator({}, {lab("qa"), lab("qb")}, phi_plus())},
                                     {"A", qc_measurement({lab("qa")}, lab("a"), xz_projectors(0))},
                                     {"B", qc_measurement({lab("qb")}, lab("b"), xz_projectors(0))}});
  p.metadata = {false, kGapExcluded, "one source prepares every latent GPT system"};
  return p;
}

CausalStructure bilocality_structure() {
  Builder b;
  b.gpt("qa");
  b.gpt("qb1");
  b.gpt("qb2");
  b.gpt("qc");
  b.obs("X");
  b.obs("Z");
  b.obs("A");
  b.obs("B", 4);
  b.obs("C");
  b.gate("S1", {}, {"qa", "qb1"}, GateKind::kState);
  b.gate("S2", {}, {"qb2", "qc"}, GateKind::kState);
  b.gate("gA", {"X", "qa"}, {"A"}, GateKind::kEffect);
  b.gate("gB", {"qb1", "qb2"}, {"B"}, GateKind::kEffect);
  b.gate("gC", {"Z", "qc"}, {"C"}, GateKind::kEffect);
  return b.build();
}

std::vector<Matrix> bell_measurement() { return {bell_projector(0), bell_projector(1), bell_projector(2), bell_projector(3)}; }

Preset make_bilocality(const std::string& name) {
  Preset p;
  p.name = name;
  p.description = "bilocality: sources S1 (A, B) and S2 (B, C), Bell-state measurement at B";
  p.structure = bilocality_structure();
  auto zx = std::vector<std::vector<Matrix>>{xz_projectors(0), xz_projectors(M_PI / 2)};
  p.circuit = with_ops(p.structure, {{"S1", Superoperator({}, {lab("qa"), lab("qb1")}, phi_plus())},
                                     {"S2", Superoperator({}, {lab("qb2"), lab("qc")}, phi_plus())},
                                     {"gA", measurement_with_setting(lab("X"), {lab("qa")}, lab("A"), zx)},
                                     {"gB", qc_measurement({lab("qb1"), lab("qb2")}, lab("B", 4), bell_measurement())},
                                     {"gC", measurement_with_setting(lab("Z"), {lab("qc")}, lab("C"), zx)}});
  p.metadata = {false, kNoExclusion, "two independent sources; no shared reference frame"};
  return p;
}

/// Bell-state measurement on (in, fresh half of Φ+); the other half leaves on
/// the output, so the input never influences it.
Superoperator entanglement_swap(const SystemLabel& in, const SystemLabel& outcome, const SystemLabel& out) {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1 / std::sqrt(2.0);
  Matrix v = kron(Matrix::Identity(2, 2), Matrix(phi));  // in -> in ⊗ aux ⊗ out
  std::vector<Matrix> kraus;
  for (int b = 0; b < 4; ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(bell_projector(b));
    Vector beta = es.eigenvectors().col(3);
    Matrix k = kron(Matrix(beta.adjoint()), Matrix::Identity(2, 2)) * v;  // 2x2
    Vector e = Vector::Zero(4);
    e(b) = 1.0;
    kraus.push_back(kron(Matrix(e), k));
  }
  return Superoperator::kraus({in}, {outcome, out}, kraus);
}

Preset make_cjbilo() {
  Builder b;
  b.gpt("qa");
  b.gpt("qm");
  b.gpt("qc");
  b.obs("X");
  b.obs("Z");
  b.obs("A");
  b.obs("B", 4);
  b.obs("C");
  b.gate("S1", {}, {"qa", "qm"}, GateKind::kState);
  b.gate("gA", {"X", "qa"}, {"A"}, GateKind::kEffect);
  b.gate("gB", {"qm"}, {"B", "qc"}, GateKind::kChannel, {{"qm", "qc"}});
  b.gate("gC", {"Z", "qc"}, {"C"}, GateKind::kEffect);
  Preset p;
  p.name = "cjbilo";
  p.description = "one source feeding A and a middle gate whose GPT output is not influenced by its input";
  p.structure = b.build();
  auto zx = std::vector<std::vector<Matrix>>{xz_projectors(0), xz_projectors(M_PI / 2)};
  p.circuit = with_ops(p.structure, {{"S1", Superoperator({}, {lab("qa"), lab("qm")}, phi_plus())},
                                     {"gA", measurement_with_setting(lab("X"), {lab("qa")}, lab("A"), zx)},
                                     {"gB", entanglement_swap(lab("qm"), lab("B", 4), lab("qc"))},
                                     {"gC", measurement_with_setting(lab("Z"), {lab("qc")}, lab("C"), zx)}});
  p.metadata = {false, kNoExclusion, "nonalgebraic once the middle gate's no-influence relation is imposed"};
  return p;
}

CausalStructure pbr_structure() {
  Builder b;
  b.gpt("q1");
  b.gpt("q2");
  b.obs("X");
  b.obs("Y");
  b.obs("Z");
  b.obs("A");
  b.gate("P1", {"X"}, {"q1"}, GateKind::kState);
  b.gate("P2", {"Y"}, {"q2"}, GateKind::kState);
  b.gate("M", {"Z", "q1", "q2"}, {"A"}, GateKind::kEffect);
  return b.build();
}

CausalStructure evans_structure() {
  Builder b;
  b.gpt("qa");
  b.gpt("qb1");
  b.gpt("qb2");
  b.gpt("qc");
  b.obs("B");
  b.obs("A");
  b.obs("C");
  b.gate("S1", {}, {"qa", "qb1"}, GateKind::kState);
  b.gate("S2", {}, {"qb2", "qc"}, GateKind::kState);
  b.gate("gB", {"qb1", "qb2"}, {"B"}, GateKind::kEffect);
  b.copy("copyB", "B", {"B.out", "B.A", "B.C"});
  b.gate("gA", {"B.A", "qa"}, {"A"}, GateKind::kEffect);
  b.gate("gC", {"B.C", "qc"}, {"C"}, GateKind::kEffect);
  return b.build();
}

CausalStructure triangle_structure() {
  Builder b;
  b.gpt("qab_a");
  b.gpt("qab_b");
  b.gpt("qbc_b");
  b.gpt("qbc_c");
  b.gpt("qca_c");
  b.gpt("qca_a");
  b.obs("A");
  b.obs("B");
  b.obs("C");
  b.gate("Sab", {}, {"qab_a", "qab_b"}, GateKind::kState);
  b.gate("Sbc", {}, {"qbc_b", "qbc_c"}, GateKind::kState);
  b.gate("Sca", {}, {"qca_c", "qca_a"}, GateKind::kState);
  b.gate("gA", {"qab_a", "qca_a"}, {"A"}, GateKind::kEffect);
  b.gate("gB", {"qab_b", "qbc_b"}, {"B"}, GateKind::kEffect);
  b.gate("gC", {"qbc_c", "qca_c"}, {"C"}, GateKind::kEffect);
  return b.build();
}

CausalStructure evansmod_structure() {
  Builder b;
  b.gpt("qa");
  b.gpt("qb1");
  b.gpt("qb2");
  b.gpt("qc");
  b.obs("A");
  b.obs("C");
  b.obs("B");
  b.gate("S1", {}, {"qa", "qb1"}, GateKind::kState);
  b.gate("S2", {}, {"qb2", "qc"}, GateKind::kState);
  b.gate("gA", {"qa"}, {"A"}, GateKind::kEffect);
  b.gate("gC", {"qc"}, {"C"}, GateKind::kEffect);
  b.copy("copyA", "A", {"A.out", "A.B"});
  b.copy("copyC", "C", {"C.out", "C.B"});
  b.gate("gB", {"A.B", "C.B", "qb1", "qb2"}, {"B"}, GateKind::kEffect);
  return b.build();
}

CausalStructure dbell_structure() {
  Builder b;
  b.gpt("q14");
  b.gpt("q16");
  b.gpt("q23");
  b.gpt("q25");
  b.obs("A");
  b.obs("B");
  b.obs("C");
  b.obs("D");
  b.obs("E");
  b.gate("S1", {}, {"q14", "q16"}, GateKind::kState);
  b.gate("S2", {}, {"q23", "q25"}, GateKind::kState);
  b.gate("g3", {"A", "q23"}, {"B"}, GateKind::kEffect);
  b.copy("copyB", "B", {"B.out", "B.4"});
  b.gate("g4", {"B.4", "q14"}, {"C"}, GateKind::kEffect);
  b.copy("copyC", "C", {"C.out", "C.5"});
  b.gate("g5", {"C.5", "q25"}, {"D"}, GateKind::kEffect);
  b.copy("copyD", "D", {"D.out", "D.6"});
  b.gate("g6", {"D.6", "q16"}, {"E"}, GateKind::kEffect);
  return b.build();
}

CausalStructure bigcircuit_structure() {
  Builder b;
  b.gpt("q12");
  b.gpt("q13");
  b.gpt("q27");
  b.gpt("q28");
  b.gpt("q36");
  b.gpt("q37");
  b.gpt("q1513");
  b.gpt("q1514");
  b.obs("H");
  b.obs("G");
  b.obs("A");
  b.obs("B");
  b.obs("C");
  b.obs("D");
  b.obs("E");
  b.obs("F");
  b.gate("S1", {}, {"q12", "q13"}, GateKind::kState);
  b.gate("g2", {"H", "q12"}, {"q27", "q28"}, GateKind::kChannel);
  b.gate("g3", {"q13"}, {"q36", "q37"}, GateKind::kChannel);
  b.gate("g6", {"q36"}, {"C"}, GateKind::kEffect);
  b.gate("g7", {"q27", "q37"}, {"B"}, GateKind::kEffect);
  b.copy("copyB", "B", {"B.out", "B.8", "B.13"});
  b.gate("g9", {"G"}, {"F"}, GateKind::kClassicalStochastic);
  b.copy("copyF", "F", {"F.out", "F.8"});
  b.gate("g8", {"q28", "B.8", "F.8"}, {"A"}, GateKind::kEffect);
  b.copy("copyC", "C", {"C.out", "C.13"});
  b.gate("S2", {}, {"q1513", "q1514"}, GateKind::kState);
  b.gate("g13", {"q1513", "B.13", "C.13"}, {"D"}, GateKind::kEffect);
  b.gate("g14", {"q1514"}, {"E"}, GateKind::kEffect);
  return b.build();
}

std::uint64_t seed_of(const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : name) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
  return h;
}

Preset random_preset(const std::string& name, const std::string& description, CausalStructure cs,
                     StructureMetadata meta) {
  Rng rng(seed_of(name));
  Preset p;
  p.name = name;
  p.description = description;
  p.circuit = random_compatible_circuit(cs, rng);
  p.structure = std::move(cs);
  p.metadata = std::move(meta);
  return p;
}

}  // namespace

Circuit random_compatible_circuit(const CausalStructure& cs, Rng& rng) {
  std::vector<Gate> gates = cs.gates();
  for (auto& g : gates) {
    Factors in;
    Factors out;
    for (const auto& w : g.in) in.push_back(cs.wire(w).label());
    for (const auto& w : g.out) out.push_back(cs.wire(w).label());
    if (g.kind == GateKind::kCopy) {
      g.op = classical_copy(in[0], out);
      continue;
    }
    Superoperator s = random_channel(in, out, rng);
    if (!g.no_influence.empty()) {
      // Outputs named in a no-influence pair are prepared independently of
      // every input; the rest see a random channel.
      std::set<std::string> held;
      for (const auto& [i, o] : g.no_influence) held.insert(o);
      Factors free_out;
      Factors held_out;
      for (const auto& f : out) (held.count(f.id) ? held_out : free_out).push_back(f);
      Superoperator prep = random_channel({}, held_out, rng);
      Superoperator rest = free_out.empty() ? Superoperator::trace_and_prepare(in, HermitianOperator::state({}, Matrix::Identity(1, 1)))
                                            : random_channel(in, free_out, rng);
      s = compose_par(rest, prep).reordered(g.in, g.out);
    }
    Dims dims = dims_of(in);
    for (const auto& f : out) dims.push_back(f.dim);
    std::vector<bool> classical;
    for (const auto& w : g.in) classical.push_back(cs.wire(w).classical());
    for (const auto& w : g.out) classical.push_back(cs.wire(w).classical());
    Matrix j = s.choi();
    const int n = static_cast<int>(j.rows());
    for (int r = 0; r < n; ++r) {
      std::vector<int> dr = decode_index(r, dims);
      for (int c = 0; c < n; ++c) {
        std::vector<int> dc = decode_index(c, dims);
        for (std::size_t p = 0; p < dims.size(); ++p) {
          if (classical[p] && dr[p] != dc[p]) {
            j(r, c) = 0.0;
            break;
          }
        }
      }
    }
    g.op = Superoperator(in, out, std::move(j));
  }
  return Circuit(cs.wires(), std::move(gates));
}

std::vector<std::string> preset_names() {
  return {"bell", "bell-bipartite", "bilocality", "cjbilo", "pbr", "evans", "triangle", "evansmod", "dbell", "bigcircuit"};
}

Preset preset(const std::string& name) {
  if (name == "bell" || name == "chsh") return make_bell(name);
  if (name == "bell-bipartite") return make_bell_bipartite();
  if (name == "bilocality" || name == "bilo") return make_bilocality(name);
  if (name == "cjbilo") return make_cjbilo();
  if (name == "pbr") {
    return random_preset(name, "PBR: two independent preparations with settings X, Y; joint measurement with setting Z",
                         pbr_structure(), {true, kGapExcluded, "algebraic"});
  }
  if (name == "evans") {
    return random_preset(name, "Evans: B from two independent sources is copied into A and C", evans_structure(),
                         {false, kNoExclusion, "independent sources, nonalgebraic"});
  }
  if (name == "triangle") {
    return random_preset(name, "triangle: three bipartite sources, one per pair of parties", triangle_structure(),
                         {false, kNoExclusion, "independent sources, nonalgebraic"});
  }
  if (name == "evansmod") {
    return random_preset(name, "modified Evans: A and C are copied into B", evansmod_structure(),
                         {true, kGapExcluded, "independent sources but algebraic"});
  }
  if (name == "dbell") {
    return random_preset(name, "two Bell scenarios chained through observed wires", dbell_structure(),
                         {false, kGapExcluded, "each district is a Bell scenario"});
  }
  if (name == "bigcircuit") {
    return random_preset(name, "district example with transformations on latent systems", bigcircuit_structure(),
                         {std::nullopt, "", "worked district-factorization example"});
  }
  throw LabelError("unknown preset '" + name + "'");
}

}  // namespace twirlkit
