#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "twirlkit/random.h"
#include "twirlkit/simmaps.h"

namespace twirlkit {

enum class WireKind { kClassicalObserved, kClassicalLatent, kGptLatent };
std::string wire_kind_name(WireKind kind);
/// Accepts "classical_observed", "classical_latent", "gpt_latent".
WireKind parse_wire_kind(const std::string& name);

struct Wire {
  std::string id;
  WireKind kind = WireKind::kGptLatent;
  /// Hilbert dimension for GPT wires, cardinality for classical ones.
  int dim = 2;
  /// Name of the classical variable carried; copies of one variable share it.
  /// Empty means the wire id.
  std::string variable;

  bool classical() const { return kind != WireKind::kGptLatent; }
  bool observed() const { return kind == WireKind::kClassicalObserved; }
  const std::string& var() const { return variable.empty() ? id : variable; }
  SystemLabel label() const { return {id, dim}; }
};

enum class GateKind { kState, kEffect, kChannel, kClassicalStochastic, kCopy };
std::string gate_kind_name(GateKind kind);
GateKind parse_gate_kind(const std::string& name);

using WirePair = std::pair<std::string, std::string>;

/// A box of the circuit. When present, op's input and output factors are the
/// gate's wires in the listed order (classical wires carry diagonal data).
struct Gate {
  std::string id;
  std::vector<std::string> in;
  std::vector<std::string> out;
  std::optional<Superoperator> op;
  /// (input wire, output wire) pairs declared free of influence.
  std::set<WirePair> no_influence;
  GateKind kind = GateKind::kChannel;
};

/// Typed-wire DAG. Wires without a producer are open inputs, wires without a
/// consumer are open outputs.
class Circuit {
 public:
  Circuit() = default;
  /// Validates unique ids, wire references, ≤1 producer and ≤1 consumer per
  /// wire, acyclicity, op shapes, copy-gate shapes, and no_influence pairs
  /// referencing the gate's own wires. Declared pairs must also pass
  /// check_no_influence when the gate carries an op.
  Circuit(std::vector<Wire> wires, std::vector<Gate> gates);

  const std::vector<Wire>& wires() const { return wires_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool has_wire(const std::string& id) const { return wire_index_.count(id) > 0; }
  const Wire& wire(const std::string& id) const;
  const Gate& gate(const std::string& id) const;
  int gate_index(const std::string& id) const;
  int wire_index(const std::string& id) const;
  /// Index of the producing / consuming gate, or -1.
  int producer(const std::string& wire) const;
  int consumer(const std::string& wire) const;
  const std::vector<std::string>& open_inputs() const { return open_inputs_; }
  const std::vector<std::string>& open_outputs() const { return open_outputs_; }
  /// Gate indices in a deterministic topological order.
  const std::vector<int>& topological_order() const { return topo_; }
  /// True when every gate carries an op.
  bool evaluable_ops() const;
  /// Factors of all GPT wires, in wire order.
  Factors gpt_factors() const;

 private:
  std::vector<Wire> wires_;
  std::vector<Gate> gates_;
  std::map<std::string, int> wire_index_;
  std::map<std::string, int> gate_index_;
  std::vector<int> producer_;
  std::vector<int> consumer_;
  std::vector<std::string> open_inputs_;
  std::vector<std::string> open_outputs_;
  std::vector<int> topo_;
};

/// Gates carry only wiring and no-influence relations (ops are ignored).
using CausalStructure = Circuit;

/// Copy of the structure with every op dropped.
CausalStructure structure_of(const Circuit& c);

/// P(O|I) over the observed open wires. Rows of `table` are indexed by the
/// input assignment, columns by the output assignment, both mixed-radix with
/// the first listed wire most significant.
struct Distribution {
  std::vector<std::string> outputs;
  std::vector<int> output_cards;
  std::vector<std::string> inputs;
  std::vector<int> input_cards;
  RealMatrix table;

  int output_count() const { return static_cast<int>(table.cols()); }
  int input_count() const { return static_cast<int>(table.rows()); }
  double prob(const std::vector<int>& o, const std::vector<int>& i) const;
  /// Rows "o1 o2 | i1 | p" with 12 significant digits, one per entry.
  std::string to_text() const;
};

/// Decodes a mixed-radix index into digits (first digit most significant).
std::vector<int> decode_index(int index, const std::vector<int>& cards);
int encode_index(const std::vector<int>& digits, const std::vector<int>& cards);

/// Contracts the circuit branch by branch. Classical values are enumerated;
/// the live quantum state only spans GPT wires that are currently open.
/// Throws ValidationError on open GPT wires or missing ops.
Distribution evaluate(const Circuit& c);

/// Largest entrywise difference; throws ShapeError on mismatched layouts.
double max_distribution_diff(const Distribution& a, const Distribution& b);

/// Pairs (a, b) with a ≠ b such that wire a can influence wire b: reachability
/// where a gate links input i to output o unless (i, o) is in its no_influence.
std::set<WirePair> influence_closure(const CausalStructure& cs);

/// Semantic no-influence test on a gate's op: the outputs `o` are unaffected
/// by the inputs `i`, i.e. the reduced Choi equals 𝟙_I ⊗ (tr_I J)/d_I.
bool check_no_influence(const Gate& g, const std::set<std::string>& i, const std::set<std::string>& o,
                        double tol = kDefaultTol);

/// Image of a circuit under a simulation map. Each GPT wire w on which the
/// rep acts gets one RF wire "R_" + w shared by its producer and consumer.
/// Declared no-influence pairs (i, o) lift to every pair of {R_i, i} x {R_o, o}.
Circuit map_circuit(const Simulator& sim, const Circuit& c);

// Op builders. Classical factors are computational-basis diagonal systems.

/// Σ_x,y P(y|x) |x⟩⟨x| ⊗ |y⟩⟨y| with p(y, x) indexed by the Kronecker index
/// of the output and input factors.
Superoperator classical_stochastic(const Factors& in, const Factors& out, const RealMatrix& p);
/// Deterministic fan-out of one classical value onto every output.
Superoperator classical_copy(const SystemLabel& in, const Factors& out);
/// Classical source with distribution p.
Superoperator classical_source(const SystemLabel& out, const std::vector<double>& p);
/// Σ_x |x⟩⟨x| ⊗ J_x: inputs are (control, branch inputs), outputs the branch outputs.
Superoperator classically_controlled(const SystemLabel& control, const std::vector<Superoperator>& branches);
/// Quantum-to-classical measurement Σ_a E_aᵀ ⊗ |a⟩⟨a|.
Superoperator qc_measurement(const Factors& systems, const SystemLabel& outcome,
                             const std::vector<Matrix>& effects);
/// Measurement whose POVM is chosen by a classical setting: inputs (setting, systems).
Superoperator measurement_with_setting(const SystemLabel& setting, const Factors& systems,
                                       const SystemLabel& outcome,
                                       const std::vector<std::vector<Matrix>>& povms);
/// Preparation of ρ_x chosen by a classical setting.
Superoperator preparation_with_setting(const SystemLabel& setting, const Factors& systems,
                                       const std::vector<Matrix>& states);
/// Projective qubit measurement along the X-Z plane at angle θ from Z.
std::vector<Matrix> xz_projectors(double theta);

/// Random circuit of at most three gates on GPT wires of dimension dim.
/// Templates: prepare then measure with a setting; bipartite preparation with
/// two measurements; prepare, classically controlled channel, measure;
/// prepare with a setting, channel, measure.
Circuit random_small_circuit(Rng& rng, int dim);

/// CHSH value E(0,0)+E(0,1)+E(1,0)−E(1,1) of a two-setting, two-outcome
/// distribution with outputs (a, b) and inputs (x, y).
double chsh_value(const Distribution& p);

}  // namespace twirlkit
