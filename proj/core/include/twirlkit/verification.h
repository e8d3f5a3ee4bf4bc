#pragma once

#include <string>
#include <vector>

#include "twirlkit/circuits.h"

namespace twirlkit {

/// Simulator for a named preset rep acting on every GPT wire of `c`.
Simulator simulator_for(const Circuit& c, const std::string& rep_name, MapKind kind, RfAssignment labels = {});

struct GateImageCheck {
  std::string gate;
  bool cp = false;
  /// TP images of TP gates; non-TP ops are exempt. For € only inputs on the
  /// invariant vectors need to keep their trace.
  bool tp = true;
  /// Covariance under the extended rep for $ and €, swirl membership for $_C.
  bool member = false;
  /// Smallest eigenvalue of the image's Choi matrix.
  double min_eigenvalue = 0.0;
  bool valid() const { return cp && tp && member; }
};

struct SimulationReport {
  std::string map;
  double tol = kDefaultTol;
  double statistics_max_error = 0.0;
  std::vector<GateImageCheck> gates;
  bool all_valid = true;
  /// Smallest image eigenvalue over all gates and the gate attaining it.
  double min_eigenvalue = 0.0;
  std::string min_eigenvalue_gate;
  /// map(g2∘g1) against map(g2)∘map(g1) over wires joining two gates, and
  /// map(g1⊗g2) against map(g1)⊗map(g2) over gate pairs.
  double functoriality_max_error = 0.0;
  int functoriality_checked = 0;
  /// Pairs whose padded image would pass the dimension cap.
  int functoriality_skipped = 0;
  /// Empty when every check passes.
  std::string failure_witness;

  bool statistics_ok() const { return statistics_max_error <= tol; }
  bool functorial() const { return functoriality_max_error <= tol; }
  bool passed() const { return statistics_ok() && all_valid && functorial(); }
};

/// Maps the circuit, compares P(O|I) before and after, checks each image's
/// validity, and checks functoriality on the circuit's gates.
SimulationReport verify_simulation(const Simulator& sim, const Circuit& c, double tol = kDefaultTol,
                                   bool functoriality = true);

/// Largest Choi difference of map(s2∘s1) and map(s2)∘map(s1).
double sequential_defect(const Simulator& sim, const Superoperator& s2, const Superoperator& s1);
/// Largest Choi difference of map(s1⊗s2) and map(s1)⊗map(s2).
double parallel_defect(const Simulator& sim, const Superoperator& s1, const Superoperator& s2);

}  // namespace twirlkit
