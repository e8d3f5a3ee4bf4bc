#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twirlkit/districts.h"

namespace twirlkit {

struct Preset {
  std::string name;
  std::string description;
  CausalStructure structure;
  /// A compatible circuit with concrete qubit ops.
  std::optional<Circuit> circuit;
  StructureMetadata metadata;
};

/// Names: bell (alias chsh), bell-bipartite, bilocality (alias bilo),
/// cjbilo, pbr, evans, triangle, evansmod, dbell, bigcircuit.
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

/// Compatible circuit for a structure: a seeded random channel per gate with
/// classical factors dephased, and exact fan-out on copy gates.
Circuit random_compatible_circuit(const CausalStructure& cs, Rng& rng);

}  // namespace twirlkit
