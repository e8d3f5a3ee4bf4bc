#pragma once

#include <optional>
#include <string>

#include "twirlkit/presets.h"

namespace twirlkit {

inline constexpr const char* kCircuitFormat = "twirlkit-circuit";
inline constexpr int kCircuitFormatVersion = 1;

/// One circuit file: wiring, optional ops, an optional symmetry rep on the
/// GPT wires, and structure metadata.
struct CircuitDocument {
  std::string name;
  std::string description;
  Circuit circuit;
  std::optional<SymmetryRep> rep;
  StructureMetadata metadata;
};

/// JSON text. Matrices are {"rows", "cols", "data"} with data a row-major
/// list of [re, im] pairs.
std::string to_json(const CircuitDocument& doc);
/// Throws ValidationError on malformed input or a wrong format header.
CircuitDocument circuit_from_json(const std::string& text);

CircuitDocument load_circuit_file(const std::string& path);
void save_circuit_file(const std::string& path, const CircuitDocument& doc);

/// Document for a preset; the circuit is the reference circuit.
CircuitDocument document_of(const Preset& p);

}  // namespace twirlkit
