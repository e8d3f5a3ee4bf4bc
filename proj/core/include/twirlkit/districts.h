#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twirlkit/circuits.h"

namespace twirlkit {

/// One fragment left after cutting every observed classical wire and
/// reconnecting the observed wires internal to the fragment. Copy gates on
/// observed wires are junctions of the wires, not boxes of their own.
struct District {
  /// Non-copy gates, in circuit order.
  std::vector<std::string> gates;
  /// Observed variables produced in the district.
  std::set<std::string> outputs;
  /// Observed variables consumed in the district but produced elsewhere.
  std::set<std::string> inputs;
  /// Observed variables produced and consumed inside the district.
  std::set<std::string> reconnected;
  /// Latent wires (classical or GPT) joining the district's gates.
  std::vector<std::string> latent_wires;
  /// The district as a causal structure of its own.
  CausalStructure fragment;
};

/// Variable carried by an observed wire, followed through copy gates.
std::string root_variable(const CausalStructure& cs, const std::string& wire);

std::vector<District> districts(const CausalStructure& cs);

struct DistrictFactorization {
  bool factorizes = false;
  double max_error = 0.0;
  /// P(O_k | I_k) per district, rebuilt from P by the chain rule along the
  /// producers' topological order.
  std::vector<Distribution> factors;
};

/// Tests P(O|I) = Π_k P(O_k|I_k). Every observed variable produced by a gate
/// must be an output of P. Throws ValidationError otherwise.
DistrictFactorization district_factorization_check(const CausalStructure& cs, const Distribution& p,
                                                   double tol = kDefaultTol);

/// Facts about a causal structure that are not computed here.
struct StructureMetadata {
  /// Whether the structure imposes only equality constraints classically.
  std::optional<bool> algebraic;
  /// Verdict stated for the structure in the source material, if any.
  std::string expected_verdict;
  std::string note;
};

struct DistrictReport {
  std::vector<std::string> gates;
  bool has_latent_gpt = false;
  /// No gate carries a declared no-influence relation.
  bool unrestricted = true;
  /// Every latent GPT wire has a common ancestor gate through GPT wires.
  /// Unset when the test does not apply (no GPT wires or restricted gates).
  std::optional<bool> shared_rf_possible;
  std::string shared_rf_ancestor;
  bool excluded = false;
  std::string reason;
};

inline constexpr const char* kGapExcluded = "gap excluded";
inline constexpr const char* kNoExclusion = "no exclusion";

struct GapReport {
  std::vector<DistrictReport> districts;
  std::optional<bool> algebraic;
  bool excluded = false;
  std::vector<std::string> reasons;
  std::string verdict() const { return excluded ? kGapExcluded : kNoExclusion; }
};

/// Necessary conditions for a swirled-nonswirled gap. A gap needs some
/// district to admit one; a district with a shared-RF-preparable set of GPT
/// systems (and unrestricted gates) or no GPT system admits none; an
/// algebraic structure (with unrestricted gates) admits none. The report
/// never asserts that a gap exists.
GapReport gap_necessary_conditions(const CausalStructure& cs, const StructureMetadata& meta);

}  // namespace twirlkit
