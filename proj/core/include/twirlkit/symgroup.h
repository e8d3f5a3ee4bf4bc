#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twirlkit/qops.h"

namespace twirlkit {

/// Finite group given by its multiplication table: mul(g, h) = g·h.
class FiniteGroup {
 public:
  /// Validates closure, associativity, a two-sided identity, and inverses.
  explicit FiniteGroup(std::vector<std::vector<int>> mult);

  static FiniteGroup cyclic(int n);
  static FiniteGroup trivial() { return cyclic(1); }

  int order() const { return static_cast<int>(mult_.size()); }
  int identity() const { return identity_; }
  int mul(int g, int h) const;
  int inverse(int g) const;
  const std::vector<std::vector<int>>& table() const { return mult_; }

  bool operator==(const FiniteGroup& other) const { return mult_ == other.mult_; }

 private:
  void check(int g) const;

  std::vector<std::vector<int>> mult_;
  std::vector<int> inverse_;
  int identity_ = 0;
};

/// Left regular representation: L_g|h⟩ = |g·h⟩.
std::vector<Matrix> regular_representation(const FiniteGroup& group);

/// 𝒜_g restricted to one system, in the form X ↦ N X' N† with X' = Xᵀ when
/// `transpose` is set (the complex-linear extension of O ↦ V 𝒞(O) V†).
struct LocalAction {
  Matrix n;
  bool transpose = false;
};

/// Per-system (anti)unitary representation data.
struct SystemAction {
  SystemLabel system;
  std::vector<Matrix> matrices;
  std::vector<bool> antilinear;
  /// Basis in which the antilinear part conjugates; computational if empty.
  std::optional<Matrix> conj_basis;

  LocalAction local(int g) const;
};

class SymmetryRep {
 public:
  /// Validates unitarity, flag parity, and the superoperator-level
  /// homomorphism 𝒜_g∘𝒜_h = 𝒜_gh on every system.
  SymmetryRep(FiniteGroup group, std::vector<SystemAction> actions, double tol = kDefaultTol);

  const FiniteGroup& group() const { return group_; }
  int order() const { return group_.order(); }
  bool has_system(const std::string& id) const { return actions_.count(id) > 0; }
  const SystemAction& action(const std::string& id) const;
  std::vector<std::string> system_ids() const;
  bool has_antilinear() const;

  /// True when every 𝒜_g is the identity map on this system. Systems absent
  /// from the rep (classical wires, for instance) act trivially.
  bool acts_trivially(const SystemLabel& system, double tol = kDefaultTol) const;
  /// Local action of g on a system; absent systems get the identity.
  LocalAction local(const SystemLabel& system, int g) const;

  /// Copy with an added or replaced system action (re-validated).
  SymmetryRep with_system(SystemAction action) const;
  /// Copy restricted to the listed systems (unknown ids are ignored).
  SymmetryRep restricted(const std::vector<std::string>& ids) const;

 private:
  FiniteGroup group_;
  std::map<std::string, SystemAction> actions_;
};

struct ReferenceFrame {
  SystemLabel system;
  Vector fiducial;
  std::vector<Vector> frame_states;
  std::vector<Matrix> matrices;
  /// Frame-state projectors |g⟩⟨g| transform by these flags (all false for
  /// the regular representation).
  std::vector<bool> antilinear;

  Matrix gram() const;
  SystemAction action() const;
};

Superoperator superop_of(const SymmetryRep& rep, const SystemLabel& system, int g);
Superoperator collective(const SymmetryRep& rep, const Factors& systems, int g);
Superoperator relational(const SymmetryRep& rep, const Factors& fixed, const Factors& moved, int g);

/// Collective action of g on a raw operator over `factors` (no Choi built).
Matrix act_collective(const SymmetryRep& rep, const Factors& factors, int g, const Matrix& o);
/// Action of g on the selected factors only.
Matrix act_on(const SymmetryRep& rep, const Factors& factors, const std::vector<bool>& moved,
              int g, const Matrix& o);

/// RF system R with the left regular representation, |e⟩ the identity basis vector.
ReferenceFrame build_reference_frame(const SymmetryRep& rep, const std::string& sys_id);

/// Qubit RF for the time-reversal group: |e⟩ = |+y⟩, frame {|+y⟩, |−y⟩}.
ReferenceFrame time_reversal_frame(const std::string& sys_id);

/// Preset representations. Names: "trivial", "z2phase", "z3cyclic",
/// "time-reversal" (alias "conjugation").
SymmetryRep z2_phase_rep(const Factors& systems);
SymmetryRep z3_cyclic_rep(const Factors& systems);
SymmetryRep time_reversal_rep(const Factors& systems,
                              const std::map<std::string, Matrix>& bases = {});
SymmetryRep trivial_rep(const Factors& systems, int group_order = 1);
SymmetryRep preset_rep(const std::string& name, const Factors& systems);
std::vector<std::string> preset_rep_names();

}  // namespace twirlkit
