#include "twirlkit/symgroup.h"

#include <cmath>
#include <numbers>

namespace twirlkit {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> mult) : mult_(std::move(mult)) {
  const int n = order();
  if (n == 0) throw ValidationError("group: empty multiplication table");
  for (const auto& row : mult_) {
    if (static_cast<int>(row.size()) != n) throw ValidationError("group: table is not square");
    for (int x : row) {
      if (x < 0 || x >= n) throw ValidationError("group: table entry out of range");
    }
  }
  identity_ = -1;
  for (int e = 0; e < n && identity_ < 0; ++e) {
    bool ok = true;
    for (int g = 0; g < n && ok; ++g) ok = mult_[e][g] == g && mult_[g][e] == g;
    if (ok) identity_ = e;
  }
  if (identity_ < 0) throw ValidationError("group: no identity element");
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (mult_[mult_[a][b]][c] != mult_[a][mult_[b][c]]) {
          throw ValidationError("group: not associative at (" + std::to_string(a) + "," +
                                std::to_string(b) + "," + std::to_string(c) + ")");
        }
      }
    }
  }
  inverse_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if (mult_[g][h] == identity_ && mult_[h][g] == identity_) inverse_[g] = h;
    }
    if (inverse_[g] < 0) throw ValidationError("group: element " + std::to_string(g) + " has no inverse");
  }
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw ValidationError("cyclic group order must be >= 1");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  }
  return FiniteGroup(std::move(t));
}

void FiniteGroup::check(int g) const {
  if (g < 0 || g >= order()) throw LabelError("group element " + std::to_string(g) + " out of range");
}

int FiniteGroup::mul(int g, int h) const {
  check(g);
  check(h);
  return mult_[g][h];
}

int FiniteGroup::inverse(int g) const {
  check(g);
  return inverse_[g];
}

std::vector<Matrix> regular_representation(const FiniteGroup& group) {
  const int n = group.order();
  std::vector<Matrix> out;
  for (int g = 0; g < n; ++g) {
    Matrix m = Matrix::Zero(n, n);
    for (int h = 0; h < n; ++h) m(group.mul(g, h), h) = 1.0;
    out.push_back(std::move(m));
  }
  return out;
}

LocalAction SystemAction::local(int g) const {
  if (!antilinear[g]) return {matrices[g], false};
  Matrix b = conj_basis ? *conj_basis : Matrix::Identity(system.dim, system.dim);
  return {matrices[g] * b * b.transpose(), true};
}

namespace {

Matrix local_choi(const LocalAction& a, int d) {
  Matrix id = Superoperator::identity({{"x", d}}).choi();
  return choi_after_local(id, {d}, {d}, 0, a.n, a.transpose);
}

void validate_action(const FiniteGroup& group, const SystemAction& a, double tol) {
  const int n = group.order();
  const std::string& id = a.system.id;
  if (a.system.dim < 1) throw ValidationError("rep: system '" + id + "' has dim < 1");
  if (static_cast<int>(a.matrices.size()) != n || static_cast<int>(a.antilinear.size()) != n) {
    throw ValidationError("rep: system '" + id + "' needs one matrix and flag per group element");
  }
  for (int g = 0; g < n; ++g) {
    if (a.matrices[g].rows() != a.system.dim || !is_unitary(a.matrices[g], tol)) {
      throw ValidationError("rep: matrix " + std::to_string(g) + " on '" + id + "' is not a unitary of dim " +
                            std::to_string(a.system.dim));
    }
  }
  if (a.conj_basis && (a.conj_basis->rows() != a.system.dim || !is_unitary(*a.conj_basis, tol))) {
    throw ValidationError("rep: conjugation basis on '" + id + "' is not unitary");
  }
  if (a.antilinear[group.identity()]) throw ValidationError("rep: identity element flagged antilinear on '" + id + "'");
  std::vector<Matrix> chois;
  for (int g = 0; g < n; ++g) chois.push_back(local_choi(a.local(g), a.system.dim));
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      const int gh = group.mul(g, h);
      if (a.antilinear[gh] != (a.antilinear[g] != a.antilinear[h])) {
        throw ValidationError("rep: antilinear flags on '" + id + "' are not a homomorphism");
      }
      // Choi of 𝒜_g∘𝒜_h.
      const int d = a.system.dim;
      LocalAction lg = a.local(g);
      Matrix j = choi_after_local(chois[h], {d}, {d}, 0, lg.n, lg.transpose);
      if (max_abs_diff(j, chois[gh]) > tol) {
        throw ValidationError("rep: superoperators on '" + id + "' violate A_g A_h = A_gh at g=" +
                              std::to_string(g) + " h=" + std::to_string(h));
      }
    }
  }
}

}  // namespace

SymmetryRep::SymmetryRep(FiniteGroup group, std::vector<SystemAction> actions, double tol)
    : group_(std::move(group)) {
  for (auto& a : actions) {
    validate_action(group_, a, tol);
    std::string id = a.system.id;
    if (!actions_.emplace(id, std::move(a)).second) throw LabelError("rep: duplicate system '" + id + "'");
  }
}

const SystemAction& SymmetryRep::action(const std::string& id) const {
  auto it = actions_.find(id);
  if (it == actions_.end()) throw LabelError("rep: unknown system '" + id + "'");
  return it->second;
}

std::vector<std::string> SymmetryRep::system_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, a] : actions_) ids.push_back(id);
  return ids;
}

bool SymmetryRep::has_antilinear() const {
  for (const auto& [id, a] : actions_) {
    for (bool f : a.antilinear) {
      if (f && a.system.dim > 1) return true;
    }
  }
  return false;
}

bool SymmetryRep::acts_trivially(const SystemLabel& system, double tol) const {
  auto it = actions_.find(system.id);
  if (it == actions_.end() || system.dim == 1) return true;
  const SystemAction& a = it->second;
  if (a.system.dim != system.dim) throw ShapeError("rep: dimension mismatch on '" + system.id + "'");
  for (int g = 0; g < order(); ++g) {
    if (a.antilinear[g]) return false;
    const Matrix& v = a.matrices[g];
    const Complex phase = v(0, 0);
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    if (max_abs_diff(v, phase * Matrix::Identity(v.rows(), v.cols())) > tol) return false;
  }
  return true;
}

LocalAction SymmetryRep::local(const SystemLabel& system, int g) const {
  if (g < 0 || g >= order()) throw LabelError("rep: group element out of range");
  auto it = actions_.find(system.id);
  if (it == actions_.end()) return {Matrix::Identity(system.dim, system.dim), false};
  if (it->second.system.dim != system.dim) throw ShapeError("rep: dimension mismatch on '" + system.id + "'");
  return it->second.local(g);
}

SymmetryRep SymmetryRep::with_system(SystemAction action) const {
  std::vector<SystemAction> all;
  for (const auto& [id, a] : actions_) {
    if (id != action.system.id) all.push_back(a);
  }
  all.push_back(std::move(action));
  return SymmetryRep(group_, std::move(all));
}

SymmetryRep SymmetryRep::restricted(const std::vector<std::string>& ids) const {
  std::vector<SystemAction> all;
  for (const auto& id : ids) {
    auto it = actions_.find(id);
    if (it != actions_.end()) all.push_back(it->second);
  }
  return SymmetryRep(group_, std::move(all));
}

Matrix ReferenceFrame::gram() const {
  const int n = static_cast<int>(frame_states.size());
  Matrix g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) g(a, b) = frame_states[a].dot(frame_states[b]);
  }
  return g;
}

SystemAction ReferenceFrame::action() const {
  return SystemAction{system, matrices, antilinear, std::nullopt};
}

Superoperator superop_of(const SymmetryRep& rep, const SystemLabel& system, int g) {
  if (!rep.has_system(system.id)) throw LabelError("superop_of: unknown system '" + system.id + "'");
  return collective(rep, {system}, g);
}

Superoperator collective(const SymmetryRep& rep, const Factors& systems, int g) {
  if (systems.empty()) throw LabelError("collective: empty system list");
  for (const auto& s : systems) {
    if (!rep.has_system(s.id)) throw LabelError("collective: unknown system '" + s.id + "'");
  }
  Superoperator id = Superoperator::identity(systems);
  Matrix j = id.choi();
  Dims dims = dims_of(systems);
  for (std::size_t p = 0; p < systems.size(); ++p) {
    LocalAction a = rep.local(systems[p], g);
    j = choi_after_local(j, dims, dims, static_cast<int>(p), a.n, a.transpose);
  }
  return Superoperator(systems, systems, std::move(j));
}

Superoperator relational(const SymmetryRep& rep, const Factors& fixed, const Factors& moved, int g) {
  for (const auto& f : fixed) {
    if (index_of(moved, f.id) >= 0) throw LabelError("relational: '" + f.id + "' is both fixed and moved");
  }
  Factors all = concat(fixed, moved);
  Superoperator id = Superoperator::identity(all);
  Matrix j = id.choi();
  Dims dims = dims_of(all);
  for (std::size_t p = fixed.size(); p < all.size(); ++p) {
    if (!rep.has_system(all[p].id)) throw LabelError("relational: unknown system '" + all[p].id + "'");
    LocalAction a = rep.local(all[p], g);
    j = choi_after_local(j, dims, dims, static_cast<int>(p), a.n, a.transpose);
  }
  return Superoperator(all, all, std::move(j));
}

Matrix act_on(const SymmetryRep& rep, const Factors& factors, const std::vector<bool>& moved, int g,
              const Matrix& o) {
  Dims dims = dims_of(factors);
  Matrix m = o;
  for (std::size_t p = 0; p < factors.size(); ++p) {
    if (!moved[p]) continue;
    LocalAction a = rep.local(factors[p], g);
    if (a.transpose) m = partial_transpose(m, dims, static_cast<int>(p));
    m = sandwich_factor(m, dims, static_cast<int>(p), a.n);
  }
  return m;
}

Matrix act_collective(const SymmetryRep& rep, const Factors& factors, int g, const Matrix& o) {
  return act_on(rep, factors, std::vector<bool>(factors.size(), true), g, o);
}

ReferenceFrame build_reference_frame(const SymmetryRep& rep, const std::string& sys_id) {
  if (rep.has_antilinear()) {
    throw ValidationError("build_reference_frame: regular frames need a unitary representation");
  }
  const FiniteGroup& group = rep.group();
  const int n = group.order();
  ReferenceFrame rf;
  rf.system = {sys_id, n};
  rf.matrices = regular_representation(group);
  rf.antilinear.assign(n, false);
  rf.fiducial = Vector::Zero(n);
  rf.fiducial(group.identity()) = 1.0;
  for (int g = 0; g < n; ++g) rf.frame_states.push_back(rf.matrices[g] * rf.fiducial);
  Matrix defect = rf.gram() - Matrix::Identity(n, n);
  if (max_abs(defect) > kDefaultTol) {
    throw ValidationError("build_reference_frame: Gram defect " + std::to_string(max_abs(defect)));
  }
  return rf;
}

ReferenceFrame time_reversal_frame(const std::string& sys_id) {
  ReferenceFrame rf;
  rf.system = {sys_id, 2};
  rf.matrices = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  rf.antilinear = {false, true};
  const double s = 1.0 / std::sqrt(2.0);
  Vector plus_y(2);
  plus_y << s, Complex(0, s);
  rf.fiducial = plus_y;
  rf.frame_states = {plus_y, plus_y.conjugate()};
  return rf;
}

namespace {

SymmetryRep diagonal_phase_rep(const Factors& systems, int n) {
  std::vector<SystemAction> actions;
  for (const auto& s : systems) {
    SystemAction a;
    a.system = s;
    for (int k = 0; k < n; ++k) {
      Matrix v = Matrix::Zero(s.dim, s.dim);
      for (int j = 0; j < s.dim; ++j) {
        v(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * k * j / n);
      }
      if (n == 2) v = v.real().cast<Complex>();
      a.matrices.push_back(v);
      a.antilinear.push_back(false);
    }
    actions.push_back(std::move(a));
  }
  return SymmetryRep(FiniteGroup::cyclic(n), std::move(actions));
}

}  // namespace

SymmetryRep z2_phase_rep(const Factors& systems) { return diagonal_phase_rep(systems, 2); }

SymmetryRep z3_cyclic_rep(const Factors& systems) { return diagonal_phase_rep(systems, 3); }

SymmetryRep time_reversal_rep(const Factors& systems, const std::map<std::string, Matrix>& bases) {
  std::vector<SystemAction> actions;
  for (const auto& s : systems) {
    SystemAction a;
    a.system = s;
    a.matrices = {Matrix::Identity(s.dim, s.dim), Matrix::Identity(s.dim, s.dim)};
    a.antilinear = {false, true};
    auto it = bases.find(s.id);
    if (it != bases.end()) a.conj_basis = it->second;
    actions.push_back(std::move(a));
  }
  return SymmetryRep(FiniteGroup::cyclic(2), std::move(actions));
}

SymmetryRep trivial_rep(const Factors& systems, int group_order) {
  std::vector<SystemAction> actions;
  for (const auto& s : systems) {
    SystemAction a;
    a.system = s;
    a.matrices.assign(group_order, Matrix::Identity(s.dim, s.dim));
    a.antilinear.assign(group_order, false);
    actions.push_back(std::move(a));
  }
  return SymmetryRep(FiniteGroup::cyclic(group_order), std::move(actions));
}

SymmetryRep preset_rep(const std::string& name, const Factors& systems) {
  if (name == "trivial") return trivial_rep(systems);
  if (name == "z2phase") return z2_phase_rep(systems);
  if (name == "z3cyclic") return z3_cyclic_rep(systems);
  if (name == "time-reversal" || name == "conjugation") return time_reversal_rep(systems);
  throw LabelError("unknown symmetry preset '" + name + "'");
}

std::vector<std::string> preset_rep_names() {
  return {"trivial", "z2phase", "z3cyclic", "time-reversal", "conjugation"};
}

}  // namespace twirlkit
