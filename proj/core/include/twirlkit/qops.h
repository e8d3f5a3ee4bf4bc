#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twirlkit/linalg.h"

namespace twirlkit {

struct SystemLabel {
  std::string id;
  int dim = 1;

  bool operator==(const SystemLabel& other) const = default;
};

using Factors = std::vector<SystemLabel>;

/// Throws LabelError on duplicate ids and ValidationError on dim < 1.
void validate_factors(const Factors& factors);
Dims dims_of(const Factors& factors);
int total_dim(const Factors& factors);
/// Position of `id` in `factors`, or -1.
int index_of(const Factors& factors, const std::string& id);
std::string describe(const Factors& factors);
/// Concatenation; throws LabelError on id collision.
Factors concat(const Factors& a, const Factors& b);
/// Permutation p with reordered[k] = factors[p[k]] for the given id order.
std::vector<int> permutation_to(const Factors& factors, const std::vector<std::string>& ids);
Factors reorder(const Factors& factors, const std::vector<int>& perm);

enum class Role { kState, kEffect, kGeneric };

/// Hermitian operator on an ordered tensor product of labelled systems.
class HermitianOperator {
 public:
  /// Validates shape and Hermiticity, plus role constraints (states PSD with
  /// trace ≤ 1, effects 0 ≤ E ≤ 𝟙).
  HermitianOperator(Factors factors, Matrix matrix, Role role = Role::kGeneric,
                    double tol = kDefaultTol);

  static HermitianOperator state(Factors factors, Matrix matrix, double tol = kDefaultTol) {
    return HermitianOperator(std::move(factors), std::move(matrix), Role::kState, tol);
  }
  static HermitianOperator effect(Factors factors, Matrix matrix, double tol = kDefaultTol) {
    return HermitianOperator(std::move(factors), std::move(matrix), Role::kEffect, tol);
  }

  const Factors& factors() const { return factors_; }
  const Matrix& matrix() const { return matrix_; }
  Role role() const { return role_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  Dims dims() const { return dims_of(factors_); }
  double trace() const { return matrix_.trace().real(); }

  /// Same operator with another role, re-validated.
  HermitianOperator with_role(Role role, double tol = kDefaultTol) const;
  /// Same operator with factors permuted into the order given by `ids`.
  HermitianOperator reordered(const std::vector<std::string>& ids) const;

 private:
  Factors factors_;
  Matrix matrix_;
  Role role_;
};

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator partial_trace(const HermitianOperator& o, const std::set<std::string>& keep);
bool is_psd(const HermitianOperator& o, double tol = kDefaultTol);
double min_eigenvalue(const HermitianOperator& o);
/// Born rule tr(E ρ); factor orders may differ but the label sets must agree.
double born_probability(const HermitianOperator& effect, const HermitianOperator& state);

/// Complex conjugation relative to an orthonormal basis, chosen per system id.
/// Systems without an entry use the computational basis.
class ConjugationOp {
 public:
  ConjugationOp() = default;
  explicit ConjugationOp(std::map<std::string, Matrix> bases);

  /// Basis matrix (columns are basis vectors) for a system.
  Matrix basis_for(const SystemLabel& system) const;
  /// M = B Bᵀ; conjugation in basis B acts as O ↦ M Ō M†.
  Matrix conjugator_for(const SystemLabel& system) const;
  const std::map<std::string, Matrix>& bases() const { return bases_; }

 private:
  std::map<std::string, Matrix> bases_;
};

/// Entrywise complex conjugation in the chosen basis.
HermitianOperator conjugate(const ConjugationOp& c, const HermitianOperator& o);
/// Conjugation on the selected factors only, extended real-linearly over the
/// Hermitian operator space (partial transpose up to the basis sandwich).
HermitianOperator conjugate_partial(const ConjugationOp& c, const HermitianOperator& o,
                                    const std::set<std::string>& on);

struct ChannelFlags {
  bool hermitian_preserving = false;
  bool cp = false;
  bool tp = false;
  bool trace_nonincreasing = false;

  bool operator==(const ChannelFlags& other) const = default;
};

/// Linear map between operator spaces stored as its Choi matrix
/// J = Σ_ij |i⟩⟨j| ⊗ ℰ(|i⟩⟨j|), input factor first.
class Superoperator {
 public:
  Superoperator(Factors in, Factors out, Matrix choi);

  static Superoperator identity(const Factors& systems);
  /// X ↦ U X U†.
  static Superoperator unitary(const Factors& systems, const Matrix& u);
  /// X ↦ L X R† between possibly different spaces.
  static Superoperator sandwich(const Factors& in, const Factors& out, const Matrix& l,
                                const Matrix& r);
  static Superoperator kraus(const Factors& in, const Factors& out,
                             const std::vector<Matrix>& ops);
  /// Preparation: input space is trivial, Choi equals ρ.
  static Superoperator from_state(const HermitianOperator& rho);
  /// Effect functional X ↦ tr(E X): output space is trivial, Choi equals Eᵀ.
  static Superoperator from_effect(const HermitianOperator& e);
  /// X ↦ N Xᵀ N†; with N = B Bᵀ this is conjugation in basis B.
  static Superoperator transpose_sandwich(const Factors& systems, const Matrix& n);
  /// Trace out the input and prepare ρ.
  static Superoperator trace_and_prepare(const Factors& in, const HermitianOperator& rho);

  const Factors& in_factors() const { return in_; }
  const Factors& out_factors() const { return out_; }
  const Matrix& choi() const { return choi_; }
  int in_dim() const { return total_dim(in_); }
  int out_dim() const { return total_dim(out_); }
  Dims in_dims() const { return dims_of(in_); }
  Dims out_dims() const { return dims_of(out_); }

  /// Flags at the default tolerance, computed once and shared between copies.
  const ChannelFlags& flags() const;
  /// Flags at an explicit tolerance, always recomputed.
  ChannelFlags compute_flags(double tol) const;
  /// Flags known by construction (set by named constructors), if any.
  const std::optional<ChannelFlags>& declared_flags() const { return declared_; }

  bool is_cp(double tol = kDefaultTol) const { return compute_flags(tol).cp; }
  bool is_tp(double tol = kDefaultTol) const { return compute_flags(tol).tp; }

  /// Same map with its factors permuted into the given id orders.
  Superoperator reordered(const std::vector<std::string>& in_ids,
                          const std::vector<std::string>& out_ids) const;
  /// Same map with all labels renamed through `rename` (missing ids kept).
  Superoperator relabeled(const std::map<std::string, std::string>& rename) const;

  /// Applies the map to a raw matrix on the input space (no validation).
  Matrix apply_matrix(const Matrix& x) const;

 private:
  struct FlagCache;

  Superoperator with_declared(ChannelFlags f) &&;

  Factors in_;
  Factors out_;
  Matrix choi_;
  std::shared_ptr<FlagCache> cache_;
  std::optional<ChannelFlags> declared_;
};

/// ℰ(ρ) = Tr_in[(ρᵀ ⊗ 𝟙) J]. The state's factors may be in any order.
HermitianOperator apply(const Superoperator& s, const HermitianOperator& o);

/// Applies s to the factors of `rho` named by s.in_factors(). The result's
/// factors are s.out_factors() followed by the untouched factors of rho.
Matrix apply_partial(const Superoperator& s, const Matrix& rho, const Factors& rho_factors,
                     Factors* result_factors);

/// s1 ∘ s2 (s2 acts first). s2's outputs must equal s1's inputs as sets.
Superoperator compose_seq(const Superoperator& s1, const Superoperator& s2);
/// s1 ⊗ s2 with inputs (in1, in2) and outputs (out1, out2).
Superoperator compose_par(const Superoperator& s1, const Superoperator& s2);

/// Choi of 𝒲∘ℰ where 𝒲 acts on output factor p as Y ↦ L Y' L†, with
/// Y' = Yᵀ when `transpose` is set. Output factor p's dim becomes L.rows().
Matrix choi_after_local(const Matrix& choi, const Dims& in, const Dims& out, int p,
                        const Matrix& l, bool transpose);
/// Choi of ℰ∘𝒲 where 𝒲 acts on input factor p as X ↦ L X' L†. Input factor
/// p's dim becomes L.cols().
Matrix choi_before_local(const Matrix& choi, const Dims& in, const Dims& out, int p,
                         const Matrix& l, bool transpose);

/// Vectorization |v⟩ = Σ_i |i⟩ ⊗ L|i⟩ used by sandwich Choi matrices.
Vector choi_vector(const Matrix& l);

}  // namespace twirlkit
