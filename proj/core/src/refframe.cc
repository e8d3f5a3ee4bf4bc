#include "twirlkit/refframe.h"

#include <algorithm>
#include <cmath>

namespace twirlkit {

namespace {

void require_bipartite(const HermitianOperator& rho) {
  if (rho.factors().size() != 2) {
    throw ShapeError("shared reference frame tests need a bipartite state, got " + describe(rho.factors()));
  }
}

Matrix relational_image(const SymmetryRep& rep, const HermitianOperator& rho, const Matrix& m, int g) {
  return act_on(rep, rho.factors(), {false, true}, g, m);
}

}  // namespace

double relational_defect(const SymmetryRep& rep, const HermitianOperator& rho) {
  require_bipartite(rho);
  Matrix tau = twirl_operator(rep, rho).matrix();
  double worst = 0.0;
  for (int g = 0; g < rep.order(); ++g) {
    if (g == rep.group().identity()) continue;
    worst = std::max(worst, max_abs_diff(tau, relational_image(rep, rho, tau, g)));
  }
  return worst;
}

double relational_overlap(const SymmetryRep& rep, const HermitianOperator& rho, int g) {
  require_bipartite(rho);
  Matrix tau = twirl_operator(rep, rho).matrix();
  return (tau * relational_image(rep, rho, tau, g)).trace().real();
}

bool is_shared_rf_state(const SymmetryRep& rep, const HermitianOperator& rho, double tol) {
  return relational_defect(rep, rho) > tol;
}

bool is_perfect_shared_rf(const SymmetryRep& rep, const HermitianOperator& rho, double tol) {
  if (!is_shared_rf_state(rep, rho, tol)) return false;
  for (int g = 0; g < rep.order(); ++g) {
    if (g == rep.group().identity()) continue;
    if (std::abs(relational_overlap(rep, rho, g)) > tol) return false;
  }
  return true;
}

double representation_choice_defect(const SymmetryRep& rep, const HermitianOperator& rho) {
  require_bipartite(rho);
  double worst = 0.0;
  for (int g = 0; g < rep.order(); ++g) {
    Matrix second = act_on(rep, rho.factors(), {false, true}, g, rho.matrix());
    Matrix first = act_on(rep, rho.factors(), {true, false}, rep.group().inverse(g), rho.matrix());
    worst = std::max(worst, max_abs_diff(second, first));
  }
  return worst;
}

HermitianOperator maximally_entangled(const Factors& pair) {
  if (pair.size() != 2 || pair[0].dim != pair[1].dim) {
    throw ShapeError("maximally entangled state needs two systems of equal dimension");
  }
  const int d = pair[0].dim;
  Vector v = Vector::Zero(d * d);
  for (int k = 0; k < d; ++k) v(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return HermitianOperator::state(pair, v * v.adjoint());
}

ShareBatteryReport separable_share_battery(const SymmetryRep& rep, const Factors& pair, int samples, Rng& rng,
                                         double tol) {
  if (pair.size() != 2) throw ShapeError("share battery needs exactly two systems");
  SymmetryRep r1 = rep.restricted({pair[0].id});
  SymmetryRep r2 = rep.restricted({pair[1].id});
  auto invariant_local = [&](const SystemLabel& s, const SymmetryRep& r) {
    return twirl_operator(r, HermitianOperator::state({s}, random_density(s.dim, rng))).matrix();
  };
  ShareBatteryReport report;
  std::uniform_int_distribution<int> terms(1, 4);
  for (int n = 0; n < samples; ++n) {
    const int k = terms(rng);
    std::vector<double> p = random_probabilities(k, rng);
    Matrix mix = Matrix::Zero(total_dim(pair), total_dim(pair));
    for (int i = 0; i < k; ++i) mix += p[i] * kron(invariant_local(pair[0], r1), invariant_local(pair[1], r2));
    HermitianOperator rho = HermitianOperator::state(pair, mix);
    ++report.samples;
    double defect = relational_defect(rep, rho);
    report.max_violation = std::max(report.max_violation, defect);
    if (defect > tol) ++report.positives;
    report.max_invariance_defect = std::max(report.max_invariance_defect, invariance_defect(rep, rho));
    report.max_representation_defect = std::max(report.max_representation_defect, representation_choice_defect(rep, rho));
  }
  HermitianOperator control = maximally_entangled(pair);
  report.control_shared = is_shared_rf_state(rep, control, tol);
  report.control_perfect = is_perfect_shared_rf(rep, control, tol);
  return report;
}

}  // namespace twirlkit
