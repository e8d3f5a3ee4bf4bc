#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "twirlkit/circuit_io.h"
#include "twirlkit/gptcore.h"
#include "twirlkit/refframe.h"
#include "twirlkit/verification.h"

namespace twirlkit::cli {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void Report::key(const std::string& k, double v) { key(k, fmt(v)); }

void Report::check(const std::string& name, bool ok, const std::string& detail) {
  checks_.push_back({name, ok, detail});
}

void Report::add(const std::vector<Check>& checks) {
  for (const auto& c : checks) checks_.push_back(c);
}

bool Report::ok() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.ok; });
}

std::string Report::render(const std::string& format) const {
  std::ostringstream os;
  const bool human = format != "machine";
  const bool machine = format != "human";
  if (human) {
    os << "twirlkit " << command_ << "\n";
    for (const auto& l : lines_) os << "  " << l << "\n";
    for (const auto& c : checks_) {
      os << "  [" << (c.ok ? "PASS" : "FAIL") << "] " << c.name;
      if (!c.detail.empty()) os << "  (" << c.detail << ")";
      os << "\n";
    }
    os << "result: " << (ok() ? "PASS" : "FAIL") << "\n";
  }
  if (machine) {
    if (human) os << "\n";
    os << "```machine\n";
    os << "command=" << command_ << "\n";
    for (const auto& [k, v] : keys_) os << k << "=" << v << "\n";
    for (std::size_t i = 0; i < checks_.size(); ++i) {
      os << "check." << i << ".name=" << checks_[i].name << "\n";
      os << "check." << i << ".pass=" << (checks_[i].ok ? 1 : 0) << "\n";
      if (!checks_[i].detail.empty()) os << "check." << i << ".detail=" << checks_[i].detail << "\n";
    }
    os << "result=" << (ok() ? "pass" : "fail") << "\n";
    os << "exit_code=" << exit_code() << "\n";
    os << "```\n";
  }
  return os.str();
}

namespace {

/// Input problems detected by the CLI itself.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::string map;
  std::string group;
  std::string format = "both";
};

const Factors kA = {{"A", 2}};
const Factors kAB = {{"A", 2}, {"B", 2}};

Check make(const std::string& name, bool ok, const std::string& detail = "") { return {name, ok, detail}; }

Check max_check(const std::string& name, double err, double tol) {
  return make(name, err <= tol, "max_err=" + fmt(err));
}

Matrix proj(const Vector& v) { return v * v.adjoint(); }

Vector bell_vector() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1 / std::sqrt(2.0);
  return v;
}

// Invariant suites. Each returns its checks; the RNG is seeded per suite.

std::vector<Check> suite_qops(std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<Check> out;
  Factors b = {{"B", 3}};
  Factors c = {{"C", 2}};
  bool cptp = true;
  double assoc = 0.0;
  double apply_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    Superoperator e1 = random_channel(kA, b, rng);
    Superoperator e2 = random_channel(b, c, rng);
    Superoperator e3 = random_channel(c, {{"D", 2}}, rng);
    cptp = cptp && e1.is_cp(tol) && e1.is_tp(tol);
    assoc = std::max(assoc, max_abs_diff(compose_seq(e3, compose_seq(e2, e1)).choi(),
                                         compose_seq(compose_seq(e3, e2), e1).choi()));
    HermitianOperator rho = HermitianOperator::state(kA, random_density(2, rng));
    Matrix direct = compose_seq(e2, e1).apply_matrix(rho.matrix());
    apply_err = std::max(apply_err, max_abs_diff(apply(e2, apply(e1, rho)).matrix(), direct));
  }
  out.push_back(make("random channels are CPTP", cptp));
  out.push_back(max_check("sequential composition is associative", assoc, tol));
  out.push_back(max_check("composite applies like its factors", apply_err, tol));
  Matrix r = random_density(2, rng);
  Matrix s = random_density(3, rng);
  out.push_back(max_check("partial trace of a product", max_abs_diff(partial_trace(kron(r, s), {2, 3}, {true, false}), r), tol));
  Matrix e = random_effect(2, rng);
  out.push_back(max_check("effect Choi is the transpose",
                          max_abs_diff(Superoperator::from_effect(HermitianOperator::effect(kA, e)).choi(), e.transpose()),
                          tol));
  return out;
}

std::vector<Check> suite_symmetrize(std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<Check> out;
  Factors q = {{"A", 3}};
  SymmetryRep z3 = z3_cyclic_rep(q);
  double idem = 0.0;
  double inv = 0.0;
  double cov = 0.0;
  for (int i = 0; i < 10; ++i) {
    HermitianOperator o(q, random_hermitian(3, rng));
    HermitianOperator t = twirl_operator(z3, o);
    idem = std::max(idem, max_abs_diff(twirl_operator(z3, t).matrix(), t.matrix()));
    inv = std::max(inv, invariance_defect(z3, t));
    cov = std::max(cov, covariance_defect(z3, twirl_superop(z3, random_channel(q, q, rng))));
  }
  out.push_back(max_check("twirl is idempotent", idem, tol));
  out.push_back(max_check("twirled operators are invariant", inv, tol));
  out.push_back(max_check("twirled channels are covariant", cov, tol));
  SymmetryRep tr = time_reversal_rep(kA);
  int op_agree = 0;
  for (int i = 0; i < 200; ++i) {
    HermitianOperator o(kA, i % 2 == 0 ? Matrix(random_real_density(2, rng)) : random_density(2, rng));
    op_agree += swirl_membership(tr, o, tol) == is_rqt_operator(o, {}, tol) ? 1 : 0;
  }
  int ch_agree = 0;
  int crp_agree = 0;
  for (int i = 0; i < 100; ++i) {
    Superoperator s = i % 2 == 0 ? random_real_channel(kA, kA, rng) : random_channel(kA, kA, rng);
    ch_agree += swirl_membership(tr, s, tol) == is_rqt_channel(s, {}, tol) ? 1 : 0;
    crp_agree += is_rqt_channel(s, {}, tol) == is_completely_real_preserving(s, 2, {}, tol) ? 1 : 0;
  }
  out.push_back(make("time-reversal swirl membership equals RQT on operators", op_agree == 200,
                     std::to_string(op_agree) + "/200"));
  out.push_back(make("time-reversal swirl membership equals RQT on channels", ch_agree == 100,
                     std::to_string(ch_agree) + "/100"));
  out.push_back(make("real Choi equals completely real preserving", crp_agree == 100,
                     std::to_string(crp_agree) + "/100"));
  return out;
}

/// Prepare-transform-measure statistics of a simulator on random triples.
double ptm_error(const Simulator& sim, const Factors& in, const Factors& out, Rng& rng, int n) {
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    HermitianOperator rho = HermitianOperator::state(in, random_density(total_dim(in), rng));
    Superoperator e = random_channel(in, out, rng);
    HermitianOperator eff = HermitianOperator::effect(out, random_effect(total_dim(out), rng));
    double expected = born_probability(eff, apply(e, rho));
    err = std::max(err, std::abs(born_probability(sim.map_effect(eff), apply(sim.map(e), sim.map_state(rho))) - expected));
  }
  return err;
}

std::vector<Check> suite_simmaps(std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<Check> out;
  for (const char* rep_name : {"z2phase", "z3cyclic"}) {
    Factors in = {{"A", 2}};
    Factors o = {{"B", 3}};
    SymmetryRep rep = preset_rep(rep_name, concat(in, o));
    for (MapKind kind : {MapKind::kDollar, MapKind::kEuro}) {
      Simulator sim(rep, kind);
      std::string tag = map_name(kind) + " " + rep_name;
      out.push_back(max_check(tag + " prepare-transform-measure statistics", ptm_error(sim, in, o, rng, 10), tol));
      double fun = 0.0;
      for (int i = 0; i < 3; ++i) {
        Superoperator e1 = random_channel(in, o, rng);
        Superoperator e2 = random_channel(o, {{"C", 2}}, rng);
        Superoperator e3 = random_channel({{"D", 2}}, {{"E", 2}}, rng);
        Simulator wide(preset_rep(rep_name, {{"A", 2}, {"B", 3}, {"C", 2}, {"D", 2}, {"E", 2}}), kind);
        fun = std::max({fun, sequential_defect(wide, e2, e1), parallel_defect(wide, e1, e3)});
      }
      out.push_back(max_check(tag + " commutes with composition", fun, tol));
      if (kind == MapKind::kDollar) {
        double cov = 0.0;
        for (int i = 0; i < 5; ++i) {
          Superoperator img = sim.map(random_channel(in, o, rng));
          cov = std::max(cov, covariance_defect(sim.extended_rep(concat(in, o)), img));
        }
        out.push_back(max_check(tag + " images are covariant", cov, tol));
      }
    }
  }
  SymmetryRep tr1 = time_reversal_rep(kA);
  double stat = 0.0;
  for (int i = 0; i < 20; ++i) {
    HermitianOperator rho = HermitianOperator::state(kA, random_density(2, rng));
    HermitianOperator eff = HermitianOperator::effect(kA, random_effect(2, rng));
    stat = std::max(stat, std::abs(born_probability(dollarC_effect(tr1, eff), dollarC_state(tr1, rho)) -
                                   born_probability(eff, rho)));
  }
  out.push_back(max_check("dollarC unipartite statistics", stat, tol));
  double bell_min = min_eigenvalue(dollarC_state(time_reversal_rep(kAB), HermitianOperator::state(kAB, proj(bell_vector()))).matrix());
  out.push_back(make("dollarC Bell image min eigenvalue is -1/8", std::abs(bell_min + 0.125) <= tol,
                     "min_eig=" + fmt(bell_min)));
  NonlinearityWitness w = euroC_nonlinearity_witness();
  Vector v00 = Vector::Zero(4);
  v00(0) = 1.0;
  out.push_back(make("euroC maps |00> to |00> and i|00> to 0",
                     w.image_of_00 == v00 && w.image_of_i00 == Vector::Zero(4) && !w.complex_linear));
  return out;
}

std::vector<Check> suite_refframe(std::uint64_t seed, double tol) {
  Rng rng(seed);
  Factors pair = {{"R1", 2}, {"R2", 2}};
  SymmetryRep rep = z2_phase_rep(pair);
  ShareBatteryReport b = separable_share_battery(rep, pair, 100, rng, tol);
  std::vector<Check> out;
  out.push_back(make("separable twirled-world samples are never shared frames", b.positives == 0,
                     std::to_string(b.positives) + "/" + std::to_string(b.samples) +
                         " positives, max_violation=" + fmt(b.max_violation)));
  out.push_back(make("Bell control is a perfect shared frame", b.control_shared && b.control_perfect,
                     "overlap=" + fmt(relational_overlap(rep, maximally_entangled(pair), 1))));
  out.push_back(max_check("relational action representation choice on invariant samples", b.max_representation_defect, tol));
  Matrix noisy = 0.9 * proj(bell_vector()) + 0.1 * Matrix::Identity(4, 4) / 4.0;
  out.push_back(make("noisy Bell state is shared but not perfect",
                     is_shared_rf_state(rep, HermitianOperator::state(pair, noisy), tol) &&
                         !is_perfect_shared_rf(rep, HermitianOperator::state(pair, noisy), tol)));
  return out;
}

std::vector<Check> suite_gpt(std::uint64_t seed, double tol) {
  Rng rng(seed);
  std::vector<Check> out;
  struct Case {
    const char* theory;
    const char* sym;
    SymmetryClass expected;
  };
  for (const Case& c : {Case{"qt:2", "time-reversal", SymmetryClass::kStronglyNonphysical},
                        Case{"pmqt:2", "z2phase", SymmetryClass::kWeaklyNonphysical},
                        Case{"pptworld:2", "conjugation", SymmetryClass::kPhysical}}) {
    GptTheory t = theory_from_name(c.theory);
    Classification cl = classify_symmetry(t, symmetry_from_name(t, c.sym), tol);
    out.push_back(make(std::string("classify ") + c.theory + " " + c.sym + " is " + class_name(c.expected),
                       cl.verdict == c.expected, class_name(cl.verdict)));
  }
  GptTheory qt = quantum_as_gpt(2);
  GptSymmetry sym = symmetry_from_name(qt, "z2phase");
  Simulator sim(z2_phase_rep({{"A", 2}, {"B", 2}}), MapKind::kDollar);
  double err = 0.0;
  for (int i = 0; i < 5; ++i) {
    Superoperator ch = random_channel(kA, {{"B", 2}}, rng);
    DollarTResult r = dollar_T(qt, sym, {{2}, {2}, superop_to_transfer(ch)}, quantum_frame(sym.group), tol);
    if (!r.accepted) {
      err = 1.0;
      break;
    }
    err = std::max(err, (r.image->matrix - superop_to_transfer(sim.map(ch))).cwiseAbs().maxCoeff());
  }
  out.push_back(max_check("dollar_T matches dollar under the Hermitian-vector isomorphism", err, tol));
  auto fid = [](const Vector& v) { return HermitianOperator::effect(kA, proj(v)); };
  const double s = 1 / std::sqrt(2.0);
  Vector xp(2), yp(2), zp(2);
  xp << s, s;
  yp << s, Complex(0, s);
  zp << 1, 0;
  FiducialRepresentation fr =
      fiducial_representation({HermitianOperator::state(kA, proj(zp))},
                              {fid(xp), fid(yp), fid(zp), HermitianOperator::effect(kA, Matrix::Identity(2, 2))});
  RealVector expected(4);
  expected << 0.5, 0.5, 1, 1;
  out.push_back(max_check("fiducial vector of |0><0|", (fr.state_vectors[0] - expected).cwiseAbs().maxCoeff(), tol));
  return out;
}

std::vector<Check> suite_circuits(std::uint64_t, double tol) {
  std::vector<Check> out;
  double chsh = chsh_value(evaluate(*preset("chsh").circuit));
  out.push_back(make("CHSH reference circuit reaches 2 sqrt 2", std::abs(chsh - 2 * std::sqrt(2.0)) <= 1e-6,
                     "value=" + fmt(chsh)));
  for (const auto& name : preset_names()) {
    Preset p = preset(name);
    DistrictFactorization f = district_factorization_check(p.structure, evaluate(*p.circuit), tol);
    out.push_back(max_check("district factorization on " + name, f.max_error, tol));
    if (!p.metadata.expected_verdict.empty()) {
      std::string v = gap_necessary_conditions(p.structure, p.metadata).verdict();
      out.push_back(make("gap verdict for " + name, v == p.metadata.expected_verdict, v));
    }
  }
  return out;
}

using Suite = std::function<std::vector<Check>(std::uint64_t, double)>;

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> all = {
      {"qops", suite_qops},         {"symmetrize", suite_symmetrize}, {"simmaps", suite_simmaps},
      {"refframe", suite_refframe}, {"gpt", suite_gpt},               {"circuits", suite_circuits}};
  return all;
}

MapKind map_or(const Options& o, MapKind fallback) { return o.map.empty() ? fallback : parse_map_kind(o.map); }

std::string default_group(MapKind kind) { return kind == MapKind::kDollarC ? "time-reversal" : "z2phase"; }

/// Circuit file path, or a preset name (a path's stem is tried as a name).
CircuitDocument resolve_circuit(const std::string& target) {
  namespace fs = std::filesystem;
  for (const std::string& p : {target, target + ".json"}) {
    if (fs::is_regular_file(p)) return load_circuit_file(p);
  }
  const std::string stem = fs::path(target).stem().string();
  for (const auto& name : {target, stem}) {
    try {
      return document_of(preset(name));
    } catch (const LabelError&) {
    }
  }
  throw InputError("no circuit file or preset named '" + target + "'");
}

Simulator make_simulator(const Options& o, const CircuitDocument& doc, MapKind kind) {
  if (o.group.empty() && doc.rep) return Simulator(*doc.rep, kind);
  const std::string group = o.group.empty() ? default_group(kind) : o.group;
  if (std::filesystem::is_regular_file(group)) {
    CircuitDocument g = load_circuit_file(group);
    if (!g.rep) throw InputError("group file '" + group + "' has no reps block");
    return Simulator(*g.rep, kind);
  }
  return Simulator(preset_rep(group, doc.circuit.gpt_factors()), kind);
}

void add_simulation(Report& r, const SimulationReport& s) {
  r.key("map", s.map);
  r.key("statistics_max_error", s.statistics_max_error);
  r.key("all_valid", s.all_valid ? "1" : "0");
  r.key("min_eigenvalue", s.min_eigenvalue);
  r.key("min_eigenvalue_gate", s.min_eigenvalue_gate);
  r.key("functoriality_max_error", s.functoriality_max_error);
  r.key("functoriality_checked", std::to_string(s.functoriality_checked));
  r.key("functoriality_skipped", std::to_string(s.functoriality_skipped));
  for (const auto& g : s.gates) {
    r.line("gate " + g.gate + ": " + (g.valid() ? "valid" : "INVALID") + " (cp=" + (g.cp ? "1" : "0") +
           " tp=" + (g.tp ? "1" : "0") + " member=" + (g.member ? "1" : "0") +
           " min_eig=" + fmt(g.min_eigenvalue) + ")");
    r.key("gate." + g.gate + ".valid", g.valid() ? "1" : "0");
  }
  r.line("images: " + std::string(s.all_valid ? "valid" : "INVALID") + ", min eigenvalue " + fmt(s.min_eigenvalue) +
         (s.min_eigenvalue_gate.empty() ? "" : " at gate " + s.min_eigenvalue_gate));
  if (!s.failure_witness.empty()) {
    r.line("witness: " + s.failure_witness);
    r.key("failure_witness", s.failure_witness);
  }
  r.check("statistics preserved", s.statistics_ok(), "max_err=" + fmt(s.statistics_max_error));
  r.check("images in the twirled world", s.all_valid,
          s.all_valid ? "" : "INVALID, min_eig=" + fmt(s.min_eigenvalue));
  r.check("functoriality", s.functorial(),
          "max_err=" + fmt(s.functoriality_max_error) + ", pairs=" + std::to_string(s.functoriality_checked) +
              ", skipped=" + std::to_string(s.functoriality_skipped));
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& v : s) out += (out.empty() ? "" : ",") + v;
  return out.empty() ? "-" : out;
}

std::string join(const std::vector<std::string>& s) {
  std::string out;
  for (const auto& v : s) out += (out.empty() ? "" : ",") + v;
  return out.empty() ? "-" : out;
}

Report cmd_verify(const std::string& suite, const std::string& fixture, const Options& o) {
  Report r("verify " + suite);
  r.key("suite", suite);
  r.key("seed", std::to_string(o.seed));
  r.key("tol", o.tol);
  bool found = false;
  for (const auto& [name, fn] : suites()) {
    if (suite != "all" && suite != name) continue;
    found = true;
    std::vector<Check> checks = fn(o.seed, o.tol);
    for (auto& c : checks) c.name = name + ": " + c.name;
    r.add(checks);
  }
  if (!found) throw InputError("unknown suite '" + suite + "' (qops, symmetrize, simmaps, refframe, gpt, circuits, all)");
  if (!fixture.empty()) {
    CircuitDocument doc = load_circuit_file(fixture);
    MapKind kind = map_or(o, MapKind::kDollar);
    SimulationReport s = verify_simulation(make_simulator(o, doc, kind), doc.circuit, o.tol);
    r.line("fixture " + fixture + " under " + s.map);
    add_simulation(r, s);
  }
  return r;
}

Report cmd_scenario(const std::string& name, const Options& o) {
  Preset p = preset(name);
  Report r("scenario " + name);
  r.key("scenario", p.name);
  r.line(p.description);
  Distribution d = evaluate(*p.circuit);
  std::istringstream rows(d.to_text());
  for (std::string l; std::getline(rows, l);) r.line(l);
  const bool chsh_shape = d.outputs == std::vector<std::string>{"a", "b"} && d.inputs == std::vector<std::string>{"x", "y"};
  if (chsh_shape) {
    double v = chsh_value(d);
    r.line("CHSH value " + fmt(v) + " (2 sqrt 2 = " + fmt(2 * std::sqrt(2.0)) + ")");
    r.key("chsh", v);
    r.check("CHSH value is 2 sqrt 2", std::abs(v - 2 * std::sqrt(2.0)) <= 1e-6, "value=" + fmt(v));
  }
  if (!o.map.empty()) {
    MapKind kind = parse_map_kind(o.map);
    CircuitDocument doc = document_of(p);
    Simulator sim = make_simulator(o, doc, kind);
    SimulationReport s = verify_simulation(sim, *p.circuit, o.tol);
    r.key("group", o.group.empty() ? default_group(kind) : o.group);
    add_simulation(r, s);
    if (chsh_shape) {
      double mv = chsh_value(evaluate(map_circuit(sim, *p.circuit)));
      r.key("mapped_chsh", mv);
      r.check("mapped CHSH value matches", std::abs(mv - chsh_value(d)) <= o.tol, "value=" + fmt(mv));
    }
  }
  return r;
}

Report cmd_district(const std::string& target, const Options& o) {
  CircuitDocument doc = resolve_circuit(target);
  CausalStructure cs = structure_of(doc.circuit);
  Report r("district " + target);
  r.key("structure", doc.name);
  std::vector<District> ds = districts(cs);
  GapReport gap = gap_necessary_conditions(cs, doc.metadata);
  r.key("districts", std::to_string(ds.size()));
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const District& d = ds[k];
    const DistrictReport& dr = gap.districts[k];
    r.line("district " + std::to_string(k) + ": gates " + join(d.gates) + "; O=" + join(d.outputs) +
           " I=" + join(d.inputs) + " reconnected=" + join(d.reconnected) + " latent=" + join(d.latent_wires));
    r.line("  " + std::string(dr.excluded ? "gap excluded" : "no exclusion") + ": " + dr.reason);
    const std::string p = "district." + std::to_string(k) + ".";
    r.key(p + "gates", join(d.gates));
    r.key(p + "outputs", join(d.outputs));
    r.key(p + "inputs", join(d.inputs));
    r.key(p + "excluded", dr.excluded ? "1" : "0");
    r.key(p + "reason", dr.reason);
  }
  r.line("algebraic: " + std::string(gap.algebraic ? (*gap.algebraic ? "yes" : "no") : "unknown"));
  for (const auto& reason : gap.reasons) r.line("reason: " + reason);
  r.line("verdict: " + gap.verdict());
  r.key("verdict", gap.verdict());
  if (!doc.metadata.expected_verdict.empty()) {
    r.check("verdict matches the structure's stated verdict", gap.verdict() == doc.metadata.expected_verdict,
            "stated=" + doc.metadata.expected_verdict);
  }
  if (doc.circuit.evaluable_ops()) {
    DistrictFactorization f = district_factorization_check(cs, evaluate(doc.circuit), o.tol);
    r.key("factorization_max_error", f.max_error);
    r.check("P(O|I) factorizes over districts", f.factorizes, "max_err=" + fmt(f.max_error));
  }
  return r;
}

Report cmd_classify(const std::string& theory, const std::string& symmetry, const Options& o) {
  GptTheory t = theory_from_name(theory);
  Classification c = classify_symmetry(t, symmetry_from_name(t, symmetry), o.tol);
  Report r("classify " + theory + " " + symmetry);
  r.line("verdict: " + class_name(c.verdict));
  r.key("verdict", class_name(c.verdict));
  if (c.nonphysical_element) {
    r.line("first nonphysical element: g" + std::to_string(*c.nonphysical_element));
    r.key("nonphysical_element", std::to_string(*c.nonphysical_element));
  }
  if (!c.witness.empty()) {
    r.line("witness: " + c.witness + (c.witness_value ? " = " + fmt(*c.witness_value) : ""));
    r.key("witness", c.witness);
    if (c.witness_value) r.key("witness_value", *c.witness_value);
  }
  r.line("probed: " + join(c.probed));
  r.key("probed", std::to_string(c.probed.size()));
  return r;
}

HermitianOperator named_state(const std::string& name, const Factors& pair) {
  const int d = pair[0].dim;
  const int n = d * d;
  if (name == "phi+" || name == "bell") return maximally_entangled(pair);
  if (name == "mixed") return HermitianOperator::state(pair, Matrix::Identity(n, n) / static_cast<double>(n));
  if (name == "product") {
    Matrix m = Matrix::Zero(n, n);
    m(0, 0) = 1.0;
    return HermitianOperator::state(pair, m);
  }
  if (name == "frame") {
    // Σ_i |i, −i mod d⟩/√d, invariant under collective diagonal phases.
    Vector v = Vector::Zero(n);
    for (int i = 0; i < d; ++i) v(i * d + (d - i) % d) = 1 / std::sqrt(static_cast<double>(d));
    return HermitianOperator::state(pair, v * v.adjoint());
  }
  if (name == "plusplus") {
    Vector v = Vector::Constant(n, 1.0 / d);
    return HermitianOperator::state(pair, v * v.adjoint());
  }
  if (name.rfind("noisy:", 0) == 0) {
    double v = std::stod(name.substr(6));
    if (v < 0 || v > 1) throw InputError("visibility must be in [0, 1]");
    return HermitianOperator::state(pair, v * maximally_entangled(pair).matrix() +
                                              (1 - v) * Matrix::Identity(n, n) / static_cast<double>(n));
  }
  throw InputError("unknown state '" + name + "' (phi+, frame, mixed, product, plusplus, noisy:<v>)");
}

Report cmd_refframe(const std::string& rep_name, const std::string& state, const std::string& file, int dim,
                    const Options& o) {
  Factors pair = {{"R1", dim}, {"R2", dim}};
  std::optional<HermitianOperator> rho;
  std::optional<SymmetryRep> file_rep;
  if (!file.empty()) {
    CircuitDocument doc = load_circuit_file(file);
    for (const auto& g : doc.circuit.gates()) {
      if (!g.op || !g.in.empty() || g.out.size() != 2) continue;
      pair = g.op->out_factors();
      rho = HermitianOperator::state(pair, g.op->choi());
      break;
    }
    if (!rho) throw InputError("circuit file has no bipartite state gate");
    if (doc.rep) file_rep = doc.rep->restricted({pair[0].id, pair[1].id});
  } else {
    rho = named_state(state, pair);
  }
  SymmetryRep rep = rep_name.empty() && file_rep ? *file_rep : preset_rep(rep_name.empty() ? "z2phase" : rep_name, pair);
  Report r("refframe " + (rep_name.empty() ? std::string("file-rep") : rep_name) + " " + (file.empty() ? state : file));
  const bool shared = is_shared_rf_state(rep, *rho, o.tol);
  const bool perfect = is_perfect_shared_rf(rep, *rho, o.tol);
  r.line("shared reference frame: " + std::string(shared ? "yes" : "no"));
  r.line("perfect shared reference frame: " + std::string(perfect ? "yes" : "no"));
  r.key("shared_rf", shared ? "1" : "0");
  r.key("perfect_shared_rf", perfect ? "1" : "0");
  r.key("relational_defect", relational_defect(rep, *rho));
  for (int g = 0; g < rep.order(); ++g) {
    if (g == rep.group().identity()) continue;
    double ov = relational_overlap(rep, *rho, g);
    r.line("overlap with relational translate g" + std::to_string(g) + ": " + fmt(ov));
    r.key("overlap.g" + std::to_string(g), ov);
  }
  r.key("invariance_defect", invariance_defect(rep, *rho));
  return r;
}

Report cmd_simulate(const std::string& file, const Options& o) {
  CircuitDocument doc = load_circuit_file(file);
  MapKind kind = map_or(o, MapKind::kDollar);
  Report r("simulate " + file);
  r.key("circuit", doc.name);
  SimulationReport s = verify_simulation(make_simulator(o, doc, kind), doc.circuit, o.tol);
  add_simulation(r, s);
  return r;
}

}  // namespace

Result run(const std::vector<std::string>& args) {
  Result res;
  std::ostringstream out;
  std::ostringstream err;
  CLI::App app{"Symmetry-twirled worlds, simulation maps, and causal-compatibility tools", "twirlkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", o.tol, "tolerance")->capture_default_str();
  app.add_option("--map", o.map, "simulation map")->check(CLI::IsMember({"dollar", "euro", "dollarC"}));
  app.add_option("--group", o.group, "symmetry preset name or a circuit file with group/reps blocks");
  app.add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"human", "machine", "both"}))
      ->capture_default_str();
  app.fallthrough();

  std::function<Report()> action;
  std::string s1;
  std::string s2;
  std::string file;
  std::string out_path;
  int dim = 2;

  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("suite", s1, "qops, symmetrize, simmaps, refframe, gpt, circuits, all")->required();
  verify->add_option("--fixture", file, "circuit file to verify under --map/--group");
  verify->callback([&] { action = [&] { return cmd_verify(s1, file, o); }; });

  auto* scenario = app.add_subcommand("scenario", "evaluate a preset circuit, optionally mapped");
  scenario->add_option("name", s1, "preset name")->required();
  scenario->callback([&] { action = [&] { return cmd_scenario(s1, o); }; });

  auto* district = app.add_subcommand("district", "districts and gap necessary conditions");
  district->add_option("target", s1, "circuit file or preset name")->required();
  district->callback([&] { action = [&] { return cmd_district(s1, o); }; });

  auto* classify = app.add_subcommand("classify", "classify a GPT symmetry");
  classify->add_option("theory", s1, "qt:<d>, cpt:<n>, pmqt:<d>, pptworld:<d>")->required();
  classify->add_option("symmetry", s2, "symmetry preset")->required();
  classify->callback([&] { action = [&] { return cmd_classify(s1, s2, o); }; });

  auto* refframe = app.add_subcommand("refframe", "shared reference frame predicates");
  refframe->add_option("rep", s1, "symmetry preset");
  refframe->add_option("state", s2, "phi+, frame, mixed, product, plusplus, noisy:<v>")->default_val("phi+");
  refframe->add_option("--file", file, "circuit file holding a bipartite state gate");
  refframe->add_option("--dim", dim, "local dimension of named states")->default_val(2)->check(CLI::Range(2, 8));
  refframe->callback([&] { action = [&] { return cmd_refframe(s1, s2, file, dim, o); }; });

  auto* simulate = app.add_subcommand("simulate", "map a circuit file and verify the image");
  simulate->add_option("file", file, "circuit file")->required();
  simulate->callback([&] { action = [&] { return cmd_simulate(file, o); }; });

  auto* exporter = app.add_subcommand("export-preset", "write a preset as a circuit file");
  exporter->add_option("name", s1, "preset name")->required();
  exporter->add_option("--out", out_path, "output path (stdout when omitted)");
  exporter->callback([&] {
    action = [&] {
      CircuitDocument doc = document_of(preset(s1));
      if (!o.group.empty()) doc.rep = preset_rep(o.group, doc.circuit.gpt_factors());
      Report r("export-preset " + s1);
      if (out_path.empty()) {
        out << to_json(doc);
        o.format = "none";
      } else {
        save_circuit_file(out_path, doc);
        r.line("wrote " + out_path);
        r.key("path", out_path);
      }
      return r;
    };
  });

  auto* list = app.add_subcommand("list", "list presets, symmetry presets, and suites");
  list->callback([&] {
    action = [&] {
      Report r("list");
      r.line("presets: " + join(preset_names()));
      r.line("symmetries: " + join(preset_rep_names()));
      std::vector<std::string> names;
      for (const auto& [n, f] : suites()) names.push_back(n);
      r.line("suites: " + join(names));
      r.key("presets", join(preset_names()));
      return r;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    res.exit_code = app.exit(e, out, err) == 0 ? kExitPass : kExitInputError;
    res.out = out.str();
    res.err = err.str();
    return res;
  }
  try {
    Report r = action();
    if (o.format != "none") out << r.render(o.format);
    res.exit_code = r.exit_code();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    res.exit_code = kExitInputError;
  } catch (const twirlkit::Error& e) {
    err << "input error: " << e.what() << "\n";
    res.exit_code = kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    res.exit_code = kExitInputError;
  }
  res.out = out.str();
  res.err = err.str();
  return res;
}

}  // namespace twirlkit::cli
