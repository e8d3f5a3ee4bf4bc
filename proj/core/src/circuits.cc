#include "twirlkit/circuits.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

namespace twirlkit {

std::string wire_kind_name(WireKind kind) {
  switch (kind) {
    case WireKind::kClassicalObserved:
      return "classical_observed";
    case WireKind::kClassicalLatent:
      return "classical_latent";
    case WireKind::kGptLatent:
      return "gpt_latent";
  }
  return "unknown";
}

WireKind parse_wire_kind(const std::string& name) {
  if (name == "classical_observed") return WireKind::kClassicalObserved;
  if (name == "classical_latent") return WireKind::kClassicalLatent;
  if (name == "gpt_latent") return WireKind::kGptLatent;
  throw ValidationError("unknown wire kind '" + name + "'");
}

std::string gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kState:
      return "state";
    case GateKind::kEffect:
      return "effect";
    case GateKind::kChannel:
      return "channel";
    case GateKind::kClassicalStochastic:
      return "classical_stochastic";
    case GateKind::kCopy:
      return "copy";
  }
  return "unknown";
}

GateKind parse_gate_kind(const std::string& name) {
  if (name == "state") return GateKind::kState;
  if (name == "effect") return GateKind::kEffect;
  if (name == "channel") return GateKind::kChannel;
  if (name == "classical_stochastic") return GateKind::kClassicalStochastic;
  if (name == "copy") return GateKind::kCopy;
  throw ValidationError("unknown gate kind '" + name + "'");
}

Circuit::Circuit(std::vector<Wire> wires, std::vector<Gate> gates)
    : wires_(std::move(wires)), gates_(std::move(gates)) {
  for (std::size_t k = 0; k < wires_.size(); ++k) {
    const Wire& w = wires_[k];
    if (w.id.empty()) throw LabelError("wire with empty id");
    if (w.dim < 1) throw ValidationError("wire '" + w.id + "' has dim < 1");
    if (!wire_index_.emplace(w.id, static_cast<int>(k)).second) throw LabelError("duplicate wire '" + w.id + "'");
  }
  producer_.assign(wires_.size(), -1);
  consumer_.assign(wires_.size(), -1);
  auto lookup = [&](const Gate& g, const std::string& w) {
    auto it = wire_index_.find(w);
    if (it == wire_index_.end()) throw LabelError("gate '" + g.id + "' uses unknown wire '" + w + "'");
    return it->second;
  };
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    const Gate& g = gates_[k];
    const int gi = static_cast<int>(k);
    if (g.id.empty()) throw LabelError("gate with empty id");
    if (!gate_index_.emplace(g.id, gi).second) throw LabelError("duplicate gate '" + g.id + "'");
    std::set<std::string> seen;
    for (const auto& w : g.in) {
      int wi = lookup(g, w);
      if (!seen.insert(w).second) throw LabelError("gate '" + g.id + "' lists wire '" + w + "' twice");
      if (consumer_[wi] >= 0) throw ValidationError("wire '" + w + "' has two consumers");
      consumer_[wi] = gi;
    }
    for (const auto& w : g.out) {
      int wi = lookup(g, w);
      if (!seen.insert(w).second) throw LabelError("gate '" + g.id + "' lists wire '" + w + "' twice");
      if (producer_[wi] >= 0) throw ValidationError("wire '" + w + "' has two producers");
      producer_[wi] = gi;
    }
    for (const auto& [i, o] : g.no_influence) {
      if (std::find(g.in.begin(), g.in.end(), i) == g.in.end() ||
          std::find(g.out.begin(), g.out.end(), o) == g.out.end()) {
        throw ValidationError("gate '" + g.id + "' declares no-influence on foreign wires " + i + " -> " + o);
      }
    }
    if (g.kind == GateKind::kCopy) {
      if (g.in.size() != 1 || g.out.empty()) throw ValidationError("copy gate '" + g.id + "' needs one input");
      const Wire& src = wire(g.in[0]);
      if (!src.classical()) throw ValidationError("copy gate '" + g.id + "' on a GPT wire");
      for (const auto& o : g.out) {
        const Wire& dst = wire(o);
        if (dst.kind != src.kind || dst.dim != src.dim || dst.var() != src.var()) {
          throw ValidationError("copy gate '" + g.id + "' output '" + o + "' differs from its input");
        }
      }
    }
    if (g.op) {
      auto check = [&](const Factors& f, const std::vector<std::string>& ids, const char* side) {
        bool ok = f.size() == ids.size();
        for (std::size_t p = 0; ok && p < f.size(); ++p) ok = f[p] == wire(ids[p]).label();
        if (!ok) {
          throw ShapeError("gate '" + g.id + "' op " + side + " factors " + describe(f) + " do not match its wires");
        }
      };
      check(g.op->in_factors(), g.in, "input");
      check(g.op->out_factors(), g.out, "output");
      for (const auto& [i, o] : g.no_influence) {
        if (!check_no_influence(g, {i}, {o})) {
          throw ValidationError("gate '" + g.id + "' op lets '" + i + "' influence '" + o + "'");
        }
      }
    }
  }
  for (std::size_t k = 0; k < wires_.size(); ++k) {
    if (producer_[k] < 0) open_inputs_.push_back(wires_[k].id);
    if (consumer_[k] < 0) open_outputs_.push_back(wires_[k].id);
  }
  // Kahn's algorithm, lowest gate index first.
  std::vector<int> pending(gates_.size(), 0);
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    for (const auto& w : gates_[k].in) pending[k] += producer_[wire_index_.at(w)] >= 0 ? 1 : 0;
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    if (pending[k] == 0) ready.push(static_cast<int>(k));
  }
  while (!ready.empty()) {
    int g = ready.top();
    ready.pop();
    topo_.push_back(g);
    for (const auto& w : gates_[g].out) {
      int c = consumer_[wire_index_.at(w)];
      if (c >= 0 && --pending[c] == 0) ready.push(c);
    }
  }
  if (topo_.size() != gates_.size()) throw ValidationError("circuit has a cycle");
}

const Wire& Circuit::wire(const std::string& id) const {
  auto it = wire_index_.find(id);
  if (it == wire_index_.end()) throw LabelError("unknown wire '" + id + "'");
  return wires_[it->second];
}

const Gate& Circuit::gate(const std::string& id) const { return gates_[gate_index(id)]; }

int Circuit::gate_index(const std::string& id) const {
  auto it = gate_index_.find(id);
  if (it == gate_index_.end()) throw LabelError("unknown gate '" + id + "'");
  return it->second;
}

int Circuit::wire_index(const std::string& id) const {
  auto it = wire_index_.find(id);
  if (it == wire_index_.end()) throw LabelError("unknown wire '" + id + "'");
  return it->second;
}

int Circuit::producer(const std::string& w) const {
  auto it = wire_index_.find(w);
  if (it == wire_index_.end()) throw LabelError("unknown wire '" + w + "'");
  return producer_[it->second];
}

int Circuit::consumer(const std::string& w) const {
  auto it = wire_index_.find(w);
  if (it == wire_index_.end()) throw LabelError("unknown wire '" + w + "'");
  return consumer_[it->second];
}

bool Circuit::evaluable_ops() const {
  return std::all_of(gates_.begin(), gates_.end(), [](const Gate& g) { return g.op.has_value(); });
}

Factors Circuit::gpt_factors() const {
  Factors f;
  for (const auto& w : wires_) {
    if (!w.classical()) f.push_back(w.label());
  }
  return f;
}

CausalStructure structure_of(const Circuit& c) {
  std::vector<Gate> gates = c.gates();
  for (auto& g : gates) g.op.reset();
  return CausalStructure(c.wires(), std::move(gates));
}

std::vector<int> decode_index(int index, const std::vector<int>& cards) {
  std::vector<int> digits(cards.size(), 0);
  for (int k = static_cast<int>(cards.size()) - 1; k >= 0; --k) {
    digits[k] = index % cards[k];
    index /= cards[k];
  }
  return digits;
}

int encode_index(const std::vector<int>& digits, const std::vector<int>& cards) {
  if (digits.size() != cards.size()) throw ShapeError("assignment length does not match");
  int index = 0;
  for (std::size_t k = 0; k < cards.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= cards[k]) throw ShapeError("assignment value out of range");
    index = index * cards[k] + digits[k];
  }
  return index;
}

double Distribution::prob(const std::vector<int>& o, const std::vector<int>& i) const {
  return table(encode_index(i, input_cards), encode_index(o, output_cards));
}

std::string Distribution::to_text() const {
  std::ostringstream os;
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
  };
  auto digits = [](const std::vector<int>& v) {
    std::string s;
    for (int d : v) s += (s.empty() ? "" : " ") + std::to_string(d);
    return s;
  };
  os << "# " << join(outputs) << " | " << join(inputs) << " | P\n";
  for (int r = 0; r < input_count(); ++r) {
    std::vector<int> iv = decode_index(r, input_cards);
    for (int c = 0; c < output_count(); ++c) {
      std::vector<int> ov = decode_index(c, output_cards);
      double p = table(r, c);
      if (std::abs(p) < 5e-13) p = 0.0;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", p);
      os << digits(ov) << " | " << digits(iv) << " | " << buf << "\n";
    }
  }
  return os.str();
}

double max_distribution_diff(const Distribution& a, const Distribution& b) {
  if (a.outputs != b.outputs || a.inputs != b.inputs || a.output_cards != b.output_cards ||
      a.input_cards != b.input_cards) {
    throw ShapeError("distributions have different layouts");
  }
  return (a.table - b.table).cwiseAbs().maxCoeff();
}

namespace {

/// Sub-block of a Choi matrix where classical factors hold fixed values on
/// both row and column indices. fixed[p] < 0 keeps factor p.
Matrix restrict_choi(const Matrix& j, const Dims& dims, const std::vector<int>& fixed) {
  const int total = product(dims);
  std::vector<int> keep;
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    bool ok = true;
    for (int p = static_cast<int>(dims.size()) - 1; p >= 0 && ok; --p) {
      int digit = rem % dims[p];
      rem /= dims[p];
      ok = fixed[p] < 0 || fixed[p] == digit;
    }
    if (ok) keep.push_back(idx);
  }
  const int n = static_cast<int>(keep.size());
  Matrix r(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) r(a, b) = j(keep[a], keep[b]);
  }
  return r;
}

struct GatePlan {
  int gate = 0;
  std::vector<int> classical_in;   // wire indices, in gate order
  std::vector<int> classical_out;  // wire indices, in gate order
  std::vector<int> out_cards;
  Factors q_in;
  Factors q_out;
  Dims dims;  // gate in ⊗ out
  std::vector<int> in_pos;   // position of factor p among in⊗out
  std::vector<int> out_pos;
};

class Evaluator {
 public:
  explicit Evaluator(const Circuit& c) : c_(c) {
    if (!c.evaluable_ops()) throw ValidationError("evaluate needs an op on every gate");
    for (const auto& id : c.open_inputs()) {
      const Wire& w = c.wire(id);
      if (!w.observed()) throw ValidationError("open input '" + id + "' is not an observed classical wire");
      dist_.inputs.push_back(w.var());
      dist_.input_cards.push_back(w.dim);
      input_wires_.push_back(c.wire_index(id));
    }
    for (const auto& id : c.open_outputs()) {
      const Wire& w = c.wire(id);
      if (!w.classical()) throw ValidationError("open GPT wire '" + id + "'");
      if (!w.observed()) continue;
      dist_.outputs.push_back(w.var());
      dist_.output_cards.push_back(w.dim);
      output_wires_.push_back(c.wire_index(id));
    }
    auto dup = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (dup(dist_.outputs) || dup(dist_.inputs)) throw ValidationError("open wires repeat a variable name");
    plan();
  }

  Distribution run() {
    int rows = 1;
    for (int card : dist_.input_cards) rows *= card;
    int cols = 1;
    for (int card : dist_.output_cards) cols *= card;
    dist_.table = RealMatrix::Zero(rows, cols);
    for (int r = 0; r < rows; ++r) {
      std::vector<int> values(c_.wires().size(), -1);
      std::vector<int> iv = decode_index(r, dist_.input_cards);
      for (std::size_t k = 0; k < iv.size(); ++k) values[input_wires_[k]] = iv[k];
      row_ = r;
      step(0, Matrix::Identity(1, 1), Factors{}, values);
    }
    return dist_;
  }

 private:
  void plan() {
    const int n = static_cast<int>(c_.gates().size());
    std::vector<bool> done(n, false);
    std::vector<bool> available(c_.wires().size(), false);
    for (const auto& id : c_.open_inputs()) available[c_.wire_index(id)] = true;
    std::vector<int> topo_pos(n);
    for (int k = 0; k < n; ++k) topo_pos[c_.topological_order()[k]] = k;
    double live = 1.0;
    for (int step = 0; step < n; ++step) {
      int best = -1;
      double best_dim = 0.0;
      for (int g = 0; g < n; ++g) {
        if (done[g]) continue;
        const Gate& gate = c_.gates()[g];
        bool ready = std::all_of(gate.in.begin(), gate.in.end(),
                                 [&](const std::string& w) { return available[c_.wire_index(w)]; });
        if (!ready) continue;
        double d = live;
        for (const auto& w : gate.in) {
          if (!c_.wire(w).classical()) d /= c_.wire(w).dim;
        }
        for (const auto& w : gate.out) {
          if (!c_.wire(w).classical()) d *= c_.wire(w).dim;
        }
        if (best < 0 || d < best_dim - 0.5 || (std::abs(d - best_dim) < 0.5 && topo_pos[g] < topo_pos[best])) {
          best = g;
          best_dim = d;
        }
      }
      done[best] = true;
      live = best_dim;
      for (const auto& w : c_.gates()[best].out) available[c_.wire_index(w)] = true;
      plans_.push_back(make_plan(best));
    }
  }

  GatePlan make_plan(int g) const {
    const Gate& gate = c_.gates()[g];
    GatePlan p;
    p.gate = g;
    for (const auto& w : gate.in) {
      const Wire& wire = c_.wire(w);
      p.dims.push_back(wire.dim);
      if (wire.classical()) {
        p.classical_in.push_back(c_.wire_index(w));
      } else {
        p.q_in.push_back(wire.label());
      }
    }
    for (const auto& w : gate.out) {
      const Wire& wire = c_.wire(w);
      p.dims.push_back(wire.dim);
      if (wire.classical()) {
        p.classical_out.push_back(c_.wire_index(w));
        p.out_cards.push_back(wire.dim);
      } else {
        p.q_out.push_back(wire.label());
      }
    }
    return p;
  }

  const Superoperator& restricted(const GatePlan& p, const std::vector<int>& x, const std::vector<int>& y) {
    std::vector<int> key = x;
    key.insert(key.end(), y.begin(), y.end());
    auto& cache = cache_[p.gate];
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Gate& gate = c_.gates()[p.gate];
    std::vector<int> fixed;
    std::size_t cx = 0;
    std::size_t cy = 0;
    for (const auto& w : gate.in) fixed.push_back(c_.wire(w).classical() ? x[cx++] : -1);
    for (const auto& w : gate.out) fixed.push_back(c_.wire(w).classical() ? y[cy++] : -1);
    Matrix j = restrict_choi(gate.op->choi(), p.dims, fixed);
    return cache.emplace(key, Superoperator(p.q_in, p.q_out, std::move(j))).first->second;
  }

  void step(std::size_t k, const Matrix& state, const Factors& factors, std::vector<int>& values) {
    if (k == plans_.size()) {
      std::vector<int> ov;
      for (int w : output_wires_) ov.push_back(values[w]);
      dist_.table(row_, encode_index(ov, dist_.output_cards)) += state.trace().real();
      return;
    }
    const GatePlan& p = plans_[k];
    std::vector<int> x;
    for (int w : p.classical_in) x.push_back(values[w]);
    int outcomes = 1;
    for (int card : p.out_cards) outcomes *= card;
    for (int yi = 0; yi < outcomes; ++yi) {
      std::vector<int> y = decode_index(yi, p.out_cards);
      const Superoperator& s = restricted(p, x, y);
      if (s.choi().cwiseAbs().maxCoeff() == 0.0) continue;
      Factors next_factors;
      Matrix next = apply_partial(s, state, factors, &next_factors);
      if (std::abs(next.trace().real()) < 1e-15 && next.cwiseAbs().maxCoeff() < 1e-15) continue;
      check_dim_cap(static_cast<std::size_t>(next.rows()), "evaluate live state");
      for (std::size_t m = 0; m < y.size(); ++m) values[p.classical_out[m]] = y[m];
      step(k + 1, next, next_factors, values);
    }
    for (int w : p.classical_out) values[w] = -1;
  }

  const Circuit& c_;
  Distribution dist_;
  std::vector<int> input_wires_;
  std::vector<int> output_wires_;
  std::vector<GatePlan> plans_;
  std::map<int, std::map<std::vector<int>, Superoperator>> cache_;
  int row_ = 0;
};

}  // namespace

Distribution evaluate(const Circuit& c) { return Evaluator(c).run(); }

std::set<WirePair> influence_closure(const CausalStructure& cs) {
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& g : cs.gates()) {
    for (const auto& i : g.in) {
      for (const auto& o : g.out) {
        if (!g.no_influence.count({i, o})) next[i].push_back(o);
      }
    }
  }
  std::set<WirePair> rel;
  for (const auto& w : cs.wires()) {
    std::set<std::string> seen;
    std::vector<std::string> stack = {w.id};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      for (const auto& n : next[cur]) {
        if (seen.insert(n).second) stack.push_back(n);
      }
    }
    for (const auto& s : seen) {
      if (s != w.id) rel.insert({w.id, s});
    }
  }
  return rel;
}

bool check_no_influence(const Gate& g, const std::set<std::string>& i, const std::set<std::string>& o, double tol) {
  if (!g.op) throw ValidationError("gate '" + g.id + "' has no op to test");
  const Superoperator& s = *g.op;
  for (const auto& w : i) {
    if (index_of(s.in_factors(), w) < 0) throw LabelError("'" + w + "' is not an input of gate '" + g.id + "'");
  }
  for (const auto& w : o) {
    if (index_of(s.out_factors(), w) < 0) throw LabelError("'" + w + "' is not an output of gate '" + g.id + "'");
  }
  if (i.empty() || o.empty()) return true;
  Dims dims = s.in_dims();
  Dims out_dims = s.out_dims();
  dims.insert(dims.end(), out_dims.begin(), out_dims.end());
  const int nin = static_cast<int>(s.in_factors().size());
  std::vector<bool> keep(dims.size(), true);
  for (std::size_t p = 0; p < s.out_factors().size(); ++p) keep[nin + p] = o.count(s.out_factors()[p].id) > 0;
  Matrix jm = partial_trace(s.choi(), dims, keep);
  Dims reduced;
  std::vector<int> perm;
  for (int p = 0; p < nin; ++p) {
    if (i.count(s.in_factors()[p].id)) perm.push_back(p);
  }
  const int ni = static_cast<int>(perm.size());
  for (int p = 0; p < nin; ++p) {
    if (!i.count(s.in_factors()[p].id)) perm.push_back(p);
  }
  for (std::size_t p = 0; p < dims.size(); ++p) {
    if (keep[p]) reduced.push_back(dims[p]);
  }
  for (int p = nin; p < static_cast<int>(reduced.size()); ++p) perm.push_back(p);
  Matrix jp = permute_factors(jm, reduced, perm);
  Dims pd;
  for (int p : perm) pd.push_back(reduced[p]);
  int di = 1;
  std::vector<bool> keep_rest(pd.size(), true);
  for (int p = 0; p < ni; ++p) {
    di *= pd[p];
    keep_rest[p] = false;
  }
  Matrix rest = partial_trace(jp, pd, keep_rest);
  Matrix expected = kron(Matrix::Identity(di, di), rest) / static_cast<double>(di);
  return max_abs_diff(jp, expected) <= tol;
}

Circuit map_circuit(const Simulator& sim, const Circuit& c) {
  std::vector<Wire> wires;
  for (const auto& w : c.wires()) {
    if (!w.classical() && sim.needs_frame(w.label())) {
      ReferenceFrame rf = sim.frame_for(w.label());
      if (c.has_wire(rf.system.id)) throw LabelError("RF label '" + rf.system.id + "' collides with a wire");
      wires.push_back(Wire{rf.system.id, WireKind::kGptLatent, rf.system.dim, ""});
    }
    wires.push_back(w);
  }
  auto frame_of = [&](const std::string& id) -> std::vector<std::string> {
    const Wire& w = c.wire(id);
    if (!w.classical() && sim.needs_frame(w.label())) return {sim.rf_label(id), id};
    return {id};
  };
  std::vector<Gate> gates;
  for (const auto& g : c.gates()) {
    if (!g.op) throw ValidationError("map_circuit needs an op on gate '" + g.id + "'");
    Gate m;
    m.id = g.id;
    m.kind = g.kind;
    m.op = sim.map(*g.op);
    for (const auto& f : m.op->in_factors()) m.in.push_back(f.id);
    for (const auto& f : m.op->out_factors()) m.out.push_back(f.id);
    for (const auto& [i, o] : g.no_influence) {
      for (const auto& a : frame_of(i)) {
        for (const auto& b : frame_of(o)) m.no_influence.insert({a, b});
      }
    }
    gates.push_back(std::move(m));
  }
  return Circuit(std::move(wires), std::move(gates));
}

Superoperator classical_stochastic(const Factors& in, const Factors& out, const RealMatrix& p) {
  const int din = total_dim(in);
  const int dout = total_dim(out);
  if (p.rows() != dout || p.cols() != din) throw ShapeError("stochastic matrix must be out x in");
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (int x = 0; x < din; ++x) {
    for (int y = 0; y < dout; ++y) j(x * dout + y, x * dout + y) = p(y, x);
  }
  return Superoperator(in, out, std::move(j));
}

Superoperator classical_copy(const SystemLabel& in, const Factors& out) {
  const int dout = total_dim(out);
  RealMatrix p = RealMatrix::Zero(dout, in.dim);
  for (int x = 0; x < in.dim; ++x) {
    std::vector<int> digits(out.size(), x);
    for (const auto& f : out) {
      if (f.dim != in.dim) throw ShapeError("copy outputs must match the input cardinality");
    }
    p(encode_index(digits, dims_of(out)), x) = 1.0;
  }
  return classical_stochastic({in}, out, p);
}

Superoperator classical_source(const SystemLabel& out, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != out.dim) throw ShapeError("source distribution has the wrong length");
  RealMatrix m(out.dim, 1);
  for (int k = 0; k < out.dim; ++k) m(k, 0) = p[k];
  return classical_stochastic({}, {out}, m);
}

Superoperator classically_controlled(const SystemLabel& control, const std::vector<Superoperator>& branches) {
  if (static_cast<int>(branches.size()) != control.dim) throw ShapeError("need one branch per control value");
  const Factors& bin = branches.front().in_factors();
  const Factors& bout = branches.front().out_factors();
  const int block = branches.front().in_dim() * branches.front().out_dim();
  Matrix j = Matrix::Zero(control.dim * block, control.dim * block);
  for (int x = 0; x < control.dim; ++x) {
    const Superoperator& b = branches[x];
    if (b.in_factors() != bin || b.out_factors() != bout) throw ShapeError("branches must share their factors");
    j.block(x * block, x * block, block, block) = b.choi();
  }
  Factors in = concat({control}, bin);
  return Superoperator(std::move(in), bout, std::move(j));
}

Superoperator qc_measurement(const Factors& systems, const SystemLabel& outcome, const std::vector<Matrix>& effects) {
  if (static_cast<int>(effects.size()) != outcome.dim) throw ShapeError("need one effect per outcome");
  const int d = total_dim(systems);
  const int k = outcome.dim;
  Matrix j = Matrix::Zero(d * k, d * k);
  for (int a = 0; a < k; ++a) {
    if (effects[a].rows() != d || effects[a].cols() != d) throw ShapeError("effect has the wrong size");
    for (int r = 0; r < d; ++r) {
      for (int s = 0; s < d; ++s) j(r * k + a, s * k + a) = effects[a](s, r);
    }
  }
  return Superoperator(systems, {outcome}, std::move(j));
}

Superoperator measurement_with_setting(const SystemLabel& setting, const Factors& systems, const SystemLabel& outcome,
                                       const std::vector<std::vector<Matrix>>& povms) {
  std::vector<Superoperator> branches;
  for (const auto& povm : povms) branches.push_back(qc_measurement(systems, outcome, povm));
  return classically_controlled(setting, branches);
}

Superoperator preparation_with_setting(const SystemLabel& setting, const Factors& systems,
                                       const std::vector<Matrix>& states) {
  std::vector<Superoperator> branches;
  for (const auto& rho : states) branches.emplace_back(Factors{}, systems, rho);
  return classically_controlled(setting, branches);
}

std::vector<Matrix> xz_projectors(double theta) {
  Vector v(2);
  v << std::cos(theta / 2), std::sin(theta / 2);
  Matrix p0 = v * v.adjoint();
  return {p0, Matrix::Identity(2, 2) - p0};
}

namespace {

std::vector<Matrix> random_povm(int d, int k, Rng& rng) {
  std::vector<Matrix> parts;
  Matrix total = Matrix::Zero(d, d);
  for (int a = 0; a < k; ++a) {
    Matrix g = random_ginibre(d, d, rng);
    parts.push_back(g * g.adjoint());
    total += parts.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  Matrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    es.eigenvectors().adjoint();
  for (auto& p : parts) p = inv_sqrt * p * inv_sqrt;
  return parts;
}

Wire gpt(const std::string& id, int dim) { return Wire{id, WireKind::kGptLatent, dim, ""}; }
Wire observed(const std::string& id, int card) { return Wire{id, WireKind::kClassicalObserved, card, ""}; }

}  // namespace

Circuit random_small_circuit(Rng& rng, int dim) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<int> outcomes(2, 3);
  const int tmpl = pick(rng);
  const int k = outcomes(rng);
  Wire x = observed("x", 2);
  Wire y = observed("y", 2);
  Wire a = observed("a", k);
  Wire b = observed("b", 2);
  std::vector<Wire> wires;
  std::vector<Gate> gates;
  auto add = [&](const std::string& id, std::vector<std::string> in, std::vector<std::string> out, Superoperator op,
                 GateKind kind) { gates.push_back(Gate{id, std::move(in), std::move(out), std::move(op), {}, kind}); };
  auto povms = [&](int card) {
    return std::vector<std::vector<Matrix>>{random_povm(dim, card, rng), random_povm(dim, card, rng)};
  };
  if (tmpl == 0) {
    Wire q = gpt("q", dim);
    wires = {q, x, a};
    add("prep", {}, {"q"}, Superoperator({}, {q.label()}, random_density(dim, rng)), GateKind::kState);
    add("meas", {"x", "q"}, {"a"}, measurement_with_setting(x.label(), {q.label()}, a.label(), povms(k)),
        GateKind::kEffect);
  } else if (tmpl == 1) {
    Wire qa = gpt("qa", dim);
    Wire qb = gpt("qb", dim);
    wires = {qa, qb, x, y, a, b};
    add("source", {}, {"qa", "qb"}, Superoperator({}, {qa.label(), qb.label()}, random_density(dim * dim, rng)),
        GateKind::kState);
    add("alice", {"x", "qa"}, {"a"}, measurement_with_setting(x.label(), {qa.label()}, a.label(), povms(k)),
        GateKind::kEffect);
    add("bob", {"y", "qb"}, {"b"}, measurement_with_setting(y.label(), {qb.label()}, b.label(), povms(2)),
        GateKind::kEffect);
  } else if (tmpl == 2) {
    Wire q = gpt("q", dim);
    Wire q2 = gpt("q2", dim);
    wires = {q, q2, x, a};
    add("prep", {}, {"q"}, Superoperator({}, {q.label()}, random_density(dim, rng)), GateKind::kState);
    add("ctrl", {"x", "q"}, {"q2"},
        classically_controlled(x.label(), {random_channel({q.label()}, {q2.label()}, rng),
                                           random_channel({q.label()}, {q2.label()}, rng)}),
        GateKind::kChannel);
    add("meas", {"q2"}, {"a"}, qc_measurement({q2.label()}, a.label(), random_povm(dim, k, rng)), GateKind::kEffect);
  } else {
    Wire q = gpt("q", dim);
    Wire q2 = gpt("q2", dim);
    wires = {q, q2, x, y, a};
    add("prep", {"x"}, {"q"},
        preparation_with_setting(x.label(), {q.label()}, {random_density(dim, rng), random_density(dim, rng)}),
        GateKind::kState);
    add("chan", {"q"}, {"q2"}, random_channel({q.label()}, {q2.label()}, rng), GateKind::kChannel);
    add("meas", {"y", "q2"}, {"a"}, measurement_with_setting(y.label(), {q2.label()}, a.label(), povms(k)),
        GateKind::kEffect);
  }
  return Circuit(std::move(wires), std::move(gates));
}

double chsh_value(const Distribution& p) {
  if (p.output_cards != std::vector<int>{2, 2} || p.input_cards != std::vector<int>{2, 2}) {
    throw ShapeError("CHSH needs two binary outputs and two binary settings");
  }
  double s = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      double e = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) e += ((a + b) % 2 == 0 ? 1.0 : -1.0) * p.prob({a, b}, {x, y});
      }
      s += (x == 1 && y == 1) ? -e : e;
    }
  }
  return s;
}

}  // namespace twirlkit
