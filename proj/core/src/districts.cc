#include "twirlkit/districts.h"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace twirlkit {

namespace {

/// A copy gate on observed wires is a junction, not a box.
bool absorbed(const CausalStructure& cs, int g) {
  const Gate& gate = cs.gates()[g];
  return gate.kind == GateKind::kCopy && cs.wire(gate.in[0]).observed();
}

/// Wire produced by a non-absorbed gate (or open) that feeds `wire` through copies.
std::string root_wire(const CausalStructure& cs, std::string wire) {
  for (;;) {
    int p = cs.producer(wire);
    if (p < 0 || !absorbed(cs, p)) return wire;
    wire = cs.gates()[p].in[0];
  }
}

int find(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

std::string root_variable(const CausalStructure& cs, const std::string& wire) {
  return cs.wire(root_wire(cs, wire)).var();
}

std::vector<District> districts(const CausalStructure& cs) {
  const int n = static_cast<int>(cs.gates().size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& w : cs.wires()) {
    if (w.observed()) continue;
    int p = cs.producer(w.id);
    int c = cs.consumer(w.id);
    if (p >= 0 && c >= 0) parent[find(parent, p)] = find(parent, c);
  }
  std::map<int, int> slot;
  std::vector<std::vector<int>> members;
  for (int g = 0; g < n; ++g) {
    if (absorbed(cs, g)) continue;
    int r = find(parent, g);
    if (!slot.count(r)) {
      slot[r] = static_cast<int>(members.size());
      members.emplace_back();
    }
    members[slot[r]].push_back(g);
  }

  std::vector<District> out;
  for (const auto& gs : members) {
    std::set<int> in_k(gs.begin(), gs.end());
    District d;
    std::set<std::string> keep_wires;
    std::vector<Gate> frag_gates;
    for (int g : gs) {
      const Gate& gate = cs.gates()[g];
      d.gates.push_back(gate.id);
      Gate copy = gate;
      copy.op.reset();
      frag_gates.push_back(copy);
      for (const auto& w : gate.in) keep_wires.insert(w);
      for (const auto& w : gate.out) keep_wires.insert(w);
      for (const auto& w : gate.out) {
        const Wire& wire = cs.wire(w);
        if (wire.observed()) {
          d.outputs.insert(wire.var());
        } else if (cs.consumer(w) >= 0) {
          d.latent_wires.push_back(w);
        }
      }
      for (const auto& w : gate.in) {
        if (!cs.wire(w).observed()) continue;
        std::string root = root_wire(cs, w);
        int p = cs.producer(root);
        if (p >= 0 && in_k.count(p)) {
          d.reconnected.insert(cs.wire(root).var());
        } else {
          d.inputs.insert(cs.wire(root).var());
        }
      }
    }
    // Copy trees hanging off district outputs keep only the branches that end
    // inside the district or at an open output.
    std::function<bool(const std::string&)> keep_branch = [&](const std::string& w) -> bool {
      int c = cs.consumer(w);
      if (c < 0) return true;
      if (in_k.count(c)) return true;
      if (!absorbed(cs, c)) return false;
      Gate copy = cs.gates()[c];
      copy.op.reset();
      std::vector<std::string> outs;
      for (const auto& o : copy.out) {
        if (keep_branch(o)) outs.push_back(o);
      }
      if (outs.empty()) return false;
      copy.out = outs;
      copy.no_influence.clear();
      keep_wires.insert(w);
      for (const auto& o : outs) keep_wires.insert(o);
      frag_gates.push_back(copy);
      return true;
    };
    for (int g : gs) {
      for (const auto& w : cs.gates()[g].out) {
        if (cs.wire(w).observed()) keep_branch(w);
      }
    }
    std::vector<Wire> frag_wires;
    for (const auto& w : cs.wires()) {
      if (keep_wires.count(w.id)) frag_wires.push_back(w);
    }
    // Keep the fragment's gates in the original circuit order.
    std::sort(frag_gates.begin(), frag_gates.end(),
              [&](const Gate& a, const Gate& b) { return cs.gate_index(a.id) < cs.gate_index(b.id); });
    d.fragment = CausalStructure(std::move(frag_wires), std::move(frag_gates));
    out.push_back(std::move(d));
  }
  return out;
}

DistrictFactorization district_factorization_check(const CausalStructure& cs, const Distribution& p, double tol) {
  std::vector<District> ds = districts(cs);
  // Observed variables produced by gates, ordered by the producers' topological position.
  std::vector<int> topo_pos(cs.gates().size());
  for (std::size_t k = 0; k < cs.topological_order().size(); ++k) topo_pos[cs.topological_order()[k]] = static_cast<int>(k);
  std::map<std::string, int> var_rank;
  for (const auto& w : cs.wires()) {
    if (!w.observed()) continue;
    int prod = cs.producer(w.id);
    if (prod < 0 || absorbed(cs, prod)) continue;
    var_rank[w.var()] = topo_pos[prod];
  }
  std::map<std::string, int> out_col;
  for (std::size_t k = 0; k < p.outputs.size(); ++k) out_col[p.outputs[k]] = static_cast<int>(k);
  std::map<std::string, int> in_col;
  for (std::size_t k = 0; k < p.inputs.size(); ++k) in_col[p.inputs[k]] = static_cast<int>(k);
  for (const auto& [v, rank] : var_rank) {
    if (!out_col.count(v)) throw ValidationError("observed variable '" + v + "' is not an output of the distribution");
  }
  for (const auto& v : p.outputs) {
    if (!var_rank.count(v)) throw ValidationError("output '" + v + "' is not produced by a gate of the structure");
  }
  std::vector<std::string> order = p.outputs;
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) { return var_rank[a] < var_rank[b]; });
  const int nv = static_cast<int>(order.size());
  std::vector<int> topo_cards(nv);
  std::vector<int> perm(nv);  // position in order -> column digit index
  for (int k = 0; k < nv; ++k) {
    perm[k] = out_col[order[k]];
    topo_cards[k] = p.output_cards[perm[k]];
  }
  const int rows = p.input_count();
  const int cols = p.output_count();
  // marg[l][r][prefix] = P(first l variables of `order` = prefix | input r).
  std::vector<std::vector<std::vector<double>>> marg(nv + 1);
  std::vector<int> prefix_size(nv + 1, 1);
  for (int l = 1; l <= nv; ++l) prefix_size[l] = prefix_size[l - 1] * topo_cards[l - 1];
  for (int l = 0; l <= nv; ++l) marg[l].assign(rows, std::vector<double>(prefix_size[l], 0.0));
  std::vector<std::vector<int>> tdigits(cols);
  for (int c = 0; c < cols; ++c) {
    std::vector<int> dig = decode_index(c, p.output_cards);
    for (int k = 0; k < nv; ++k) tdigits[c].push_back(dig[perm[k]]);
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int key = 0;
      marg[0][r][0] += p.table(r, c);
      for (int l = 1; l <= nv; ++l) {
        key = key * topo_cards[l - 1] + tdigits[c][l - 1];
        marg[l][r][key] += p.table(r, c);
      }
    }
  }
  auto prefix_key = [&](int c, int l) {
    int key = 0;
    for (int k = 0; k < l; ++k) key = key * topo_cards[k] + tdigits[c][k];
    return key;
  };
  std::map<std::string, int> pos_in_order;
  for (int k = 0; k < nv; ++k) pos_in_order[order[k]] = k;

  DistrictFactorization result;
  RealMatrix rebuilt = RealMatrix::Ones(rows, cols);
  for (const auto& d : ds) {
    Distribution f;
    std::vector<int> o_pos;
    for (const auto& v : order) {
      if (d.outputs.count(v)) {
        f.outputs.push_back(v);
        o_pos.push_back(pos_in_order[v]);
        f.output_cards.push_back(topo_cards[pos_in_order[v]]);
      }
    }
    // I_k values come from the inputs of P or from other districts' outputs.
    std::vector<std::pair<bool, int>> i_src;
    for (const auto& v : p.inputs) {
      if (d.inputs.count(v)) {
        f.inputs.push_back(v);
        f.input_cards.push_back(p.input_cards[in_col[v]]);
        i_src.push_back({true, in_col[v]});
      }
    }
    for (const auto& v : order) {
      if (d.inputs.count(v)) {
        f.inputs.push_back(v);
        f.input_cards.push_back(topo_cards[pos_in_order[v]]);
        i_src.push_back({false, pos_in_order[v]});
      }
    }
    for (const auto& v : d.inputs) {
      if (!in_col.count(v) && !pos_in_order.count(v)) {
        throw ValidationError("district input '" + v + "' is not part of the distribution");
      }
    }
    int frows = 1;
    for (int card : f.input_cards) frows *= card;
    int fcols = 1;
    for (int card : f.output_cards) fcols *= card;
    f.table = RealMatrix::Zero(frows, fcols);
    RealMatrix best_mass = RealMatrix::Constant(frows, fcols, -1.0);
    std::vector<std::vector<std::pair<int, int>>> key_of(rows, std::vector<std::pair<int, int>>(cols));
    for (int r = 0; r < rows; ++r) {
      std::vector<int> idig = decode_index(r, p.input_cards);
      for (int c = 0; c < cols; ++c) {
        std::vector<int> od;
        for (int k : o_pos) od.push_back(tdigits[c][k]);
        std::vector<int> id;
        for (const auto& [from_input, k] : i_src) id.push_back(from_input ? idig[k] : tdigits[c][k]);
        const int fr = encode_index(id, f.input_cards);
        const int fc = encode_index(od, f.output_cards);
        key_of[r][c] = {fr, fc};
        double value = 1.0;
        double mass = 1.0;
        for (int k : o_pos) {
          double den = marg[k][r][prefix_key(c, k)];
          double num = marg[k + 1][r][prefix_key(c, k + 1)];
          mass = std::min(mass, den);
          value = den > 0.0 ? value * num / den : 0.0;
        }
        if (mass > 0.0 && mass > best_mass(fr, fc)) {
          best_mass(fr, fc) = mass;
          f.table(fr, fc) = value;
        }
      }
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) rebuilt(r, c) *= f.table(key_of[r][c].first, key_of[r][c].second);
    }
    result.factors.push_back(std::move(f));
  }
  result.max_error = rows * cols == 0 ? 0.0 : (rebuilt - p.table).cwiseAbs().maxCoeff();
  result.factorizes = result.max_error <= tol;
  return result;
}

GapReport gap_necessary_conditions(const CausalStructure& cs, const StructureMetadata& meta) {
  GapReport report;
  report.algebraic = meta.algebraic;
  bool all_unrestricted = true;
  bool all_excluded = true;
  for (const auto& d : districts(cs)) {
    DistrictReport dr;
    dr.gates = d.gates;
    std::vector<std::string> gpt_wires;
    for (const auto& g : d.gates) {
      const Gate& gate = cs.gate(g);
      if (!gate.no_influence.empty()) dr.unrestricted = false;
      for (const auto& w : gate.out) {
        if (!cs.wire(w).classical()) gpt_wires.push_back(w);
      }
    }
    all_unrestricted = all_unrestricted && dr.unrestricted;
    dr.has_latent_gpt = !gpt_wires.empty();
    if (!dr.has_latent_gpt) {
      dr.excluded = true;
      dr.reason = "no latent GPT system";
    } else if (dr.unrestricted) {
      // Ancestors of a GPT wire through GPT wires only; shared classical
      // randomness cannot prepare a shared reference frame.
      auto ancestors = [&](const std::string& w) {
        std::set<int> seen;
        std::vector<int> stack = {cs.producer(w)};
        while (!stack.empty()) {
          int g = stack.back();
          stack.pop_back();
          if (g < 0 || !seen.insert(g).second) continue;
          for (const auto& in : cs.gates()[g].in) {
            if (!cs.wire(in).classical()) stack.push_back(cs.producer(in));
          }
        }
        return seen;
      };
      std::set<int> common = ancestors(gpt_wires.front());
      for (const auto& w : gpt_wires) {
        std::set<int> a = ancestors(w);
        std::set<int> both;
        std::set_intersection(common.begin(), common.end(), a.begin(), a.end(), std::inserter(both, both.begin()));
        common = std::move(both);
      }
      dr.shared_rf_possible = !common.empty();
      if (!common.empty()) {
        dr.shared_rf_ancestor = cs.gates()[*common.begin()].id;
        dr.excluded = true;
        dr.reason = "shared reference frame preparable from gate " + dr.shared_rf_ancestor;
      } else {
        dr.reason = "GPT systems have no common ancestor";
      }
    } else {
      dr.reason = "gate-internal no-influence relations; shared-RF condition not applicable";
    }
    all_excluded = all_excluded && dr.excluded;
    report.districts.push_back(std::move(dr));
  }
  if (meta.algebraic.value_or(false)) {
    if (all_unrestricted) {
      report.excluded = true;
      report.reasons.push_back("algebraic causal structure");
    } else {
      report.reasons.push_back("algebraic flag ignored: gates carry internal no-influence relations");
    }
  }
  if (all_excluded) {
    report.excluded = true;
    report.reasons.push_back(report.districts.size() > 1 ? "every district excludes a gap"
                                                         : "the single district excludes a gap");
  }
  if (!report.excluded) report.reasons.push_back("no necessary condition fails");
  return report;
}

}  // namespace twirlkit
