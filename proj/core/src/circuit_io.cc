#include "twirlkit/circuit_io.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace twirlkit {

namespace {

using json = nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows) * cols) {
    throw ValidationError("matrix data length does not match rows x cols");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++k) {
      const json& e = data[k];
      if (!e.is_array() || e.size() != 2) throw ValidationError("matrix entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json rep_to_json(const SymmetryRep& rep) {
  json systems = json::array();
  for (const auto& id : rep.system_ids()) {
    const SystemAction& a = rep.action(id);
    json mats = json::array();
    for (const auto& m : a.matrices) mats.push_back(matrix_to_json(m));
    json entry = {{"system", id}, {"dim", a.system.dim}, {"matrices", mats}, {"antilinear", a.antilinear}};
    if (a.conj_basis) entry["conj_basis"] = matrix_to_json(*a.conj_basis);
    systems.push_back(std::move(entry));
  }
  return systems;
}

SymmetryRep rep_from_json(const json& group, const json& reps) {
  FiniteGroup g(group.at("mult").get<std::vector<std::vector<int>>>());
  std::vector<SystemAction> actions;
  for (const auto& e : reps) {
    SystemAction a;
    a.system = {e.at("system").get<std::string>(), e.at("dim").get<int>()};
    for (const auto& m : e.at("matrices")) a.matrices.push_back(matrix_from_json(m));
    a.antilinear = e.at("antilinear").get<std::vector<bool>>();
    if (e.contains("conj_basis")) a.conj_basis = matrix_from_json(e.at("conj_basis"));
    actions.push_back(std::move(a));
  }
  return SymmetryRep(std::move(g), std::move(actions));
}

}  // namespace

std::string to_json(const CircuitDocument& doc) {
  const Circuit& c = doc.circuit;
  json j;
  j["format"] = kCircuitFormat;
  j["version"] = kCircuitFormatVersion;
  j["name"] = doc.name;
  j["description"] = doc.description;
  json systems = json::array();
  for (const auto& w : c.wires()) {
    json s = {{"id", w.id}, {"kind", wire_kind_name(w.kind)}, {"dim", w.dim}};
    if (!w.variable.empty()) s["variable"] = w.variable;
    systems.push_back(std::move(s));
  }
  j["systems"] = std::move(systems);
  if (doc.rep) {
    j["group"] = {{"mult", doc.rep->group().table()}};
    j["reps"] = rep_to_json(*doc.rep);
  }
  json gates = json::array();
  for (const auto& g : c.gates()) {
    json e = {{"id", g.id}, {"kind", gate_kind_name(g.kind)}, {"in", g.in}, {"out", g.out}};
    json ni = json::array();
    for (const auto& [i, o] : g.no_influence) ni.push_back({i, o});
    e["no_influence"] = std::move(ni);
    if (g.op) e["op"] = {{"kind", gate_kind_name(g.kind)}, {"choi", matrix_to_json(g.op->choi())}};
    gates.push_back(std::move(e));
  }
  j["gates"] = std::move(gates);
  j["open_inputs"] = c.open_inputs();
  j["open_outputs"] = c.open_outputs();
  json meta;
  meta["algebraic"] = doc.metadata.algebraic ? json(*doc.metadata.algebraic) : json(nullptr);
  meta["expected_verdict"] = doc.metadata.expected_verdict;
  meta["note"] = doc.metadata.note;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

CircuitDocument circuit_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    if (j.value("format", "") != kCircuitFormat) throw ValidationError("not a twirlkit circuit document");
    if (j.at("version").get<int>() != kCircuitFormatVersion) {
      throw ValidationError("unsupported circuit format version " + j.at("version").dump());
    }
    CircuitDocument doc;
    doc.name = j.value("name", "");
    doc.description = j.value("description", "");
    std::vector<Wire> wires;
    for (const auto& s : j.at("systems")) {
      wires.push_back(Wire{s.at("id").get<std::string>(), parse_wire_kind(s.at("kind").get<std::string>()),
                           s.at("dim").get<int>(), s.value("variable", "")});
    }
    std::map<std::string, SystemLabel> labels;
    for (const auto& w : wires) labels[w.id] = w.label();
    auto factors = [&](const std::vector<std::string>& ids) {
      Factors f;
      for (const auto& id : ids) {
        auto it = labels.find(id);
        if (it == labels.end()) throw ValidationError("gate references unknown system '" + id + "'");
        f.push_back(it->second);
      }
      return f;
    };
    std::vector<Gate> gates;
    for (const auto& e : j.at("gates")) {
      Gate g;
      g.id = e.at("id").get<std::string>();
      g.kind = parse_gate_kind(e.at("kind").get<std::string>());
      g.in = e.at("in").get<std::vector<std::string>>();
      g.out = e.at("out").get<std::vector<std::string>>();
      for (const auto& pr : e.value("no_influence", json::array())) {
        g.no_influence.insert({pr.at(0).get<std::string>(), pr.at(1).get<std::string>()});
      }
      if (e.contains("op") && !e.at("op").is_null()) {
        const json& op = e.at("op");
        if (op.contains("kind") && parse_gate_kind(op.at("kind").get<std::string>()) != g.kind) {
          throw ValidationError("gate '" + g.id + "' op kind differs from the gate kind");
        }
        g.op = Superoperator(factors(g.in), factors(g.out), matrix_from_json(op.at("choi")));
      }
      gates.push_back(std::move(g));
    }
    doc.circuit = Circuit(std::move(wires), std::move(gates));
    auto check_open = [&](const char* key, const std::vector<std::string>& actual) {
      if (j.contains(key) && j.at(key).get<std::vector<std::string>>() != actual) {
        throw ValidationError(std::string(key) + " does not match the wiring");
      }
    };
    check_open("open_inputs", doc.circuit.open_inputs());
    check_open("open_outputs", doc.circuit.open_outputs());
    if (j.contains("reps")) {
      if (!j.contains("group")) throw ValidationError("reps given without a group block");
      doc.rep = rep_from_json(j.at("group"), j.at("reps"));
    }
    if (j.contains("metadata")) {
      const json& m = j.at("metadata");
      if (m.contains("algebraic") && !m.at("algebraic").is_null()) doc.metadata.algebraic = m.at("algebraic").get<bool>();
      doc.metadata.expected_verdict = m.value("expected_verdict", "");
      doc.metadata.note = m.value("note", "");
    }
    return doc;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed circuit document: ") + e.what());
  }
}

CircuitDocument load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open circuit file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return circuit_from_json(ss.str());
}

void save_circuit_file(const std::string& path, const CircuitDocument& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write circuit file '" + path + "'");
  out << to_json(doc);
}

CircuitDocument document_of(const Preset& p) {
  CircuitDocument doc;
  doc.name = p.name;
  doc.description = p.description;
  doc.circuit = p.circuit ? *p.circuit : p.structure;
  doc.metadata = p.metadata;
  return doc;
}

}  // namespace twirlkit
