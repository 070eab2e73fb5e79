#include "netctrl/sysmodel.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "netctrl/numkernel.hpp"

namespace netctrl {

using nlohmann::json;

namespace {

constexpr double kRealTolerance = 1e-14;

void require_real(const CMatrix& m, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j).imag()) > kRealTolerance)
        throw ValidationError(what + " must be real valued");
}

}  // namespace

void NodeDynamics::validate() const {
  if (A.rows() != A.cols()) throw ValidationError("A must be square");
  if (A.rows() == 0) throw ValidationError("A must be nonempty");
  if (B.rows() != A.rows()) throw ValidationError("B must have n rows");
  if (B.cols() == 0) throw ValidationError("B must have at least one column");
  if (C.cols() != A.rows()) throw ValidationError("C must have n columns");
  if (C.rows() == 0) throw ValidationError("C must have at least one row");
  if (H.rows() != A.rows() || H.cols() != C.rows())
    throw ValidationError("H must be n x m to route the output back into the state");
  for (const auto* m : {&A, &B, &C, &H}) require_finite(*m, "node matrix");
  require_real(A, "A");
  require_real(B, "B");
  require_real(C, "C");
  require_real(H, "H");
}

CMatrix NetworkTopology::delta_matrix() const {
  CMatrix d = CMatrix::Zero(N(), N());
  for (int i = 0; i < N(); ++i) d(i, i) = Complex(delta[static_cast<size_t>(i)], 0);
  return d;
}

void NetworkTopology::validate() const {
  if (W.rows() != W.cols()) throw ValidationError("W must be square");
  if (W.rows() == 0) throw ValidationError("W must be nonempty");
  require_finite(W, "W");
  require_real(W, "W");
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    if (W(i, i) != Complex(0, 0))
      throw ValidationError("W[" + std::to_string(i) + "][" + std::to_string(i) +
                            "]: w_ii must be 0");
  if (static_cast<int>(delta.size()) != N())
    throw ValidationError("delta must have one entry per node");
  for (size_t i = 0; i < delta.size(); ++i)
    if (delta[i] != 0 && delta[i] != 1)
      throw ValidationError("delta[" + std::to_string(i) + "] must be 0 or 1");
}

void NetworkedSystem::validate() const {
  node.validate();
  topo.validate();
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("h must be a positive real number");
}

std::pair<CMatrix, CMatrix> assemble_continuous(const NetworkedSystem& sys) {
  sys.validate();
  const int N = sys.topo.N();
  const CMatrix identity = CMatrix::Identity(N, N);
  const CMatrix phi = kron(identity, sys.node.A) + kron(sys.topo.W, sys.node.H * sys.node.C);
  const CMatrix psi = kron(sys.topo.delta_matrix(), sys.node.B);
  return {phi, psi};
}

SampledSystem discretize(const NetworkedSystem& sys) {
  sys.validate();
  const int N = sys.topo.N();
  SampledSystem out;
  out.h = sys.h;
  auto [exp_ah, hold] = expm_with_integral(sys.node.A, sys.h);
  out.node_transition = exp_ah;
  out.coupling_hold = hold * (sys.node.H * sys.node.C);
  out.input_hold = hold * sys.node.B;
  out.state_transition =
      kron(CMatrix::Identity(N, N), out.node_transition) + kron(sys.topo.W, out.coupling_hold);
  out.input_map = kron(sys.topo.delta_matrix(), out.input_hold);
  return out;
}

const char* multirate_kind_name(MultiRateKind kind) {
  return kind == MultiRateKind::TMS ? "TMS" : "CMS";
}

namespace {

CMatrix matrix_from_json(const json& value, const std::string& key) {
  if (!value.is_array() || value.empty())
    throw ValidationError(key + ": expected a nonempty nested array of numbers");
  const size_t cols = value.front().is_array() ? value.front().size() : 0;
  if (cols == 0) throw ValidationError(key + ": rows must be nonempty arrays");
  CMatrix m(static_cast<Eigen::Index>(value.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < value.size(); ++i) {
    const json& row = value[i];
    if (!row.is_array() || row.size() != cols)
      throw ValidationError(key + "[" + std::to_string(i) + "]: ragged or non-array row");
    for (size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number())
        throw ValidationError(key + "[" + std::to_string(i) + "][" + std::to_string(j) +
                              "]: entries must be finite numbers");
      const double x = row[j].get<double>();
      if (!std::isfinite(x))
        throw ValidationError(key + "[" + std::to_string(i) + "][" + std::to_string(j) +
                              "]: entries must be finite numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(x, 0);
    }
  }
  return m;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::set<std::string> kKnownKeys = {"A", "B", "C", "H", "W", "delta", "h", "multirate",
                                          "tolerance"};

}  // namespace

ParsedInput parse_system(std::string_view text, bool lenient) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("top-level document must be a JSON object");

  ParsedInput out;
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!kKnownKeys.count(key)) {
      if (lenient)
        out.warnings.push_back("ignoring unknown key \"" + key + "\"");
      else
        throw ValidationError("unknown key \"" + key + "\" (use --lenient to ignore)");
    }
  }

  for (const char* required : {"A", "B", "W", "h"})
    if (!doc.contains(required)) throw ValidationError(std::string(required) + ": missing");

  NodeDynamics node;
  node.A = matrix_from_json(doc["A"], "A");
  node.B = matrix_from_json(doc["B"], "B");
  const Eigen::Index n = node.A.rows();
  node.C = doc.contains("C") ? matrix_from_json(doc["C"], "C") : CMatrix::Identity(n, n);
  node.H = doc.contains("H") ? matrix_from_json(doc["H"], "H")
                             : CMatrix::Identity(n, node.C.rows());

  NetworkTopology topo;
  topo.W = matrix_from_json(doc["W"], "W");
  const int N = static_cast<int>(topo.W.rows());
  if (doc.contains("delta")) {
    const json& d = doc["delta"];
    if (!d.is_array()) throw ValidationError("delta: expected an array of 0/1 flags");
    for (size_t i = 0; i < d.size(); ++i) {
      if (!d[i].is_number_integer())
        throw ValidationError("delta[" + std::to_string(i) + "] must be the integer 0 or 1");
      topo.delta.push_back(d[i].get<int>());
    }
  } else {
    topo.delta.assign(static_cast<size_t>(N), 1);
  }

  if (!doc["h"].is_number()) throw ValidationError("h must be a positive real number");
  out.sys = NetworkedSystem{std::move(node), std::move(topo), doc["h"].get<double>()};
  out.sys.validate();

  if (doc.contains("multirate")) {
    const json& mr = doc["multirate"];
    if (!mr.is_object()) throw ValidationError("multirate: expected an object");
    for (const auto& [key, value] : mr.items()) {
      (void)value;
      if (key != "kind" && key != "l") {
        if (lenient)
          out.warnings.push_back("ignoring unknown key \"multirate." + key + "\"");
        else
          throw ValidationError("unknown key \"multirate." + key + "\"");
      }
    }
    MultiRatePattern pattern;
    if (!mr.contains("kind") || !mr["kind"].is_string())
      throw ValidationError("multirate.kind must be \"TMS\" or \"CMS\"");
    const std::string kind = mr["kind"].get<std::string>();
    if (kind == "TMS")
      pattern.kind = MultiRateKind::TMS;
    else if (kind == "CMS")
      pattern.kind = MultiRateKind::CMS;
    else
      throw ValidationError("multirate.kind must be \"TMS\" or \"CMS\"");
    if (!mr.contains("l") || !mr["l"].is_number_integer() || mr["l"].get<int>() < 1)
      throw ValidationError("multirate.l must be an integer >= 1");
    pattern.l = mr["l"].get<int>();
    out.multirate = pattern;
  }

  if (doc.contains("tolerance")) {
    const json& t = doc["tolerance"];
    if (!t.is_object()) throw ValidationError("tolerance: expected an object");
    for (const auto& [key, value] : t.items()) {
      if (key == "rank_rel")
        out.tol.rank_rel = value.get<double>();
      else if (key == "eig_cluster")
        out.tol.eig_cluster = value.get<double>();
      else if (key == "chain_residual")
        out.tol.chain_residual = value.get<double>();
      else if (lenient)
        out.warnings.push_back("ignoring unknown key \"tolerance." + key + "\"");
      else
        throw ValidationError("unknown key \"tolerance." + key + "\"");
    }
    try {
      out.tol.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("tolerance: ") + e.what());
    }
  }
  return out;
}

std::string serialize_system(const ParsedInput& input) {
  json doc;
  doc["A"] = matrix_to_json(input.sys.node.A);
  doc["B"] = matrix_to_json(input.sys.node.B);
  doc["C"] = matrix_to_json(input.sys.node.C);
  doc["H"] = matrix_to_json(input.sys.node.H);
  doc["W"] = matrix_to_json(input.sys.topo.W);
  doc["delta"] = input.sys.topo.delta;
  doc["h"] = input.sys.h;
  if (input.multirate) {
    doc["multirate"] = {{"kind", multirate_kind_name(input.multirate->kind)},
                        {"l", input.multirate->l}};
  }
  doc["tolerance"] = {{"rank_rel", input.tol.rank_rel},
                      {"eig_cluster", input.tol.eig_cluster},
                      {"chain_residual", input.tol.chain_residual}};
  return doc.dump(2);
}

namespace fixtures {

NetworkedSystem s1() {
  NetworkedSystem sys;
  sys.node.A = rmat({{1, 0}, {1, 1}});
  sys.node.B = rmat({{1, 0}, {0, 1}});
  sys.node.C = rmat({{1, 0}, {0, 0}});
  sys.node.H = rmat({{1, 0}, {0, 1}});
  sys.topo.W = rmat({{0, 0}, {1, 0}});
  sys.topo.delta = {1, 0};
  sys.h = 0.1;
  return sys;
}

NetworkedSystem s2() {
  NetworkedSystem sys = s1();
  sys.topo.W = rmat({{0, 1}, {1, 0}});
  return sys;
}

NetworkedSystem s3() {
  NetworkedSystem sys;
  sys.node.A = rmat({{1, 1}, {-1, 1}});
  sys.node.B = rmat({{1}, {0}});
  sys.node.C = rmat({{1, 0}, {0, 1}});
  sys.node.H = rmat({{1, 0}, {0, 1}});
  sys.topo.W = rmat({{0, 1}, {1, 0}});
  sys.topo.delta = {1, 0};
  sys.h = std::acos(-1.0);  // pi
  return sys;
}

NetworkedSystem s4() {
  NetworkedSystem sys;
  sys.node.A = rmat({{1, 0}, {1, 1}});
  sys.node.B = rmat({{0, 0}, {0, 1}});
  sys.node.C = rmat({{1, 0}, {0, 0}});
  sys.node.H = rmat({{1, 0}, {0, 1}});
  sys.topo.W = rmat({{0, 0}, {1, 0}});
  sys.topo.delta = {1, 1};
  sys.h = 0.1;
  return sys;
}

NetworkedSystem by_name(const std::string& name) {
  if (name == "s1") return s1();
  if (name == "s2") return s2();
  if (name == "s3") return s3();
  if (name == "s4") return s4();
  throw ValidationError("unknown demo fixture \"" + name + "\" (expected s1..s4)");
}

std::string json_text(const std::string& name) {
  ParsedInput input;
  input.sys = by_name(name);
  return serialize_system(input);
}

}  // namespace fixtures

}  // namespace netctrl
