#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netctrl/types.hpp"

namespace netctrl {

// Identical node dynamics: x_i' = A x_i + sum_j w_ij H y_j + delta_i B u_i,
// y_i = C x_i. All four matrices are real-valued on ingestion.
struct NodeDynamics {
  CMatrix A;  // n x n state matrix
  CMatrix B;  // n x p input matrix
  CMatrix C;  // m x n output matrix
  CMatrix H;  // n x m inner coupling

  int n() const { return static_cast<int>(A.rows()); }
  int p() const { return static_cast<int>(B.cols()); }
  int m() const { return static_cast<int>(C.rows()); }

  void validate() const;
};

struct NetworkTopology {
  CMatrix W;               // N x N weights, zero diagonal
  std::vector<int> delta;  // driver flags, each 0 or 1

  int N() const { return static_cast<int>(W.rows()); }
  CMatrix delta_matrix() const;  // diag{delta}

  void validate() const;
};

struct NetworkedSystem {
  NodeDynamics node;
  NetworkTopology topo;
  double h = 0;  // sampling period, seconds

  int dim() const { return topo.N() * node.n(); }
  void validate() const;
};

// ZOH discretization of the networked system at period h. The composite
// matrices are assembled from the stored blocks and stay reproducible from
// them to 1e-12.
struct SampledSystem {
  CMatrix state_transition;  // I_N (x) node_transition + W (x) coupling_hold
  CMatrix input_map;         // Delta (x) input_hold
  CMatrix node_transition;   // e^{Ah}
  CMatrix coupling_hold;     // (integral_0^h e^{A tau} dtau) H C
  CMatrix input_hold;        // (integral_0^h e^{A tau} dtau) B
  double h = 0;
};

// Continuous composite (Phi, Psi) = (I_N (x) A + W (x) HC, Delta (x) B).
std::pair<CMatrix, CMatrix> assemble_continuous(const NetworkedSystem& sys);

SampledSystem discretize(const NetworkedSystem& sys);

enum class MultiRateKind { TMS, CMS };

const char* multirate_kind_name(MultiRateKind kind);

struct MultiRatePattern {
  MultiRateKind kind = MultiRateKind::TMS;
  int l = 1;  // rate ratio >= 1
};

// Everything a system file can carry.
struct ParsedInput {
  NetworkedSystem sys;
  std::optional<MultiRatePattern> multirate;
  Tolerance tol;
  std::vector<std::string> warnings;  // populated only in lenient mode
};

// Parses and validates the JSON input document. Defaults: delta -> all ones,
// C -> I_n, H -> I_n (against an n-dimensional output). Unknown keys are a
// ValidationError unless lenient, in which case they become warnings.
// Validation failures name the offending field.
ParsedInput parse_system(std::string_view text, bool lenient = false);

// Inverse of parse_system; parse(serialize(x)) reproduces x exactly.
std::string serialize_system(const ParsedInput& input);

namespace fixtures {

// Two-node chain driven at node 1; the nodes share a double integrator-like
// A = [[1,0],[1,1]] with full B, h = 0.1. Controllable.
NetworkedSystem s1();
// Same node as s1 on the two-node cycle, still driven at node 1 only.
// Controllable via the diagonalizable-topology conditions.
NetworkedSystem s2();
// Spiral node A = [[1,1],[-1,1]] sampled at h = pi, which is pathological
// for the isolated node; the two-node cycle restores controllability.
NetworkedSystem s3();
// s1's topology with B = diag{0,1}: the sampled node pair (e^{Ah}, B(h))
// is rank deficient and W is singular, so the network is uncontrollable
// regardless of the coupling; H = I, C = diag{1,0}, delta = {1,1} complete
// the fixture (the verdict does not depend on them).
NetworkedSystem s4();

NetworkedSystem by_name(const std::string& name);  // "s1".."s4"
std::string json_text(const std::string& name);    // the same fixtures as JSON documents

}  // namespace fixtures

}  // namespace netctrl
