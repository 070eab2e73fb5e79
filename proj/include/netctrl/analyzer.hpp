#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "netctrl/spectral.hpp"
#include "netctrl/sysmodel.hpp"

namespace netctrl {

enum class Verdict { Controllable, Uncontrollable, Inconclusive };

const char* verdict_name(Verdict v);

struct Margin {
  std::string check;
  double margin = 0;
};

// Outcome of one criterion (or of the full decision tree). Uncontrollable
// verdicts always carry a witness in `evidence` (a left eigenvector
// annihilating the input map, or the failed necessary-condition instance);
// Controllable verdicts name the conditions that were verified.
struct AnalysisReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string criterion;
  nlohmann::json evidence = nlohmann::json::object();
  std::vector<Margin> margins;
  std::vector<std::string> flags;

  AnalysisReport& flag(const std::string& f);
  AnalysisReport& with_margin(const std::string& check, double value);
};

// One subsystem per distinct eigenvalue lambda_i of W: the n x n matrix
// E_i = e^{Ah} + lambda_i * coupling_hold together with W's chains at
// lambda_i and the clustered spectrum of E_i. The multiset union of the
// entry spectra (weighted by lambda multiplicity) reproduces the spectrum
// of the full state transition matrix.
struct FamilyEntry {
  Complex lambda;
  CMatrix subsystem;  // E_i
  std::vector<JordanChain> w_chains;
  std::vector<ClusteredEig> spectrum;

  int lambda_multiplicity() const;
};

struct SubsystemFamily {
  std::vector<FamilyEntry> entries;
  SampledSystem source;
  NetworkTopology topo;
  double spectrum_union_margin = 0;  // allowed/actual mismatch ratio of the union check
};

// PBH rank test of a continuous pair (A, B): full row rank of
// [lambda I - A, B] at every eigenvalue of A.
AnalysisReport pbh_single_continuous(const CMatrix& a, const CMatrix& b, const Tolerance& tol);

struct PathologyWitness {
  Complex lambda_a;
  Complex lambda_b;
  int k = 0;  // lambda_a - lambda_b = 2 k pi j / h
};

// True when two eigenvalues of A differ by 2 k pi j / h for a nonzero
// integer k, i.e. when sampling at h folds distinct continuous modes onto
// one discrete mode. All witnessing pairs are returned.
std::pair<bool, std::vector<PathologyWitness>> is_pathological(const CMatrix& a, double h,
                                                               const Tolerance& tol);

// Splits the sampled system along the eigenvalues of W (one FamilyEntry per
// distinct lambda) and verifies the spectrum-union identity against a direct
// eigendecomposition of the state transition matrix.
SubsystemFamily decompose(const SampledSystem& ss, const NetworkTopology& topo,
                          const Tolerance& tol);

// Left eigenspace of the state transition matrix at theta, assembled from
// the W-chains and the generalized chains of the subsystems by the
// convolution rule eta^k = sum_m v^{k+1-m} (x) xi^m, with the direct sum
// taken across family entries sharing theta.
struct EigenspaceBasis {
  Complex theta;
  std::vector<CMatrix> basis;              // 1 x Nn rows, linearly independent
  std::vector<std::string> construction;   // provenance, one entry per basis row
};

EigenspaceBasis eigenspace_phis(const SubsystemFamily& fam, Complex theta, const Tolerance& tol);

// Sufficient eigenvector test over every eigenvalue of the state transition
// matrix: no nonzero vector of any eigenspace may annihilate the input map.
// Upgrades a failure to Uncontrollable when the state transition matrix is
// nonsingular.
AnalysisReport check_sufficient_general(const SampledSystem& ss, const SubsystemFamily& fam,
                                        const Tolerance& tol);

// Same sweep against an arbitrary input map (the multi-rate checks widen the
// input); fam.source supplies the state transition matrix.
AnalysisReport eigenspace_annihilation_sweep(const SubsystemFamily& fam, const CMatrix& input_map,
                                             const Tolerance& tol);

// Diagonalizable-W criterion: (1) (W, Delta) controllable, (2) every
// (E_i, input_hold) controllable, (3) eigenvalues shared across subsystems
// keep full rank under the stacked map (v_k Delta) (x) (xi Bh). All three
// are an iff when every E_i is nonsingular.
AnalysisReport check_diagonalizable(const SampledSystem& ss, const SubsystemFamily& fam,
                                    const Tolerance& tol);

// Necessary conditions, applicable when every E_i is nonsingular: failure of
// PBH on (W, Delta) or any (E_i, input_hold) proves uncontrollability; with
// singular W this includes the topology-free test on (e^{Ah}, input_hold).
AnalysisReport check_necessary(const SampledSystem& ss, const SubsystemFamily& fam,
                               const Tolerance& tol);

// Structural pattern predicates (exact support tests; entries below 1e-14
// are structural zeros).
bool is_chain_topology(const CMatrix& w);
bool is_star_topology(const CMatrix& w);
bool is_circle_topology(const CMatrix& w);
bool is_delta_first_node_only(const std::vector<int>& delta);           // diag{1,0,...,0}
bool is_delta_all_but_second(const std::vector<int>& delta);            // diag{1,0,1,...,1}

// Chain-topology shortcut (driver at node 1): spans of the generalized
// chains of e^{Ah} about the coupling, capped at N, must clear the input.
AnalysisReport check_chain(const SampledSystem& ss, const NetworkTopology& topo,
                           const Tolerance& tol);

// Star-topology shortcut (driver at root and all leaves but one): same span
// test capped at 2; when no chain extends past its top vector the test
// reduces to (A, B) controllability plus non-pathological sampling.
AnalysisReport check_star(const SampledSystem& ss, const NetworkTopology& topo, const CMatrix& a,
                          const CMatrix& b, const Tolerance& tol);

// Closed-form spectrum of a directed weighted cycle: N-th roots of the
// cycle weight product, verified against the eigensolver.
std::vector<Complex> circle_eigenvalues(const CMatrix& w, const Tolerance& tol);

// Cycle-topology criterion (driver at node 1): the topology pair is
// structurally controllable and the cycle spectrum is simple, so only the
// subsystem and shared-eigenvalue conditions remain.
AnalysisReport check_circle(const SampledSystem& ss, const SubsystemFamily& fam,
                            const Tolerance& tol);

// Scalar node dynamics (n = 1, a != 0): controllability transfers from the
// continuous pair (a I + c W, b Delta) to the sampled system for every h,
// and back when the sampled state transition matrix is nonsingular.
AnalysisReport check_scalar(const NetworkedSystem& sys, const Tolerance& tol);

// Self-loop node dynamics (A = I_n): same transfer from the continuous pair
// (I + W (x) HC, Delta (x) B).
AnalysisReport check_selfloop(const NetworkedSystem& sys, const Tolerance& tol);

// Decision tree over all criteria: special dynamics, necessary conditions,
// structural shortcuts, the diagonalizable iff path, the general eigenvector
// test, then the brute-force fallback. Definite verdicts are cross-checked
// against the oracle; a disagreement throws InternalInconsistency.
AnalysisReport analyze(const NetworkedSystem& sys, const Tolerance& tol);

}  // namespace netctrl
