#pragma once

#include <string>
#include <vector>

#include "netctrl/analyzer.hpp"
#include "netctrl/sysmodel.hpp"

namespace netctrl {
namespace oracle {

// Brute-force verdict on a discrete pair. Reachability and controllability
// to the origin coincide when phi is nonsingular; both are reported so the
// singular case stays explicit.
struct OracleVerdict {
  bool reachable = false;
  bool controllable_to_origin = false;
  int rank = 0;
  int dim = 0;
  std::vector<Complex> deficient_eigenvalues;  // eigenvalues of phi where the PBH pencil drops rank
};

// Rank of [psi, phi psi, ..., phi^{d-1} psi], computed by staged
// orthogonalization of the reachable subspace (one SVD of the raw matrix
// drowns deep directions in the compounded powers of phi), cross-checked on
// every call against the PBH sweep over the eigenvalues of phi; a
// disagreement between the two routes throws InternalInconsistency instead
// of returning silently.
OracleVerdict kalman_rank(const CMatrix& phi, const CMatrix& psi, const Tolerance& tol);

struct SteerResult {
  std::vector<CMatrix> inputs;  // Np x 1 per step
  double residual = 0;          // ||x(steps) - x_target||
};

// Minimum-norm input sequence driving x0 toward x_target in `steps` steps,
// solved by least squares over the stacked reachability map. The residual
// encodes failure; nothing throws for unreachable targets.
SteerResult steer(const SampledSystem& ss, const CMatrix& x0, const CMatrix& x_target, int steps,
                  const Tolerance& tol);

struct ScanRow {
  double h = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string criterion;
  bool pathological_node = false;
};

// Analyze verdict plus node-level pathology flag over a uniform period grid,
// ordered by h. Internal analysis errors become Inconclusive rows with the
// error recorded in the criterion column; the scan itself never throws.
std::vector<ScanRow> scan_periods(const NetworkedSystem& sys, double h_min, double h_max,
                                  int count, const Tolerance& tol);

// CSV with header "h,verdict,criterion,pathological_node", floats printed
// with 12 significant digits.
std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace oracle
}  // namespace netctrl
