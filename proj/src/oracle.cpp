#include "netctrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

namespace netctrl {
namespace oracle {

namespace {

// Orthonormal basis extension: columns of `cand` are projected off `basis`
// and the directions that survive the cutoff are appended. Returns how many
// columns were added. Staged orthogonalization keeps the rank decision
// conditioned stage by stage, where a single SVD of [psi, phi psi, ...,
// phi^{d-1} psi] drowns the deep directions in the compounded powers.
int extend_basis(CMatrix& basis, const CMatrix& cand, double cutoff) {
  if (cand.cols() == 0 || cand.rows() == 0) return 0;
  int added = 0;
  CMatrix reduced = cand;
  for (int pass = 0; pass < 2; ++pass)  // twice for re-orthogonalization
    if (basis.cols() > 0) reduced -= basis * (basis.adjoint() * reduced);
  Eigen::JacobiSVD<CMatrix> svd(reduced, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) break;
    basis.conservativeResize(basis.rows(), basis.cols() + 1);
    basis.col(basis.cols() - 1) = svd.matrixU().col(i);
    ++added;
  }
  return added;
}

// Reachable-subspace basis of (phi, psi): the range of the Kalman matrix
// computed by staged orthogonalization.
CMatrix reachable_basis(const CMatrix& phi, const CMatrix& psi, const Tolerance& tol) {
  const Eigen::Index d = phi.rows();
  const double cutoff = tol.rank_rel * std::max(1.0, phi.norm() + psi.norm());
  CMatrix basis(d, 0);
  extend_basis(basis, psi, cutoff);
  for (Eigen::Index k = 1; k < d && basis.cols() < d; ++k)
    if (extend_basis(basis, phi * basis, cutoff) == 0) break;
  return basis;
}

}  // namespace

OracleVerdict kalman_rank(const CMatrix& phi, const CMatrix& psi, const Tolerance& tol) {
  if (phi.rows() != phi.cols()) throw DimensionMismatch("kalman_rank: phi must be square");
  if (psi.rows() != phi.rows()) throw DimensionMismatch("kalman_rank: psi must have dim rows");
  const Eigen::Index d = phi.rows();
  const Eigen::Index p = psi.cols();
  const double scale = std::max(1.0, phi.norm() + psi.norm());

  OracleVerdict verdict;
  verdict.dim = static_cast<int>(d);

  CMatrix basis = reachable_basis(phi, psi, tol);
  verdict.rank = static_cast<int>(basis.cols());
  verdict.reachable = verdict.rank == static_cast<int>(d);

  // Controllable to the origin iff range(phi^d) is inside the reachable
  // subspace: rank([R, phi^d]) == rank(R).
  CMatrix phi_d = CMatrix::Identity(d, d);
  for (Eigen::Index k = 0; k < d; ++k) phi_d = phi_d * phi;
  CMatrix extended = basis;
  verdict.controllable_to_origin =
      extend_basis(extended, phi_d, tol.rank_rel * std::max(1.0, scale)) == 0;

  // Independent route: PBH sweep over the spectrum of phi.
  std::vector<Complex> deficient;
  for (const ClusteredEig& c : clustered_eigenvalues(phi, tol)) {
    CMatrix pencil(d, d + p);
    pencil.leftCols(d) = c.value * CMatrix::Identity(d, d) - phi;
    pencil.rightCols(p) = psi;
    if (rank_info(pencil, tol, std::abs(c.value) + scale).rank < static_cast<int>(d))
      deficient.push_back(c.value);
  }

  // Defective eigenvalues scatter by eps^(1/k) under a direct eigensolve —
  // far enough off the true value for every pencil in the sweep to keep full
  // rank even when the pair is uncontrollable. When the staircase found an
  // uncontrollable complement, certify its modes constructively instead: the
  // reachable subspace is phi-invariant, so w = y Q2* built from a left
  // eigenpair (mu, y) of the deflated block Q2* phi Q2 satisfies
  // w phi = mu w and w psi = 0 up to the staircase cutoff.
  if (!verdict.reachable && basis.cols() < d) {
    Eigen::JacobiSVD<CMatrix> svd(basis.cols() > 0 ? basis : CMatrix::Zero(d, 1),
                                  Eigen::ComputeFullU);
    const CMatrix complement = svd.matrixU().rightCols(d - basis.cols());
    const CMatrix deflated = complement.adjoint() * phi * complement;
    const double certify = 1e-6 * scale;
    for (const Eigenpair& pair : eig_left(deflated, tol))
      for (const CMatrix& y : pair.left_vectors) {
        const CMatrix w = y * complement.adjoint();
        if ((w * phi - pair.value * w).norm() <= certify && (w * psi).norm() <= certify) {
          deficient.push_back(pair.value);
          break;
        }
      }
  }
  for (const ClusteredEig& c : cluster_eigenvalues(deficient, cluster_radius(phi, tol)))
    verdict.deficient_eigenvalues.push_back(c.value);

  const bool pbh_full = verdict.deficient_eigenvalues.empty();
  if (pbh_full != verdict.reachable)
    throw InternalInconsistency(
        "kalman_rank: the Kalman matrix says rank " + std::to_string(verdict.rank) + "/" +
        std::to_string(d) + " but the PBH sweep " + (pbh_full ? "finds no" : "finds a") +
        " deficient eigenvalue");
  return verdict;
}

SteerResult steer(const SampledSystem& ss, const CMatrix& x0, const CMatrix& x_target, int steps,
                  const Tolerance& tol) {
  const Eigen::Index d = ss.state_transition.rows();
  if (x0.rows() != d || x0.cols() != 1 || x_target.rows() != d || x_target.cols() != 1)
    throw DimensionMismatch("steer: states must be dim x 1 columns");
  if (steps < 1) throw DimensionMismatch("steer: steps must be >= 1");
  const Eigen::Index p = ss.input_map.cols();

  // x(steps) = phi^steps x0 + [phi^{steps-1} psi, ..., psi] [u_0; ...; u_{steps-1}]
  CMatrix map(d, static_cast<Eigen::Index>(steps) * p);
  CMatrix block = ss.input_map;
  for (int k = steps - 1; k >= 0; --k) {
    map.middleCols(static_cast<Eigen::Index>(k) * p, p) = block;
    if (k > 0) block = ss.state_transition * block;
  }
  CMatrix free_motion = x0;
  for (int k = 0; k < steps; ++k) free_motion = ss.state_transition * free_motion;

  Eigen::JacobiSVD<CMatrix> svd(map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(tol.rank_rel);
  const CMatrix stacked = svd.solve(x_target - free_motion);

  SteerResult result;
  result.residual = (map * stacked - (x_target - free_motion)).norm();
  for (int k = 0; k < steps; ++k)
    result.inputs.push_back(stacked.middleRows(static_cast<Eigen::Index>(k) * p, p));
  return result;
}

std::vector<ScanRow> scan_periods(const NetworkedSystem& sys, double h_min, double h_max,
                                  int count, const Tolerance& tol) {
  if (!(h_min > 0) || !(h_max >= h_min))
    throw ValidationError("scan_periods: need 0 < h_min <= h_max");
  if (count < 1) throw ValidationError("scan_periods: count must be >= 1");

  std::vector<ScanRow> rows;
  for (int i = 0; i < count; ++i) {
    ScanRow row;
    row.h = count == 1 ? h_min
                       : h_min + (h_max - h_min) * static_cast<double>(i) /
                             static_cast<double>(count - 1);
    NetworkedSystem at_h = sys;
    at_h.h = row.h;
    try {
      const AnalysisReport report = analyze(at_h, tol);
      row.verdict = report.verdict;
      row.criterion = report.criterion;
    } catch (const Error& e) {
      row.verdict = Verdict::Inconclusive;
      row.criterion = std::string("error: ") + e.what();
    }
    row.pathological_node = is_pathological(sys.node.A, row.h, tol).first;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "h,verdict,criterion,pathological_node\n";
  char buf[64];
  for (const ScanRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g", row.h);
    out += buf;
    out += ',';
    out += verdict_name(row.verdict);
    out += ',';
    std::string criterion = row.criterion;
    std::replace(criterion.begin(), criterion.end(), ',', ';');
    out += criterion;
    out += ',';
    out += row.pathological_node ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace oracle
}  // namespace netctrl
