#include "netctrl/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace netctrl {

namespace {

constexpr double kMaxTransformCondition = 1e12;

// Orthonormal column basis of the span of `cols` (empty allowed).
CMatrix orthonormal_columns(const std::vector<Eigen::VectorXcd>& cols, Eigen::Index dim) {
  if (cols.empty()) return CMatrix(dim, 0);
  CMatrix m(dim, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Right null space (columns x with s x = 0) at an absolute threshold,
// most-null columns first.
std::vector<Eigen::VectorXcd> right_null_columns(const CMatrix& s, double threshold) {
  Eigen::JacobiSVD<CMatrix> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::VectorXcd> out;
  for (Eigen::Index i = svd.matrixV().cols() - 1; i >= 0; --i) {
    const double sigma = i < sv.size() ? sv(i) : 0.0;
    if (sigma <= threshold) out.push_back(svd.matrixV().col(i));
  }
  return out;
}

double condition_number(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) == 0) return std::numeric_limits<double>::infinity();
  return sv(0) / (sv(sv.size() - 1));
}

}  // namespace

int JordanBlockGroup::algebraic_multiplicity() const {
  int total = 0;
  for (const JordanChain& c : chains) total += c.length();
  return total;
}

double chain_residual_scale(const CMatrix& e, const CMatrix& hc, const Tolerance& tol) {
  return tol.chain_residual * std::max({1.0, e.norm(), hc.norm()});
}

GeneralizedJordanChain generalized_chain(const CMatrix& e, const CMatrix& hc, Complex theta,
                                         const CMatrix& top, const Tolerance& tol, int max_len) {
  if (e.rows() != e.cols()) throw NonSquare("generalized_chain: E must be square");
  if (hc.rows() != e.rows() || hc.cols() != e.cols())
    throw DimensionMismatch("generalized_chain: coupling shape differs from E");
  if (top.rows() != 1 || top.cols() != e.rows())
    throw DimensionMismatch("generalized_chain: top vector must be 1 x n");
  if (max_len < 1) throw DimensionMismatch("generalized_chain: max_len must be >= 1");

  const Eigen::Index n = e.rows();
  const CMatrix pencil = theta * CMatrix::Identity(n, n) - e;
  const double scale = chain_residual_scale(e, hc, tol);

  GeneralizedJordanChain chain;
  chain.eigenvalue = theta;
  chain.coupling = hc;

  const CMatrix first = normalize_row(top);
  if (first.norm() == 0 || (first * pencil).norm() > scale)
    throw NotAnEigenvector("generalized_chain: top vector fails xi (theta I - E) = 0");
  chain.vectors.push_back(first);

  while (chain.length() < max_len) {
    const CMatrix rhs = chain.vectors.back() * hc;
    double res = 0;
    const CMatrix next = solve_row_lstsq(pencil, rhs, tol, &res, scale);
    if (res > scale * std::max(1.0, rhs.norm())) {
      chain.saturated = true;  // no xi^{j+1} solves the chain equation
      break;
    }
    chain.vectors.push_back(next);
  }
  return chain;
}

namespace {

// Chain skeleton of one clustered eigenvalue of W: null-space dimensions of
// powers of S = (W - lambda I)^T fix the block sizes; heads are chosen
// top-down and descended, which pins the top eigenvector of every chain.
struct ChainSkeleton {
  std::vector<std::vector<Eigen::VectorXcd>> chains;  // chains[c][height-1], height 1 = top
};

ChainSkeleton build_skeleton(const CMatrix& w, Complex lambda, int alg_mult,
                             const Tolerance& tol) {
  const Eigen::Index n = w.rows();
  const CMatrix s = (w - lambda * CMatrix::Identity(n, n)).transpose();
  const double base_norm = std::max(1.0, s.norm());

  // Null space dimensions d_k of s^k, k = 1.. until they reach alg_mult.
  std::vector<std::vector<Eigen::VectorXcd>> power_null;  // per k, orthonormal-ish columns
  std::vector<int> dims;
  CMatrix s_pow = CMatrix::Identity(n, n);
  int reached = 0;
  for (int k = 1; k <= alg_mult && reached < alg_mult; ++k) {
    s_pow = s_pow * s;
    const double threshold = tol.chain_residual * std::pow(base_norm, k);
    auto cols = right_null_columns(s_pow, threshold);
    if (cols.size() > static_cast<size_t>(alg_mult)) cols.resize(static_cast<size_t>(alg_mult));
    if (k == 1 && cols.empty()) {
      // Every eigenvalue carries at least one eigenvector; fall back to the
      // least-singular direction.
      Eigen::JacobiSVD<CMatrix> svd(s_pow, Eigen::ComputeFullV);
      cols.push_back(svd.matrixV().col(n - 1));
    }
    if (!dims.empty() && static_cast<int>(cols.size()) <= dims.back()) break;  // growth stalled
    dims.push_back(static_cast<int>(cols.size()));
    power_null.push_back(std::move(cols));
    reached = dims.back();
  }
  if (reached < alg_mult)
    throw IllConditioned("jordan_structure: null-space growth of (W - lambda I)^k stalled at " +
                         std::to_string(reached) + " of " + std::to_string(alg_mult) +
                         "; structure is numerically ambiguous");

  const int max_height = static_cast<int>(dims.size());
  auto chains_at_least = [&](int k) {  // number of chains of length >= k
    return dims[static_cast<size_t>(k - 1)] - (k >= 2 ? dims[static_cast<size_t>(k - 2)] : 0);
  };

  ChainSkeleton skeleton;
  for (int height = max_height; height >= 1; --height) {
    int present = 0;
    for (const auto& c : skeleton.chains)
      if (static_cast<int>(c.size()) >= height) ++present;
    const int needed = chains_at_least(height) - present;
    if (needed <= 0) continue;

    // Obstruction span: K_{height-1} plus the height-level vectors of the
    // longer chains already chosen.
    std::vector<Eigen::VectorXcd> obstruction;
    if (height >= 2)
      for (const auto& col : power_null[static_cast<size_t>(height - 2)]) obstruction.push_back(col);
    for (const auto& c : skeleton.chains)
      if (static_cast<int>(c.size()) >= height) obstruction.push_back(c[static_cast<size_t>(height - 1)]);

    CMatrix obs = orthonormal_columns(obstruction, n);
    int found = 0;
    for (const auto& cand : power_null[static_cast<size_t>(height - 1)]) {
      if (found == needed) break;
      Eigen::VectorXcd reduced = cand;
      if (obs.cols() > 0) reduced -= obs * (obs.adjoint() * reduced);
      if (reduced.norm() < 1e-8) continue;
      reduced.normalize();
      // Descend the head to height 1; the rebuilt chain keeps only the top.
      std::vector<Eigen::VectorXcd> chain(static_cast<size_t>(height));
      chain[static_cast<size_t>(height - 1)] = reduced;
      for (int m = height - 1; m >= 1; --m)
        chain[static_cast<size_t>(m - 1)] = s * chain[static_cast<size_t>(m)];
      if (chain[0].norm() < 1e-12) continue;  // degenerate descent
      skeleton.chains.push_back(std::move(chain));
      ++found;
      // Refresh the obstruction with the accepted head's column.
      obstruction.push_back(skeleton.chains.back()[static_cast<size_t>(height - 1)]);
      obs = orthonormal_columns(obstruction, n);
    }
    if (found < needed)
      throw IllConditioned("jordan_structure: could not separate " + std::to_string(needed) +
                           " chain head(s) at height " + std::to_string(height));
  }
  std::sort(skeleton.chains.begin(), skeleton.chains.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return skeleton;
}

}  // namespace

JordanStructure jordan_structure(const CMatrix& w, const Tolerance& tol) {
  if (w.rows() != w.cols()) throw NonSquare("jordan_structure: W must be square");
  const Eigen::Index n = w.rows();
  require_finite(w, "jordan_structure input");

  JordanStructure out;
  out.matrix_dim = static_cast<int>(n);
  if (n == 0) {
    out.transform = CMatrix(0, 0);
    out.jordan_form = CMatrix(0, 0);
    out.condition = 1;
    return out;
  }

  const double scale = std::max(1.0, w.norm());
  const CMatrix identity = CMatrix::Identity(n, n);

  for (const ClusteredEig& cluster : clustered_eigenvalues(w, tol)) {
    JordanBlockGroup group;
    group.eigenvalue = cluster.value;
    const CMatrix pencil = w - cluster.value * identity;  // chain: v^m pencil = v^{m-1}

    const ChainSkeleton skeleton = build_skeleton(w, cluster.value, cluster.multiplicity, tol);
    for (const auto& raw : skeleton.chains) {
      JordanChain chain;
      chain.eigenvalue = cluster.value;
      // Rebuild bottom-up from the skeleton's top by minimum-norm extension;
      // this removes the arbitrary mixing a raw descent carries.
      CMatrix v = normalize_row(raw[0].transpose());
      chain.vectors.push_back(v);
      for (size_t m = 1; m < raw.size(); ++m) {
        double res = 0;
        v = solve_row_lstsq(pencil, chain.vectors.back(), tol, &res, tol.chain_residual * scale);
        if (res > tol.chain_residual * scale)
          throw IllConditioned("jordan_structure: chain extension residual " +
                               std::to_string(res) + " exceeds the acceptance bound");
        chain.vectors.push_back(v);
      }
      group.chains.push_back(std::move(chain));
    }
    out.blocks.push_back(std::move(group));
  }

  // Assemble T (rows bottom-to-top per chain) and the matching J.
  int total = 0;
  for (const auto& g : out.blocks) total += g.algebraic_multiplicity();
  if (total != n)
    throw IllConditioned("jordan_structure: chains cover " + std::to_string(total) + " of " +
                         std::to_string(n) + " dimensions");

  out.transform = CMatrix(n, n);
  out.jordan_form = CMatrix::Zero(n, n);
  Eigen::Index row = 0;
  for (const auto& g : out.blocks) {
    for (const auto& chain : g.chains) {
      const int len = chain.length();
      for (int m = len; m >= 1; --m)
        out.transform.row(row + (len - m)) = chain.vectors[static_cast<size_t>(m - 1)];
      for (int k = 0; k < len; ++k) {
        out.jordan_form(row + k, row + k) = g.eigenvalue;
        if (k + 1 < len) out.jordan_form(row + k, row + k + 1) = Complex(1, 0);
      }
      row += len;
    }
  }

  out.condition = condition_number(out.transform);
  if (!(out.condition <= kMaxTransformCondition))
    throw IllConditioned("jordan_structure: transform condition " +
                         std::to_string(out.condition) + " exceeds 1e12");

  const double defect = (out.transform * w - out.jordan_form * out.transform).norm();
  if (defect > tol.chain_residual * scale * out.transform.norm() * 10)
    throw IllConditioned("jordan_structure: T W - J T residual " + std::to_string(defect));
  return out;
}

}  // namespace netctrl
