#include "netctrl/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace netctrl {

namespace {

void require_square(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw NonSquare(std::string(who) + ": matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
}

double one_norm(const CMatrix& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Diagonal Pade approximant of e^A of degree `deg` (A pre-scaled by the caller).
CMatrix pade(const CMatrix& a, int deg) {
  static const std::vector<std::vector<double>> coeffs = {
      {120., 60., 12., 1.},
      {30240., 15120., 3360., 420., 30., 1.},
      {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.},
      {17643225600., 8821612800., 2075673600., 302702400., 30270240., 2162160., 110880., 3960.,
       90., 1.},
      {64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
       129060195264000., 10559470521600., 670442572800., 33522128640., 1323241920., 40840800.,
       960960., 16380., 182., 1.}};
  const std::vector<double>* b = nullptr;
  switch (deg) {
    case 3: b = &coeffs[0]; break;
    case 5: b = &coeffs[1]; break;
    case 7: b = &coeffs[2]; break;
    case 9: b = &coeffs[3]; break;
    case 13: b = &coeffs[4]; break;
    default: throw ConvergenceFailure("unsupported Pade degree");
  }
  const Eigen::Index n = a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = a * a;
  CMatrix u, v;
  if (deg < 13) {
    // u = A (b1 I + b3 A^2 + ...), v = b0 I + b2 A^2 + ...
    CMatrix even = (*b)[0] * id;
    CMatrix odd = (*b)[1] * id;
    CMatrix pow = a2;
    for (int k = 2; k <= deg; k += 2) {
      even += (*b)[k] * pow;
      if (k + 1 <= deg) odd += (*b)[k + 1] * pow;
      if (k + 2 <= deg) pow = pow * a2;
    }
    u = a * odd;
    v = even;
  } else {
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a2 * a4;
    u = a * (a6 * ((*b)[13] * a6 + (*b)[11] * a4 + (*b)[9] * a2) + (*b)[7] * a6 + (*b)[5] * a4 +
             (*b)[3] * a2 + (*b)[1] * id);
    v = a6 * ((*b)[12] * a6 + (*b)[10] * a4 + (*b)[8] * a2) + (*b)[6] * a6 + (*b)[4] * a4 +
        (*b)[2] * a2 + (*b)[0] * id;
  }
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix& m) {
  require_square(m, "expm");
  const Eigen::Index n = m.rows();
  if (n == 0) return CMatrix(0, 0);
  require_finite(m, "expm input");

  const double norm = one_norm(m);
  if (norm <= 1.495585217958292e-2) return pade(m, 3);
  if (norm <= 2.539398330063230e-1) return pade(m, 5);
  if (norm <= 9.504178996162932e-1) return pade(m, 7);
  if (norm <= 2.097847961257068e0) return pade(m, 9);

  const double theta13 = 5.371920351148152e0;
  int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
  CMatrix result = pade(m / std::pow(2.0, squarings), 13);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

std::pair<CMatrix, CMatrix> expm_with_integral(const CMatrix& m, double h) {
  require_square(m, "expm_with_integral");
  if (!(h > 0)) throw NonPositivePeriod("expm_with_integral: h = " + std::to_string(h));
  const Eigen::Index n = m.rows();
  // e^{[[M, I], [0, 0]] h} = [[e^{Mh}, int_0^h e^{M tau} dtau], [0, I]].
  CMatrix aug = CMatrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = m;
  aug.topRightCorner(n, n) = CMatrix::Identity(n, n);
  const CMatrix big = expm(aug * h);
  return {big.topLeftCorner(n, n), big.topRightCorner(n, n)};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double RankInfo::margin() const {
  const double inf = std::numeric_limits<double>::infinity();
  if (cutoff <= 0) return inf;
  const double kept = rank > 0 ? smallest_kept / cutoff : inf;
  const double dropped = largest_dropped > 0 ? cutoff / largest_dropped : inf;
  return std::min(kept, dropped);
}

RankInfo rank_info(const CMatrix& m, const Tolerance& tol, double anchor) {
  RankInfo info;
  if (m.size() == 0) return info;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  info.cutoff = tol.rank_rel * std::max(sigma_max, anchor);
  if (sigma_max == 0.0) return info;  // zero matrix
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > info.cutoff) {
      ++info.rank;
      info.smallest_kept = sv(i);
    } else {
      info.largest_dropped = std::max(info.largest_dropped, sv(i));
    }
  }
  return info;
}

int rank_tol(const CMatrix& m, const Tolerance& tol) { return rank_info(m, tol).rank; }

std::vector<Complex> eigenvalues(const CMatrix& m) {
  require_square(m, "eigenvalues");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("eigenvalue iteration failed");
  std::vector<Complex> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

double spectral_radius(const CMatrix& m) {
  double rho = 0;
  for (const Complex& z : eigenvalues(m)) rho = std::max(rho, std::abs(z));
  return rho;
}

double cluster_radius(const CMatrix& m, const Tolerance& tol) {
  return tol.eig_cluster * (1.0 + spectral_radius(m));
}

namespace {

// Argument mapped to [0, 2pi) so that e.g. 1 sorts before -1 and the
// reported ordering is stable.
double arg01(const Complex& z) {
  double a = std::arg(z);
  if (a < 0) a += 2 * std::numbers::pi;
  return a;
}

bool eig_order(const Complex& a, const Complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (std::abs(ma - mb) > 1e-14 * (1 + ma + mb)) return ma > mb;
  return arg01(a) < arg01(b);
}

}  // namespace

std::vector<ClusteredEig> cluster_eigenvalues(std::vector<Complex> raw, double radius) {
  const int n = static_cast<int>(raw.size());
  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(raw[static_cast<size_t>(i)] - raw[static_cast<size_t>(j)]) <= radius) {
        const int a = find(i), b = find(j);
        if (a != b) parent[static_cast<size_t>(a)] = b;
      }
  std::vector<ClusteredEig> out;
  std::vector<int> root_index(static_cast<size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_index[static_cast<size_t>(r)] < 0) {
      root_index[static_cast<size_t>(r)] = static_cast<int>(out.size());
      out.push_back({Complex(0, 0), 0});
    }
    ClusteredEig& c = out[static_cast<size_t>(root_index[static_cast<size_t>(r)])];
    c.value += raw[static_cast<size_t>(i)];
    c.multiplicity += 1;
  }
  for (ClusteredEig& c : out) c.value /= static_cast<double>(c.multiplicity);
  std::sort(out.begin(), out.end(),
            [](const ClusteredEig& a, const ClusteredEig& b) { return eig_order(a.value, b.value); });
  return out;
}

std::vector<ClusteredEig> clustered_eigenvalues(const CMatrix& m, const Tolerance& tol) {
  return cluster_eigenvalues(eigenvalues(m), cluster_radius(m, tol));
}

std::vector<CMatrix> left_null_space(const CMatrix& m, double threshold) {
  // v m = 0 <=> m^T v^T = 0; plain transpose, no conjugation. Rows come out
  // most-null first (ascending singular value).
  Eigen::JacobiSVD<CMatrix> svd(m.transpose(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<CMatrix> rows;
  const Eigen::Index cols = svd.matrixV().cols();
  for (Eigen::Index i = cols - 1; i >= 0; --i) {
    const double sigma = i < sv.size() ? sv(i) : 0.0;
    if (sigma <= threshold) rows.push_back(normalize_row(svd.matrixV().col(i).transpose()));
  }
  return rows;
}

std::vector<Eigenpair> eig_left(const CMatrix& m, const Tolerance& tol) {
  require_square(m, "eig_left");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.norm());
  const double bound = tol.chain_residual * scale;
  std::vector<Eigenpair> out;
  for (const ClusteredEig& c : clustered_eigenvalues(m, tol)) {
    const CMatrix shifted = m - c.value * CMatrix::Identity(n, n);
    std::vector<CMatrix> vecs = left_null_space(shifted, bound);
    if (vecs.empty()) {
      // Fall back to the least-singular direction and hold it to the bound.
      Eigen::JacobiSVD<CMatrix> svd(shifted.transpose(), Eigen::ComputeFullV);
      const CMatrix v = normalize_row(svd.matrixV().col(n - 1).transpose());
      const double res = (v * shifted).norm();
      if (res > bound)
        throw ConvergenceFailure("eig_left: no eigenvector meets the residual bound at lambda = (" +
                                 std::to_string(c.value.real()) + "," +
                                 std::to_string(c.value.imag()) + ")");
      vecs.push_back(v);
    }
    if (static_cast<int>(vecs.size()) > c.multiplicity)
      vecs.resize(static_cast<size_t>(c.multiplicity));  // geometric <= algebraic
    out.push_back({c.value, std::move(vecs)});
  }
  return out;
}

CMatrix solve_row_lstsq(const CMatrix& a, const CMatrix& rhs, const Tolerance& tol,
                        double* residual, double absolute_cutoff) {
  if (a.cols() != rhs.cols())
    throw DimensionMismatch("solve_row_lstsq: rhs has " + std::to_string(rhs.cols()) +
                            " cols, pencil has " + std::to_string(a.cols()));
  Eigen::JacobiSVD<CMatrix> svd(a.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  if (absolute_cutoff > 0) {
    if (sigma_max <= absolute_cutoff) {
      // The pencil is zero at this resolution; the minimum-norm solution is
      // the zero row.
      const CMatrix x = CMatrix::Zero(1, a.rows());
      if (residual) *residual = rhs.norm();
      return x;
    }
    svd.setThreshold(absolute_cutoff / sigma_max);
  } else {
    svd.setThreshold(tol.rank_rel);
  }
  const CMatrix x = svd.solve(rhs.transpose()).transpose();
  if (residual) *residual = (x * a - rhs).norm();
  return x;
}

CMatrix normalize_row(const CMatrix& v) {
  const double norm = v.norm();
  if (norm == 0) return v;
  CMatrix out = v / norm;
  const double significant = 1e-12;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double mag = std::abs(out(0, j));
    if (mag > significant) {
      out *= std::conj(out(0, j)) / mag;
      break;
    }
  }
  return out;
}

double multiset_eig_distance(std::vector<Complex> a, std::vector<Complex> b) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a.size() != b.size()) return inf;
  double worst = 0;
  while (!a.empty()) {
    size_t best_i = 0, best_j = 0;
    double best = inf;
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) {
        const double d = std::abs(a[i] - b[j]);
        if (d < best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    worst = std::max(worst, best);
    a.erase(a.begin() + static_cast<std::ptrdiff_t>(best_i));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return worst;
}

}  // namespace netctrl
