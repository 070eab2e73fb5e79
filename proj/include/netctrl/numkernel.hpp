#pragma once

#include <utility>
#include <vector>

#include "netctrl/types.hpp"

namespace netctrl {

// Matrix exponential e^M by scaling-and-squaring with diagonal Pade
// approximants (degrees 3..13 selected from the 1-norm). Relative accuracy
// is ~1e-13 for ||M|| <= 10.
CMatrix expm(const CMatrix& m);

// Returns the pair (e^{Mh}, J) with J = integral_0^h e^{M tau} dtau. Both
// blocks come out of a single exponential of the augmented matrix
// [[M, I], [0, 0]] scaled by h, so they are mutually consistent.
std::pair<CMatrix, CMatrix> expm_with_integral(const CMatrix& m, double h);

// Kronecker product, dims (rA*rB) x (cA*cB).
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Detail of a tolerance-based rank decision. margin() is the safety factor
// of the decision: how far the decisive singular values sit from the cutoff
// (>= 1 by construction, values near 1 mean a fragile call).
struct RankInfo {
  int rank = 0;
  double cutoff = 0;
  double smallest_kept = 0;    // 0 when rank == 0
  double largest_dropped = 0;  // 0 when nothing was dropped

  double margin() const;
};

// With anchor > 0 the cutoff is rank_rel * max(sigma_max, anchor): rank is
// then measured against the scale the matrix was built from, so a product
// that collapsed to noise does not get ranked against its own noise floor.
RankInfo rank_info(const CMatrix& m, const Tolerance& tol, double anchor = 0);

// Number of singular values above rank_rel * sigma_max; 0 for a zero matrix.
int rank_tol(const CMatrix& m, const Tolerance& tol);

// Raw eigenvalues (length = dimension, repeated per algebraic multiplicity).
std::vector<Complex> eigenvalues(const CMatrix& m);

double spectral_radius(const CMatrix& m);

// Effective clustering radius for eigenvalues of m.
double cluster_radius(const CMatrix& m, const Tolerance& tol);

struct ClusteredEig {
  Complex value;         // mean of the merged raw eigenvalues
  int multiplicity = 0;  // algebraic (cluster size)
};

// Merges raw eigenvalues transitively at the given radius. Output is sorted
// by descending |value|, ties by ascending argument, so downstream reports
// are deterministic.
std::vector<ClusteredEig> cluster_eigenvalues(std::vector<Complex> raw, double radius);

std::vector<ClusteredEig> clustered_eigenvalues(const CMatrix& m, const Tolerance& tol);

struct Eigenpair {
  Complex value;
  std::vector<CMatrix> left_vectors;  // 1xn rows spanning the geometric eigenspace
};

// Left eigen-decomposition: eigenvalues clustered at the effective radius,
// each reported once with a basis of its full geometric left eigenspace
// (null space of (M - lambda I)^T). Every returned v satisfies
// ||v (M - lambda I)|| <= chain_residual * ||v|| * max(1, ||M||).
std::vector<Eigenpair> eig_left(const CMatrix& m, const Tolerance& tol);

// Rows of the left null space of m (v with v m = 0), empty when m has full
// row-dimension rank. Threshold is absolute on the singular values.
std::vector<CMatrix> left_null_space(const CMatrix& m, double threshold);

// Minimum-norm least-squares solution x of the row system x * a = rhs
// (rhs and x are 1xk rows). The achieved residual ||x a - rhs|| is written
// to *residual when given. With absolute_cutoff > 0, singular values of the
// pencil below that absolute level are treated as zero instead of the
// relative rank_rel rule; chain extensions need this so a numerically zero
// pencil is not inverted against its own noise floor.
CMatrix solve_row_lstsq(const CMatrix& a, const CMatrix& rhs, const Tolerance& tol,
                        double* residual = nullptr, double absolute_cutoff = -1);

// Normalizes a row vector to unit norm with its first significant entry
// rotated to the positive real axis; fixes the scaling freedom of
// eigenvectors so test output is deterministic.
CMatrix normalize_row(const CMatrix& v);

// Greedy closest-pair matching distance between two eigenvalue multisets;
// +inf when the sizes differ. Used for the spectrum-union checks.
double multiset_eig_distance(std::vector<Complex> a, std::vector<Complex> b);

}  // namespace netctrl
