#pragma once

#include <vector>

#include "netctrl/numkernel.hpp"
#include "netctrl/types.hpp"

namespace netctrl {

// Left Jordan chain of a matrix about an eigenvalue: vectors[0] is the top
// vector v^1 (an ordinary left eigenvector), and v^m (A - lambda I) = v^{m-1}
// for m >= 2. The chain scale is fixed by normalize_row on the top vector;
// the remaining additive freedom is fixed by minimum-norm extension, so two
// runs produce identical chains.
struct JordanChain {
  Complex eigenvalue;
  std::vector<CMatrix> vectors;

  int length() const { return static_cast<int>(vectors.size()); }
};

// All chains of one distinct eigenvalue.
struct JordanBlockGroup {
  Complex eigenvalue;
  std::vector<JordanChain> chains;  // sorted by descending length

  int algebraic_multiplicity() const;
};

struct JordanStructure {
  int matrix_dim = 0;
  std::vector<JordanBlockGroup> blocks;  // sorted by descending |lambda|, ties by ascending arg
  CMatrix transform;    // T with T W T^{-1} = J; rows are chain vectors bottom-to-top
  CMatrix jordan_form;  // J, block upper bidiagonal
  double condition = 0;  // 2-norm condition number of T
};

// Full left-Jordan decomposition of a (small) square matrix. Eigenvalues are
// merged at the effective cluster radius first; the chain skeleton is found
// from the null spaces of powers of (W - lambda I)^T and then rebuilt bottom-up
// with minimum-norm extensions for determinism. Throws IllConditioned when
// cond(T) > 1e12, i.e. when the structure is numerically ambiguous.
JordanStructure jordan_structure(const CMatrix& w, const Tolerance& tol);

// Generalized left Jordan chain of E about the coupling Hc: the top vector is
// a left eigenvector of E at theta and successive vectors solve
// xi^j (theta I - E) = xi^{j-1} Hc. Extensions can keep solving indefinitely
// (the right-hand side may never leave the pencil's row space), so growth is
// bounded by max_len; `saturated` records that the chain stopped because the
// next extension has no solution, i.e. the length is the true maximum.
struct GeneralizedJordanChain {
  Complex eigenvalue;
  std::vector<CMatrix> vectors;
  CMatrix coupling;
  bool saturated = false;

  int length() const { return static_cast<int>(vectors.size()); }
};

// Builds the chain atop `top` by minimum-norm least squares, accepting an
// extension only when its residual passes the chain_residual bound.
// Throws NotAnEigenvector when `top` fails its own residual test.
GeneralizedJordanChain generalized_chain(const CMatrix& e, const CMatrix& hc, Complex theta,
                                         const CMatrix& top, const Tolerance& tol, int max_len);

// Residual scale used by the chain acceptance tests:
// chain_residual * max(1, ||E||, ||Hc||).
double chain_residual_scale(const CMatrix& e, const CMatrix& hc, const Tolerance& tol);

}  // namespace netctrl
