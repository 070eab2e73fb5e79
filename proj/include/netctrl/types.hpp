#pragma once

#include <complex>
#include <initializer_list>

#include <Eigen/Dense>

#include "netctrl/errors.hpp"

namespace netctrl {

using Complex = std::complex<double>;

// Dense complex matrix, the universal numeric carrier. Row vectors are 1xn
// matrices. All computation is done in complex arithmetic even for real
// inputs, so the code never branches on real/complex spectra.
using CMatrix = Eigen::MatrixXcd;

// Numeric thresholds for the finite-precision versions of the rank,
// clustering and chain-residual decisions. eig_cluster is a relative factor:
// the effective clustering radius for a matrix M is
// eig_cluster * (1 + spectral_radius(M)).
struct Tolerance {
  double rank_rel = 1e-9;
  double eig_cluster = 1e-7;
  double chain_residual = 1e-8;

  void validate() const {
    if (!(rank_rel > 0) || !(eig_cluster > 0) || !(chain_residual > 0))
      throw ValidationError("tolerance fields must be strictly positive");
    if (!(rank_rel < 1)) throw ValidationError("tolerance.rank_rel must be < 1");
  }
};

// Throws ValidationError naming `what` if any entry is NaN or infinite.
void require_finite(const CMatrix& m, const std::string& what);

// Convenience builders used all over the tests and fixtures.
CMatrix cmat(std::initializer_list<std::initializer_list<Complex>> rows);
CMatrix rmat(std::initializer_list<std::initializer_list<double>> rows);
CMatrix crow(std::initializer_list<Complex> entries);

}  // namespace netctrl
