#include "netctrl/types.hpp"

#include <cmath>

namespace netctrl {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonPositivePeriod: return "NonPositivePeriod";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotAnEigenvector: return "NotAnEigenvector";
    case ErrorCode::UnknownEigenvalue: return "UnknownEigenvalue";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Error";
}

void require_finite(const CMatrix& m, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex& z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError(what + "[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] is not finite");
    }
}

CMatrix cmat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  CMatrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw DimensionMismatch("ragged initializer for cmat");
    Eigen::Index j = 0;
    for (const Complex& z : row) m(i, j++) = z;
    ++i;
  }
  return m;
}

CMatrix rmat(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  CMatrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw DimensionMismatch("ragged initializer for rmat");
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = Complex(x, 0);
    ++i;
  }
  return m;
}

CMatrix crow(std::initializer_list<Complex> entries) {
  CMatrix m(1, static_cast<Eigen::Index>(entries.size()));
  Eigen::Index j = 0;
  for (const Complex& z : entries) m(0, j++) = z;
  return m;
}

}  // namespace netctrl
