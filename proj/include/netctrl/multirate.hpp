#pragma once

#include <utility>
#include <vector>

#include "netctrl/analyzer.hpp"
#include "netctrl/sysmodel.hpp"

namespace netctrl {

struct MultiRateSpec {
  NetworkedSystem base;
  MultiRateKind kind = MultiRateKind::TMS;
  int l = 1;
};

// Single-period form of a multi-rate system. For TMS (control period l*h)
// the lift is phi = Phi_s^l, psi = (Phi_s^{l-1} + ... + I) Psi_s; for CMS
// (transmission period l*h) phi is the plain discretization at l*h and psi
// stacks the l held input blocks Delta (x) e^{A(l-1-r)h} B(h).
struct LiftedSystem {
  CMatrix phi;
  CMatrix psi;
  MultiRateKind kind = MultiRateKind::TMS;
  int l = 1;
  double period = 0;  // l * h
  SampledSystem base_sampled;
};

LiftedSystem lift_tms(const MultiRateSpec& spec);
LiftedSystem lift_cms(const MultiRateSpec& spec);

// Spectral map theta -> theta^l of the base subsystem spectra, with the
// lifted values clustered so that collisions (distinct base eigenvalues
// landing on one lifted eigenvalue) are grouped for the direct-sum rule.
struct TmsSpectrum {
  std::vector<std::pair<Complex, Complex>> mapping;  // (theta_base, theta_lifted)
  std::vector<std::vector<int>> collision_groups;    // indices into mapping, size >= 1 each
};

TmsSpectrum tms_spectrum(const SubsystemFamily& fam, int l);

// TMS sufficient test: (1) no base eigenvalue zeroes the geometric sum
// sum_{c<l} theta^c, (2) no vector of any lifted eigenspace (direct sums at
// collisions) annihilates Delta (x) B(h).
AnalysisReport check_tms(const MultiRateSpec& spec, const Tolerance& tol);

// CMS sufficient test: the subsystem family at period l*h against the
// widened input map, upgraded to necessary when the lifted state transition
// matrix is nonsingular.
AnalysisReport check_cms(const MultiRateSpec& spec, const Tolerance& tol);

// check_tms / check_cms with the brute-force fallback on the lifted pair and
// the oracle cross-check on definite verdicts.
AnalysisReport analyze_multirate(const MultiRateSpec& spec, const Tolerance& tol);

}  // namespace netctrl
