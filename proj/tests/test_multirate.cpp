#include "netctrl/multirate.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "netctrl/oracle.hpp"
#include "test_support.hpp"

using namespace netctrl;
using namespace netctrl::testing;

namespace {

const Tolerance kTol;

MultiRateSpec tms(const NetworkedSystem& sys, int l) { return {sys, MultiRateKind::TMS, l}; }
MultiRateSpec cms(const NetworkedSystem& sys, int l) { return {sys, MultiRateKind::CMS, l}; }

// Simulate l base steps of the sampled recursion with the input held.
CMatrix simulate_held(const SampledSystem& ss, const CMatrix& x0, const CMatrix& u, int l) {
  CMatrix x = x0;
  for (int k = 0; k < l; ++k) x = ss.state_transition * x + ss.input_map * u;
  return x;
}

}  // namespace

TEST_CASE("lift_tms at l = 1 is the single-rate system, bit for bit") {
  const LiftedSystem lifted = lift_tms(tms(fixtures::s1(), 1));
  CHECK((lifted.phi - lifted.base_sampled.state_transition).norm() == 0);
  CHECK((lifted.psi - lifted.base_sampled.input_map).norm() == 0);
  CHECK(lifted.period == doctest::Approx(0.1));
}

TEST_CASE("lift_tms at l = 2 matches the algebraic form and a two-step simulation") {
  const LiftedSystem lifted = lift_tms(tms(fixtures::s1(), 2));
  const CMatrix& phi_s = lifted.base_sampled.state_transition;
  const CMatrix& psi_s = lifted.base_sampled.input_map;
  CHECK((lifted.phi - phi_s * phi_s).norm() < 1e-13);
  CHECK((lifted.psi - (phi_s + CMatrix::Identity(4, 4)) * psi_s).norm() < 1e-13);

  std::mt19937 rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix x0 = random_real(rng, 4, 1);
    const CMatrix u = random_real(rng, 4, 1);
    const CMatrix direct = simulate_held(lifted.base_sampled, x0, u, 2);
    const CMatrix one_shot = lifted.phi * x0 + lifted.psi * u;
    CHECK((direct - one_shot).norm() < 1e-12);
  }
}

TEST_CASE("TMS lift reproduces held-input simulation on random systems") {
  std::mt19937 rng(52);
  for (int trial = 0; trial < 12; ++trial) {
    const NetworkedSystem sys = random_system(rng, 2 + trial % 2, 1 + trial % 2, 1, 0.3);
    const int l = 2 + trial % 3;
    const LiftedSystem lifted = lift_tms(tms(sys, l));
    const Eigen::Index d = lifted.phi.rows();
    const CMatrix x0 = random_real(rng, static_cast<int>(d), 1);
    const CMatrix u = random_real(rng, static_cast<int>(lifted.psi.cols()), 1);
    const CMatrix direct = simulate_held(lifted.base_sampled, x0, u, l);
    const CMatrix one_shot = lifted.phi * x0 + lifted.psi * u;
    CHECK((direct - one_shot).norm() < 1e-9 * (1.0 + direct.norm()));
  }
}

TEST_CASE("geometric sum matches direct polynomial evaluation") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const NetworkedSystem sys = random_system(rng, 2, 2, 1, 0.2);
    const int l = 2 + trial % 3;
    const LiftedSystem lifted = lift_tms(tms(sys, l));
    const CMatrix& phi_s = lifted.base_sampled.state_transition;
    CMatrix sum = CMatrix::Zero(4, 4);
    CMatrix power = CMatrix::Identity(4, 4);
    for (int c = 0; c < l; ++c) {
      sum += power;
      power = power * phi_s;
    }
    CHECK((lifted.psi - sum * lifted.base_sampled.input_map).norm() < 1e-11);
    CHECK((lifted.phi - power).norm() < 1e-11);
  }
}

TEST_CASE("tms_spectrum maps and clusters eigenvalue powers") {
  const NetworkedSystem sys = fixtures::s1();
  const SampledSystem ss = discretize(sys);
  const SubsystemFamily fam = decompose(ss, sys.topo, kTol);

  const TmsSpectrum identity = tms_spectrum(fam, 1);
  for (const auto& [base, lifted] : identity.mapping) CHECK(std::abs(base - lifted) < 1e-15);

  const TmsSpectrum cubed = tms_spectrum(fam, 3);
  REQUIRE(cubed.mapping.size() == 1);
  CHECK(std::abs(cubed.mapping[0].second - Complex(1.3498, 0)) < 5e-4);
  // Cross-check against the eigenvalues of the cubed state transition.
  const CMatrix phi3 = ss.state_transition * ss.state_transition * ss.state_transition;
  std::vector<Complex> lifted_values;
  for (const auto& [base, lifted] : cubed.mapping)
    for (int rep = 0; rep < 4; ++rep) lifted_values.push_back(lifted);  // multiplicity 4
  CHECK(multiset_eig_distance(lifted_values, eigenvalues(phi3)) < 1e-6);
}

TEST_CASE("tms_spectrum flags sign collisions under squaring") {
  // Spectrum {r, -r} collides at r^2 when l = 2.
  NetworkedSystem sys = fixtures::s2();  // lambda = +-1 with distinct subsystems
  const SubsystemFamily fam = decompose(discretize(sys), sys.topo, kTol);
  const TmsSpectrum squared = tms_spectrum(fam, 2);
  // sigma(E1) = {1.2103, 1.1052}, sigma(E2) = {1.0, 1.1052}: the shared
  // 1.1052 collides with itself across entries.
  bool found_collision = false;
  for (const auto& group : squared.collision_groups)
    if (group.size() > 1) found_collision = true;
  CHECK(found_collision);
}

TEST_CASE("check_tms clears the chain fixture at l = 2 and the oracle agrees") {
  const AnalysisReport report = check_tms(tms(fixtures::s1(), 2), kTol);
  CHECK(report.verdict == Verdict::Controllable);
  const LiftedSystem lifted = lift_tms(tms(fixtures::s1(), 2));
  CHECK(oracle::kalman_rank(lifted.phi, lifted.psi, kTol).reachable);
}

TEST_CASE("check_tms catches a vanishing geometric sum") {
  // A rotation node sampled at pi has the single eigenvalue -1; at l = 2 the
  // geometric sum 1 + (-1) is exactly zero.
  NetworkedSystem sys;
  sys.node.A = rmat({{0, 1}, {-1, 0}});
  sys.node.B = CMatrix::Identity(2, 2);
  sys.node.C = CMatrix::Identity(2, 2);
  sys.node.H = CMatrix::Identity(2, 2);
  sys.topo.W = CMatrix::Zero(1, 1);
  sys.topo.delta = {1};
  sys.h = std::numbers::pi;
  const AnalysisReport report = check_tms(tms(sys, 2), kTol);
  CHECK(report.verdict == Verdict::Inconclusive);
  CHECK(std::abs(report.evidence["theta"][0].get<double>() - (-1.0)) < 1e-9);

  // The fallback convicts it: the lifted input map is exactly zero.
  const AnalysisReport full = analyze_multirate(tms(sys, 2), kTol);
  CHECK(full.verdict == Verdict::Uncontrollable);
  CHECK(full.criterion == "tms_oracle");
}

TEST_CASE("check_tms at l = 1 reduces to the general eigenvector test") {
  for (const char* name : {"s1", "s2", "s3"}) {
    const NetworkedSystem sys = fixtures::by_name(name);
    const SampledSystem ss = discretize(sys);
    const SubsystemFamily fam = decompose(ss, sys.topo, kTol);
    CHECK(check_tms(tms(sys, 1), kTol).verdict == check_sufficient_general(ss, fam, kTol).verdict);
  }
}

TEST_CASE("lift_cms at l = 1 is the single-rate system, bit for bit") {
  const LiftedSystem lifted = lift_cms(cms(fixtures::s1(), 1));
  CHECK((lifted.phi - lifted.base_sampled.state_transition).norm() == 0);
  CHECK((lifted.psi - lifted.base_sampled.input_map).norm() == 0);
}

TEST_CASE("lift_cms discretizes the transmission at l h and stacks held input blocks") {
  const LiftedSystem lifted = lift_cms(cms(fixtures::s1(), 2));
  NetworkedSystem slow = fixtures::s1();
  slow.h = 0.2;
  const SampledSystem at_lh = discretize(slow);
  CHECK((lifted.phi - at_lh.state_transition).norm() < 1e-10);
  REQUIRE(lifted.psi.rows() == 4);
  REQUIRE(lifted.psi.cols() == 8);
  // Rightmost block is Delta (x) B(h) exactly.
  const SampledSystem base = discretize(fixtures::s1());
  CHECK((lifted.psi.rightCols(4) - base.input_map).norm() == 0);
  // Leftmost block is Delta (x) e^{Ah} B(h).
  const CMatrix expected =
      kron(fixtures::s1().topo.delta_matrix(), base.node_transition * base.input_hold);
  CHECK((lifted.psi.leftCols(4) - expected).norm() < 1e-13);
}

TEST_CASE("check_cms on the chain fixture agrees with the oracle") {
  const AnalysisReport report = check_cms(cms(fixtures::s1(), 2), kTol);
  const LiftedSystem lifted = lift_cms(cms(fixtures::s1(), 2));
  const bool reachable = oracle::kalman_rank(lifted.phi, lifted.psi, kTol).reachable;
  if (report.verdict != Verdict::Inconclusive)
    CHECK((report.verdict == Verdict::Controllable) == reachable);
  else
    CHECK(analyze_multirate(cms(fixtures::s1(), 2), kTol).verdict ==
          (reachable ? Verdict::Controllable : Verdict::Uncontrollable));
}

TEST_CASE("check_cms flags the pathological base of the spiral fixture") {
  const AnalysisReport report = check_cms(cms(fixtures::s3(), 2), kTol);
  CHECK(std::find(report.flags.begin(), report.flags.end(),
                  "pathological_node_sampling_base_period") != report.flags.end());
  // At transmission period 2 pi the node transition is again a scalar matrix.
  NetworkedSystem slow = fixtures::s3();
  slow.h = 2 * std::numbers::pi;
  const SampledSystem at_lh = discretize(slow);
  CHECK((at_lh.node_transition - std::exp(2 * std::numbers::pi) * CMatrix::Identity(2, 2)).norm() <
        1e-6);
  // Verdict against the oracle on the lifted pair.
  const AnalysisReport full = analyze_multirate(cms(fixtures::s3(), 2), kTol);
  const LiftedSystem lifted = lift_cms(cms(fixtures::s3(), 2));
  const bool reachable = oracle::kalman_rank(lifted.phi, lifted.psi, kTol).reachable;
  CHECK((full.verdict == Verdict::Controllable) == reachable);
}

TEST_CASE("check_cms with full drivers and identity input is always controllable") {
  NetworkedSystem sys = fixtures::s1();
  sys.topo.delta = {1, 1};
  for (int l : {1, 2, 3}) {
    const AnalysisReport report = check_cms(cms(sys, l), kTol);
    CHECK(report.verdict == Verdict::Controllable);
  }
}

TEST_CASE("TMS spectral mapping property") {
  std::mt19937 rng(54);
  for (int trial = 0; trial < 12; ++trial) {
    const NetworkedSystem sys = random_system(rng, 2 + trial % 2, 1 + trial % 2, 1, 0.4);
    const int l = 2 + trial % 3;
    const LiftedSystem lifted = lift_tms(tms(sys, l));
    std::vector<Complex> powered;
    for (const Complex& z : eigenvalues(lifted.base_sampled.state_transition))
      powered.push_back(std::pow(z, l));
    const double scale = 1.0 + spectral_radius(lifted.phi);
    CHECK(multiset_eig_distance(powered, eigenvalues(lifted.phi)) < 1e-6 * scale);
  }
}

TEST_CASE("multirate sufficient verdicts are confirmed by the oracle on random systems") {
  std::mt19937 rng(55);
  int confirmed = 0;
  for (int trial = 0; trial < 120 && confirmed < 50; ++trial) {
    const NetworkedSystem sys = random_system(rng, 2 + trial % 2, 1 + trial % 2, 1 + trial % 2, 0.3);
    const int l = 1 + trial % 3;
    const MultiRateSpec spec{sys, trial % 2 == 0 ? MultiRateKind::TMS : MultiRateKind::CMS, l};
    AnalysisReport report;
    try {
      report = spec.kind == MultiRateKind::TMS ? check_tms(spec, kTol) : check_cms(spec, kTol);
    } catch (const IllConditioned&) {
      continue;
    }
    if (report.verdict != Verdict::Controllable) continue;
    const LiftedSystem lifted =
        spec.kind == MultiRateKind::TMS ? lift_tms(spec) : lift_cms(spec);
    if (!oracle_decisive(lifted.phi, lifted.psi)) continue;
    CHECK(oracle::kalman_rank(lifted.phi, lifted.psi, kTol).reachable);
    ++confirmed;
  }
  CHECK(confirmed >= 50);
}

TEST_CASE("analyze_multirate reports kind, ratio and period") {
  const AnalysisReport report = analyze_multirate(tms(fixtures::s1(), 2), kTol);
  CHECK(report.evidence["kind"] == "TMS");
  CHECK(report.evidence["l"] == 2);
  CHECK(report.evidence["period"] == doctest::Approx(0.2));
}
