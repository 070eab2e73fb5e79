#include "netctrl/oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace netctrl;
using namespace netctrl::testing;

namespace {
const Tolerance kTol;
}

TEST_CASE("kalman_rank on the controllable chain fixture") {
  const SampledSystem ss = discretize(fixtures::s1());
  const auto verdict = oracle::kalman_rank(ss.state_transition, ss.input_map, kTol);
  CHECK(verdict.reachable);
  CHECK(verdict.rank == 4);
  CHECK(verdict.dim == 4);
  CHECK(verdict.controllable_to_origin);
  CHECK(verdict.deficient_eigenvalues.empty());
}

TEST_CASE("kalman_rank convicts the deficient fixture at the node eigenvalue") {
  const SampledSystem ss = discretize(fixtures::s4());
  const auto verdict = oracle::kalman_rank(ss.state_transition, ss.input_map, kTol);
  CHECK_FALSE(verdict.reachable);
  CHECK(verdict.rank < 4);
  REQUIRE(verdict.deficient_eigenvalues.size() >= 1);
  CHECK(std::abs(verdict.deficient_eigenvalues[0] - Complex(1.1052, 0)) < 5e-4);
}

TEST_CASE("kalman_rank with a dead input map") {
  const CMatrix phi = rmat({{2, 0}, {0, 3}});
  const auto verdict = oracle::kalman_rank(phi, CMatrix::Zero(2, 1), kTol);
  CHECK(verdict.rank == 0);
  CHECK_FALSE(verdict.reachable);
  CHECK_FALSE(verdict.controllable_to_origin);  // nonsingular free motion never dies
}

TEST_CASE("kalman_rank treats nilpotent free motion as controllable to the origin") {
  const CMatrix phi = rmat({{0, 1}, {0, 0}});
  const auto verdict = oracle::kalman_rank(phi, CMatrix::Zero(2, 1), kTol);
  CHECK_FALSE(verdict.reachable);
  CHECK(verdict.controllable_to_origin);
}

TEST_CASE("kalman_rank dimension checks") {
  CHECK_THROWS_AS(oracle::kalman_rank(CMatrix::Zero(2, 3), CMatrix::Zero(2, 1), kTol),
                  DimensionMismatch);
  CHECK_THROWS_AS(oracle::kalman_rank(CMatrix::Zero(2, 2), CMatrix::Zero(3, 1), kTol),
                  DimensionMismatch);
}

TEST_CASE("steer reaches random targets of the controllable fixture") {
  const SampledSystem ss = discretize(fixtures::s1());
  std::mt19937 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix target = random_real(rng, 4, 1, 2.0);
    const auto result = oracle::steer(ss, CMatrix::Zero(4, 1), target, 4, kTol);
    CHECK(result.residual <= 1e-8 * target.norm());
    CHECK(result.inputs.size() == 4);
    // Replay the inputs through the recursion.
    CMatrix x = CMatrix::Zero(4, 1);
    for (const CMatrix& u : result.inputs) x = ss.state_transition * x + ss.input_map * u;
    CHECK((x - target).norm() <= 1e-7 * (1.0 + target.norm()));
  }
}

TEST_CASE("steer residual is bounded below by the projection distance off the reachable span") {
  const SampledSystem ss = discretize(fixtures::s4());
  const CMatrix target = rmat({{0}, {0}, {1}, {0}});
  const auto result = oracle::steer(ss, CMatrix::Zero(4, 1), target, 8, kTol);
  CHECK(result.residual > 0.1);

  // Projector from the Kalman basis.
  CMatrix reach(4, 16);
  CMatrix block = ss.input_map;
  for (int k = 0; k < 4; ++k) {
    reach.middleCols(4 * k, 4) = block;
    block = ss.state_transition * block;
  }
  Eigen::JacobiSVD<CMatrix> svd(reach, Eigen::ComputeFullU);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
  const CMatrix basis = svd.matrixU().leftCols(rank);
  const CMatrix off_span = target - basis * (basis.adjoint() * target);
  CHECK(result.residual >= off_span.norm() - 1e-9);
}

TEST_CASE("steer returns zero inputs for free motion") {
  const SampledSystem ss = discretize(fixtures::s1());
  const CMatrix x0 = rmat({{1}, {-1}, {0.5}, {2}});
  CMatrix target = x0;
  for (int k = 0; k < 3; ++k) target = ss.state_transition * target;
  const auto result = oracle::steer(ss, x0, target, 3, kTol);
  CHECK(result.residual < 1e-10);
  for (const CMatrix& u : result.inputs) CHECK(u.norm() < 1e-10);
}

TEST_CASE("steer residual is non-increasing in the horizon") {
  const SampledSystem ss = discretize(fixtures::s4());
  const CMatrix target = rmat({{0.3}, {-0.7}, {1}, {0.2}});
  double previous = std::numeric_limits<double>::infinity();
  for (int steps : {1, 2, 4, 6, 8}) {
    const auto result = oracle::steer(ss, CMatrix::Zero(4, 1), target, steps, kTol);
    CHECK(result.residual <= previous + 1e-12);
    previous = result.residual;
  }
}

TEST_CASE("scan_periods flags the pathological grid point of the spiral fixture") {
  const auto rows = oracle::scan_periods(fixtures::s3(), 0.5 * std::numbers::pi,
                                         1.5 * std::numbers::pi, 11, kTol);
  REQUIRE(rows.size() == 11);
  for (size_t i = 0; i < rows.size(); ++i) {
    const bool at_pi = std::abs(rows[i].h - std::numbers::pi) < 1e-12;
    CHECK(rows[i].pathological_node == at_pi);
  }
  CHECK(rows[5].pathological_node);
}

TEST_CASE("scan_periods of a scalar system is constant across the grid") {
  NetworkedSystem sys;
  sys.node.A = rmat({{0.8}});
  sys.node.B = rmat({{1}});
  sys.node.C = rmat({{1}});
  sys.node.H = rmat({{1}});
  sys.topo.W = rmat({{0, 0}, {1, 0}});
  sys.topo.delta = {1, 0};
  sys.h = 0.1;
  const auto rows = oracle::scan_periods(sys, 0.05, 2.0, 10, kTol);
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows) {
    CHECK(row.verdict == rows.front().verdict);
    CHECK_FALSE(row.pathological_node);
  }
}

TEST_CASE("scan_periods accepts a single-point grid") {
  const auto rows = oracle::scan_periods(fixtures::s1(), 0.1, 0.1, 1, kTol);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].h == doctest::Approx(0.1));
  CHECK(rows[0].verdict == Verdict::Controllable);
}

TEST_CASE("scan_periods output is deterministic") {
  const auto a = oracle::scan_periods(fixtures::s1(), 0.05, 0.5, 5, kTol);
  const auto b = oracle::scan_periods(fixtures::s1(), 0.05, 0.5, 5, kTol);
  CHECK(oracle::scan_csv(a) == oracle::scan_csv(b));
}

TEST_CASE("scan_csv format") {
  const auto rows = oracle::scan_periods(fixtures::s1(), 0.1, 0.2, 2, kTol);
  const std::string csv = oracle::scan_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "h,verdict,criterion,pathological_node");
  std::getline(in, line);
  CHECK(line.find("0.1,Controllable,") == 0);
  CHECK(line.find(",false") != std::string::npos);
  int count = 1;
  while (std::getline(in, line))
    if (!line.empty()) ++count;
  CHECK(count == 2);
}

TEST_CASE("scan_periods validates its grid") {
  CHECK_THROWS_AS(oracle::scan_periods(fixtures::s1(), -1.0, 1.0, 3, kTol), ValidationError);
  CHECK_THROWS_AS(oracle::scan_periods(fixtures::s1(), 0.5, 0.1, 3, kTol), ValidationError);
  CHECK_THROWS_AS(oracle::scan_periods(fixtures::s1(), 0.1, 0.5, 0, kTol), ValidationError);
}
