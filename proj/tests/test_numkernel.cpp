#include "netctrl/numkernel.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "netctrl/analyzer.hpp"
#include "netctrl/sysmodel.hpp"
#include "test_support.hpp"

using namespace netctrl;
using namespace netctrl::testing;

namespace {
const Tolerance kTol;
}

TEST_CASE("expm of the zero matrix is the identity") {
  const CMatrix e = expm(CMatrix::Zero(2, 2));
  CHECK((e - CMatrix::Identity(2, 2)).norm() == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("expm reproduces the lower-triangular node exponential") {
  // exp(0.1 * [[1,0],[1,1]]) = e^{0.1} [[1,0],[0.1,1]]
  const CMatrix e = expm(0.1 * rmat({{1, 0}, {1, 1}}));
  CHECK(std::abs(e(0, 0) - Complex(1.1052, 0)) < 5e-4);
  CHECK(std::abs(e(0, 1)) < 5e-4);
  CHECK(std::abs(e(1, 0) - Complex(0.1105, 0)) < 5e-4);
  CHECK(std::abs(e(1, 1) - Complex(1.1052, 0)) < 5e-4);
  // Exact closed form.
  const double eh = std::exp(0.1);
  CHECK(std::abs(e(0, 0) - Complex(eh, 0)) < 1e-13);
  CHECK(std::abs(e(1, 0) - Complex(0.1 * eh, 0)) < 1e-13);
}

TEST_CASE("expm of the spiral generator at period pi is a negative scalar matrix") {
  const CMatrix e = expm(std::numbers::pi * rmat({{1, 1}, {-1, 1}}));
  CHECK(std::abs(e(0, 0) - Complex(-23.1407, 0)) < 5e-4);
  CHECK(std::abs(e(1, 1) - Complex(-23.1407, 0)) < 5e-4);
  CHECK(std::abs(e(0, 1)) < 5e-4);
  CHECK(std::abs(e(1, 0)) < 5e-4);
  CHECK(std::abs(e(0, 0) - Complex(-std::exp(std::numbers::pi), 0)) < 1e-10);
}

TEST_CASE("expm matches the Taylor-series oracle on random matrices") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix m = random_complex(rng, 4, 4, 1.5);
    CHECK((expm(m) - expm_series(m)).norm() < 1e-11 * (1.0 + expm_series(m).norm()));
  }
}

TEST_CASE("expm inverse property") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix m = random_complex(rng, 4, 4);
    if (m.norm() > 2.0) m *= 2.0 / m.norm();
    const CMatrix prod = expm(m) * expm(-m);
    CHECK((prod - CMatrix::Identity(4, 4)).norm() < 1e-9);
  }
}

TEST_CASE("expm rejects non-square input") {
  CHECK_THROWS_AS(expm(CMatrix::Zero(2, 3)), NonSquare);
}

TEST_CASE("expm_with_integral of the zero generator") {
  auto [e, j] = expm_with_integral(CMatrix::Zero(3, 3), 0.7);
  CHECK((e - CMatrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((j - 0.7 * CMatrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("expm_with_integral reproduces the held input gain of the node example") {
  auto [e, j] = expm_with_integral(rmat({{1, 0}, {1, 1}}), 0.1);
  const CMatrix b = rmat({{1, 0}, {0, 1}});
  const CMatrix bh = j * b;
  CHECK(std::abs(bh(0, 0) - Complex(0.1052, 0)) < 5e-4);
  CHECK(std::abs(bh(1, 0) - Complex(0.0053, 0)) < 5e-4);
  CHECK(std::abs(bh(1, 1) - Complex(0.1052, 0)) < 5e-4);
  CHECK(std::abs(bh(0, 1)) < 5e-4);
}

TEST_CASE("expm_with_integral agrees with the closed form and with quadrature") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix m = random_real(rng, 3, 3);
    m += 0.5 * CMatrix::Identity(3, 3);  // keep it away from singular
    if (std::abs(m.determinant()) < 0.05) continue;
    const double h = 0.3;
    auto [e, j] = expm_with_integral(m, h);
    const CMatrix closed = m.inverse() * (e - CMatrix::Identity(3, 3));
    CHECK((j - closed).norm() < 1e-10);
    const CMatrix quad = integral_expm_quadrature(m, 0, h);
    CHECK((j - quad).norm() < 1e-9);
  }
}

TEST_CASE("expm_with_integral derivative consistency") {
  // d/dh of the integral is e^{Mh}.
  std::mt19937 rng(14);
  const CMatrix m = random_real(rng, 3, 3);
  const double h = 0.4, step = 1e-6;
  auto [e, j] = expm_with_integral(m, h);
  auto [e2, j_hi] = expm_with_integral(m, h + step);
  auto [e3, j_lo] = expm_with_integral(m, h - step);
  const CMatrix derivative = (j_hi - j_lo) / (2 * step);
  CHECK((derivative - e).norm() < 1e-4);
}

TEST_CASE("expm_with_integral rejects a non-positive period") {
  CHECK_THROWS_AS(expm_with_integral(CMatrix::Zero(2, 2), 0.0), NonPositivePeriod);
  CHECK_THROWS_AS(expm_with_integral(CMatrix::Zero(2, 2), -1.0), NonPositivePeriod);
}

TEST_CASE("rank_tol basics") {
  CHECK(rank_tol(CMatrix::Identity(3, 3), kTol) == 3);
  CHECK(rank_tol(rmat({{1, 2}, {2, 4}}), kTol) == 1);
  CHECK(rank_tol(CMatrix::Zero(2, 5), kTol) == 0);
}

TEST_CASE("rank_tol of the sampled pencil of the two-node chain fixture") {
  // rank [theta I - Phi_s, Psi_s] = 4 at the (only) eigenvalue theta = e^{0.1}.
  const SampledSystem ss = discretize(fixtures::s1());
  const double theta = std::exp(0.1);
  CMatrix pencil(4, 8);
  pencil.leftCols(4) = theta * CMatrix::Identity(4, 4) - ss.state_transition;
  pencil.rightCols(4) = ss.input_map;
  CHECK(rank_tol(pencil, kTol) == 4);
}

TEST_CASE("rank_tol is invariant under unitary factors") {
  std::mt19937 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix m = random_complex(rng, 4, 6);
    m.row(3) = m.row(0) + m.row(1);  // force rank 3
    const CMatrix u = random_unitary(rng, 4);
    const CMatrix v = random_unitary(rng, 6);
    CHECK(rank_tol(m, kTol) == 3);
    CHECK(rank_tol(u * m * v, kTol) == 3);
  }
}

TEST_CASE("rank_info margins flag fragile decisions") {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = 1e-3;
  const RankInfo info = rank_info(m, kTol);
  CHECK(info.rank == 2);
  CHECK(info.margin() == doctest::Approx(1e-3 / 1e-9));
}

TEST_CASE("kron of identities and fixture block structure") {
  CHECK((kron(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)) - CMatrix::Identity(6, 6)).norm() ==
        0);

  // W (x) coupling_hold is the lower-left quarter of the fixture's state
  // transition matrix.
  const SampledSystem ss = discretize(fixtures::s1());
  const CMatrix w = rmat({{0, 0}, {1, 0}});
  const CMatrix k = kron(w, ss.coupling_hold);
  CHECK(std::abs(k(2, 0) - Complex(0.1052, 0)) < 5e-4);
  CHECK(std::abs(k(3, 0) - Complex(0.0053, 0)) < 5e-4);
  CHECK(k.topRows(2).norm() == 0);
  CHECK((ss.state_transition - kron(CMatrix::Identity(2, 2), ss.node_transition) - k).norm() <
        1e-14);
}

TEST_CASE("kron mixed-product and transpose properties") {
  std::mt19937 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = random_complex(rng, 2, 2), b = random_complex(rng, 2, 2);
    const CMatrix c = random_complex(rng, 2, 2), d = random_complex(rng, 2, 2);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
    CHECK((kron(a, b).transpose() - kron(a.transpose(), b.transpose())).norm() < 1e-12);
  }
}

TEST_CASE("eig_left on a diagonal matrix") {
  const auto pairs = eig_left(rmat({{2, 0}, {0, 3}}), kTol);
  REQUIRE(pairs.size() == 2);
  CHECK(std::abs(pairs[0].value - Complex(3, 0)) < 1e-12);
  CHECK(std::abs(pairs[1].value - Complex(2, 0)) < 1e-12);
  CHECK(std::abs(pairs[0].left_vectors[0](0, 1) - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(pairs[1].left_vectors[0](0, 0) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("eig_left matches the cycle closed form") {
  CMatrix w = CMatrix::Zero(3, 3);
  w(0, 2) = 1;
  w(1, 0) = 1;
  w(2, 1) = 1;
  const auto pairs = eig_left(w, kTol);
  REQUIRE(pairs.size() == 3);
  std::vector<Complex> got;
  for (const auto& p : pairs) got.push_back(p.value);
  const std::vector<Complex> expected = circle_eigenvalues(w, kTol);
  CHECK(multiset_eig_distance(got, expected) < 1e-8);
}

TEST_CASE("eig_left of the two-node exchange") {
  const auto pairs = eig_left(rmat({{0, 1}, {1, 0}}), kTol);
  REQUIRE(pairs.size() == 2);
  CHECK(std::abs(pairs[0].value - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(pairs[1].value - Complex(-1, 0)) < 1e-12);
  // Eigenvectors span (1,1) and (1,-1).
  const CMatrix v1 = pairs[0].left_vectors[0];
  const CMatrix v2 = pairs[1].left_vectors[0];
  CHECK(std::abs(v1(0, 0) - v1(0, 1)) < 1e-10);
  CHECK(std::abs(v2(0, 0) + v2(0, 1)) < 1e-10);
}

TEST_CASE("eig_left residuals and multiplicity bound") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const CMatrix m = random_complex(rng, 4, 4, 2.0);
    int geometric_total = 0;
    for (const auto& p : eig_left(m, kTol)) {
      geometric_total += static_cast<int>(p.left_vectors.size());
      for (const CMatrix& v : p.left_vectors) {
        const double res = (v * m - p.value * v).norm();
        CHECK(res <= kTol.chain_residual * v.norm() * std::max(1.0, m.norm()));
      }
    }
    CHECK(geometric_total <= 4);
  }
}

TEST_CASE("normalize_row fixes scale and phase") {
  const CMatrix v = crow({Complex(0, 2), Complex(2, 0)});
  const CMatrix n = normalize_row(v);
  CHECK(n.norm() == doctest::Approx(1.0));
  CHECK(n(0, 0).real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(std::abs(n(0, 0).imag()) < 1e-14);
}

TEST_CASE("cluster_eigenvalues merges close values and orders deterministically") {
  const auto clusters =
      cluster_eigenvalues({Complex(1, 0), Complex(1 + 1e-9, 0), Complex(-1, 0)}, 1e-7);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].multiplicity == 2);  // |1| ties |-1|, argument 0 sorts first
  CHECK(std::abs(clusters[0].value - Complex(1 + 5e-10, 0)) < 1e-12);
  CHECK(clusters[1].multiplicity == 1);
}
