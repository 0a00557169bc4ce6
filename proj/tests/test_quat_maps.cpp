#include <random>

#include "doctest.h"
#include "hkt/nnls.hpp"
#include "hkt/quat_maps.hpp"

using namespace hkt;

namespace {
constexpr cdouble I{0.0, 1.0};
}

TEST_CASE("R fixes (k,0)-forms") {
  std::mt19937_64 rng(41);
  for (int k : {1, 2, 3}) {
    FiberForm eta = random_bidegree_form(2, k, 0, rng);
    CHECK((R_map(eta) - eta).norm() < 1e-11 * eta.norm());
  }
}

TEST_CASE("psi composed with R reproduces the plus projection") {
  std::mt19937_64 rng(43);
  const FiberContext& ctx = FiberContext::get(2);
  for (auto [p, q] : {std::pair{1, 1}, {2, 1}, {2, 2}, {0, 2}}) {
    FiberForm eta = random_bidegree_form(2, p, q, rng);
    FiberForm r = R_map(eta);
    Eigen::VectorXcd lam(ctx.block(p + q, 0).size());
    const auto& hol = ctx.block(p + q, 0);
    for (size_t i = 0; i < hol.size(); ++i) lam[i] = r.coeffs[hol[i]];
    Eigen::VectorXcd rebuilt = ctx.psi(p, q) * lam;
    Eigen::VectorXcd plus = ctx.plus_projector(p + q) * eta.coeffs;
    CHECK((rebuilt - plus).norm() < 1e-10 * eta.norm());
  }
}

TEST_CASE("R sends omega_I to -sqrt(-1) Omega_0") {
  for (int n : {1, 2}) {
    const HypercomplexStructure H = standard_structure(n);
    OmegaForms w = omega_forms(H);
    FiberForm expect = hkt_fiber(H);
    expect *= -I;
    CHECK((R_map(w.omega_I) - expect).norm() < 1e-11);
  }
}

TEST_CASE("R is multiplicative") {
  std::mt19937_64 rng(47);
  const int n = 2;
  FiberForm a = random_bidegree_form(n, 1, 1, rng);
  FiberForm b = random_bidegree_form(n, 1, 1, rng);
  FiberForm lhs = R_map(wedge(a, b));
  FiberForm rhs = wedge(R_map(a), R_map(b));
  CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));

  FiberForm c = random_bidegree_form(n, 1, 0, rng);
  FiberForm d = random_bidegree_form(n, 0, 1, rng);
  CHECK((R_map(wedge(c, d)) - wedge(R_map(c), R_map(d))).norm() < 1e-10);
}

TEST_CASE("R intertwines conjugation with the twisted conjugate") {
  std::mt19937_64 rng(53);
  for (auto [p, q] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    FiberForm eta = random_bidegree_form(2, p, q, rng);
    CHECK(R_conjugation_residual(eta) < 1e-10 * eta.norm());
  }
}

TEST_CASE("orientation and the top coefficient") {
  // omega_I^{2n} / (2n)! is the unit volume of the flat metric
  for (int n : {1, 2}) {
    OmegaForms w = omega_forms(standard_structure(n));
    FiberForm vol = unit_scalar(n);
    double fact = 1.0;
    for (int k = 1; k <= 2 * n; ++k) {
      vol = wedge(vol, w.omega_I);
      fact *= k;
    }
    CHECK(std::abs(top_coefficient(vol) / fact - 1.0) < 1e-11);
  }
}

TEST_CASE("Theta is q-real with unit coefficient against itself") {
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    CHECK(pure_bidegree(theta.form) == std::make_pair(2 * n, 0));
    CHECK(check_q_real(theta.form));
    CHECK(std::abs(coefficient_vs_theta(theta.form, theta) - 1.0) < 1e-13);
  }
}

TEST_CASE("V satisfies its defining duality") {
  std::mt19937_64 rng(59);
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    for (int p = 0; p <= n; ++p) {
      FiberForm eta = random_bidegree_form(n, 2 * p, 0, rng);
      FiberForm xi = random_bidegree_form(n, n - p, n - p, rng);
      FiberForm lhs = wedge(V_map(eta, theta), xi);
      FiberForm rhs = wedge(wedge(eta, R_map(xi)), conj_form(theta.form));
      CHECK(std::abs(lhs.coeffs[0] - rhs.coeffs[0]) <
            1e-10 * (1.0 + std::abs(rhs.coeffs[0])));
    }
  }
}

TEST_CASE("Phi is a real top-weight (n,n)-form") {
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    PhiForm phi = make_phi(theta);
    CHECK(pure_bidegree(phi.form) == std::make_pair(n, n));
    CHECK((conj_form(phi.form) - phi.form).norm() < 1e-11 * phi.form.norm());
    CHECK((project_plus(phi.form) - phi.form).norm() < 1e-11 * phi.form.norm());

    // the unscaled V(1) obeys conj(V(1)) = (-1)^n V(1)
    FiberForm raw = V_map(unit_scalar(n), theta);
    const double s = (n % 2 == 0) ? 1.0 : -1.0;
    CHECK((conj_form(raw) - s * raw).norm() < 1e-11 * raw.norm());
  }
}

TEST_CASE("V intertwines the quaternionic real structure up to (-1)^(n-p)") {
  std::mt19937_64 rng(83);
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    for (int p = 0; p <= n; ++p) {
      FiberForm eta = random_bidegree_form(n, 2 * p, 0, rng);
      FiberForm lhs = V_map(extend_J(conj_form(eta)), theta);
      FiberForm rhs = conj_form(V_map(eta, theta));
      rhs *= ((n - p) % 2 == 0) ? 1.0 : -1.0;
      CHECK((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("the flat HKT fiber is strongly q-positive with unit margin") {
  std::mt19937_64 rng(61);
  for (int n : {1, 2}) {
    FiberForm omega0 = hkt_fiber(standard_structure(n));
    PositivityVerdict v = check_strong_q_positive(omega0, 32, rng);
    CHECK(v.status == Positivity::strongly_positive);
    CHECK(v.margin == doctest::Approx(1.0));

    FiberForm neg = omega0;
    neg *= -1.0;
    PositivityVerdict vn = check_strong_q_positive(neg, 32, rng);
    CHECK(vn.status == Positivity::not_positive);
    REQUIRE(vn.witness.has_value());
    // the witness direction really evaluates negatively
    Eigen::MatrixXd S = q_quadratic_form(neg);
    CHECK(vn.witness->dot(S * *vn.witness) < 0.0);
  }
}

TEST_CASE("sampled strong q-positive forms pass the exact check") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    FiberForm eta = random_strong_q_positive_20(2, rng);
    CHECK(check_q_real(eta, 1e-9));
    PositivityVerdict v = check_strong_q_positive(eta, 8, rng);
    CHECK(v.status != Positivity::not_positive);
  }
}

TEST_CASE("positivity of products of strongly q-positive 2-forms") {
  std::mt19937_64 rng(71);
  const int n = 2;
  ThetaForm theta = make_theta(n);
  FiberForm a = random_strong_q_positive_20(n, rng);
  FiberForm b = random_strong_q_positive_20(n, rng);
  FiberForm prod = wedge(a, b);
  PositivityVerdict v = check_positive_2p(prod, PositivityMode::strong, 80, rng, theta);
  CHECK(v.status == Positivity::strongly_positive);

  FiberForm neg = prod;
  neg *= -1.0;
  PositivityVerdict vn = check_positive_2p(neg, PositivityMode::weak, 80, rng, theta);
  CHECK(vn.status == Positivity::not_positive);
}

TEST_CASE("Omega_0^n is positive against Theta") {
  std::mt19937_64 rng(73);
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    FiberForm omega0 = hkt_fiber(standard_structure(n));
    FiberForm power = unit_scalar(n);
    for (int k = 0; k < n; ++k) power = wedge(power, omega0);
    PositivityVerdict v = check_positive_2p(power, PositivityMode::weak, 40, rng, theta);
    CHECK(v.status == Positivity::strongly_positive);
  }
}

TEST_CASE("omega_I is Phi-positive") {
  std::mt19937_64 rng(79);
  for (int n : {1, 2}) {
    ThetaForm theta = make_theta(n);
    PhiForm phi = make_phi(theta);
    OmegaForms w = omega_forms(standard_structure(n));
    PositivityVerdict v = check_phi_positive(w.omega_I, phi, 48, rng);
    CHECK(v.status == Positivity::strongly_positive);

    FiberForm neg = w.omega_I;
    neg *= -1.0;
    CHECK(check_phi_positive(neg, phi, 48, rng).status == Positivity::not_positive);
  }
}

TEST_CASE("nnls solves small nonnegative fits") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 1, 2, 3;
  Eigen::VectorXd x = nnls(A, b);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));

  // negative least squares solution must clamp to zero
  Eigen::MatrixXd B(2, 2);
  B << 1, 0, 0, 1;
  Eigen::VectorXd c(2);
  c << -1, 2;
  Eigen::VectorXd y = nnls(B, c);
  CHECK(y[0] == doctest::Approx(0.0));
  CHECK(y[1] == doctest::Approx(2.0));
}
