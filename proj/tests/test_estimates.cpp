#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hkt/estimates.hpp"

using namespace hkt;

namespace {

constexpr double pi = std::numbers::pi;

FormField admissible_f(const TorusGrid& g, double amp) {
  // log(1 + amp sin(2 pi x0)) has e^f - 1 of exact zero mean
  Eigen::VectorXd x = grid_coordinates(g, g.axes()[0]);
  Eigen::VectorXcd v(g.points());
  for (long i = 0; i < g.points(); ++i) v[i] = std::log(1.0 + amp * std::sin(2 * pi * x[i]));
  return scalar_field(g, v);
}

FormField band_scalar(const TorusGrid& g, int max_mode, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ki(-max_mode, max_mode);
  std::uniform_real_distribution<double> ph(0, 2 * pi);
  std::normal_distribution<double> amp;
  FormField out = zero_field(g, 0);
  out.component(0);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(4 * g.n, 0);
    for (int m : g.axes()) k[m] = ki(rng);
    out += mode_scalar_field(g, k, amp(rng), ph(rng));
  }
  out.constant = false;
  return out;
}

}  // namespace

TEST_CASE("energy inequality prefactor and trivial case") {
  CHECK(1.0 / (16.0 * 1) * (2.0 * 2.0 / (2.0 - 1.0)) == doctest::Approx(0.25).epsilon(1e-15));

  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField zero = zero_field(g, 0);
  zero.component(0);
  ProblemSpec spec = make_problem(g, zero, true);
  EnergyResult r = energy_inequality(zero, spec, 2.0);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
}

TEST_CASE("energy inequality on solved instances") {
  TorusGrid g = make_grid(1, 0b1111, 16);
  ProblemSpec spec = make_problem(g, admissible_f(g, 0.2), false);
  SolveResult sol = newton_solve(spec);
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(std::abs(sol.state.A - 1.0) < 1e-10);
  for (double p : {2.0, 3.0, 4.0}) {
    EnergyResult r = energy_inequality(sol.state.phi, spec, p);
    const double scale = std::abs(r.lhs) + std::abs(r.rhs) + 1e-300;
    CHECK(r.slack >= -1e-8 * scale);
    CHECK(r.rhs > 0.0);
  }
  CHECK_THROWS(energy_inequality(sol.state.phi, spec, 1.5));
}

TEST_CASE("gradient identity check delegates cleanly") {
  std::mt19937_64 rng(67);
  TorusGrid g0 = make_grid(1, 0b1111, 8);
  FormField zero = zero_field(g0, 0);
  zero.component(0);
  CHECK(gradient_identity_check(zero) == 0.0);

  for (int n : {1, 2}) {
    TorusGrid g = make_grid(n, (n == 1) ? 0b1111u : 0b00110011u, 8);
    for (int t = 0; t < 10; ++t) CHECK(gradient_identity_check(band_scalar(g, 1, 3, rng)) <= 1e-8);
  }
}

TEST_CASE("Lp growth table: monotone approach to the C0 norm") {
  std::mt19937_64 rng(71);
  TorusGrid g = make_grid(1, 0b1111, 16);
  MoserParameters mp = default_moser(1);
  CHECK(mp.kappa == doctest::Approx(2.0));

  FormField zero = zero_field(g, 0);
  zero.component(0);
  LpTable tz = lp_growth_table(zero, 1, mp);
  for (const LpRow& row : tz.rows) CHECK(row.norm == 0.0);

  FormField phi = band_scalar(g, 2, 4, rng);
  LpTable t = lp_growth_table(phi, 1, mp);
  CHECK(t.monotone);
  CHECK(t.rows.back().norm <= t.c0 * (1 + 1e-12));
  CHECK(t.rows.back().norm > 0.5 * t.c0);  // p = 64 is close to the max
  CHECK(std::isfinite(t.Q1));
  CHECK(t.Q1 > 0.0);
  // every tabulated norm obeys the fitted bound shape
  for (const LpRow& row : t.rows)
    CHECK(row.norm <= t.Q1 * std::pow(t.C3 * row.p, -2.0 / row.p) * (1 + 1e-9));
}

TEST_CASE("Poincare constant on the unit torus") {
  std::mt19937_64 rng(73);
  for (uint32_t mask : {0b0001u, 0b1111u}) {
    TorusGrid g = make_grid(1, mask, 8);
    PoincareResult r = poincare_check(g, 100, rng);
    CHECK(r.spectral_constant == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-10));
    CHECK(r.max_sample_ratio <= r.spectral_constant + 1e-10);
    CHECK(r.max_sample_ratio > 0.0);
  }
}

TEST_CASE("C0 sweep: zero data, linear small-amplitude regime, grid stability") {
  auto rows = c0_bound_sweep(1, 0b1111, {0.0, 0.1, 0.2}, {8, 16});
  REQUIRE(rows.size() == 6);
  for (const SweepRow& r : rows) CHECK(r.solved);

  CHECK(rows[0].phi_c0 == 0.0);
  CHECK(rows[1].phi_c0 == 0.0);

  // refinement stability at fixed amplitude (<= 1% between grids)
  for (int i = 2; i < 6; i += 2) {
    const double a = rows[i].phi_c0, b = rows[i + 1].phi_c0;
    CHECK(std::abs(a - b) <= 0.01 * std::max(a, b));
  }
  // near-linear amplitude scaling in the small regime
  CHECK(rows[5].phi_c0 / rows[3].phi_c0 == doctest::Approx(2.0).epsilon(0.1));
}
