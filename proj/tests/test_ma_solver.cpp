#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hkt/fiber_algebra.hpp"
#include "hkt/ma_solver.hpp"
#include "hkt/snapshot.hpp"
#include "hkt/spectral.hpp"

using namespace hkt;

namespace {

constexpr double pi = std::numbers::pi;

FormField band_limited_scalar(const TorusGrid& g, int max_mode, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ki(-max_mode, max_mode);
  std::uniform_real_distribution<double> ph(0, 2 * pi);
  std::normal_distribution<double> amp;
  FormField out = zero_field(g, 0);
  out.component(0);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(4 * g.n, 0);
    for (int m : g.axes()) k[m] = ki(rng);
    out += mode_scalar_field(g, k, 0.3 * amp(rng), ph(rng));
  }
  out.constant = false;
  return out;
}

// modes along a single axis each: keeps the Hessian small relative to the
// C0 size, so small potentials stay well inside the positivity cone
FormField mild_scalar(const TorusGrid& g, int terms, std::mt19937_64& rng) {
  const auto axes = g.axes();
  std::uniform_int_distribution<size_t> ai(0, axes.size() - 1);
  std::uniform_real_distribution<double> ph(0, 2 * pi);
  std::normal_distribution<double> amp;
  FormField out = zero_field(g, 0);
  out.component(0);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> k(4 * g.n, 0);
    k[axes[ai(rng)]] = 1;
    out += mode_scalar_field(g, k, 0.3 * amp(rng), ph(rng));
  }
  out.constant = false;
  return out;
}

FormField scaled_to_c0(FormField f, double c0) {
  const double m = f.max_abs();
  if (m > 0) f *= c0 / m;
  return f;
}

Eigen::VectorXcd flat_symbol(const ProblemSpec& spec) {
  FormField delta = zero_field(spec.grid, 0);
  Eigen::VectorXcd dv = Eigen::VectorXcd::Zero(spec.grid.points());
  dv[0] = 1.0;
  delta.component(0) = dv;
  FormField zero = zero_field(spec.grid, 0);
  zero.component(0);
  Eigen::VectorXcd sym = scalar_values(linearized_operator(delta, zero, spec));
  Spectral::get(spec.grid.dim(), spec.grid.N).forward(sym);
  return sym;
}

}  // namespace

TEST_CASE("residuals vanish at the flat solution") {
  for (int n : {1, 2}) {
    TorusGrid g = make_grid(n, 0b1111, 8);
    FormField f0 = zero_field(g, 0);
    f0.component(0);
    ProblemSpec spec = make_problem(g, f0, true);
    FormField phi0 = zero_field(g, 0);
    phi0.component(0);
    CHECK(residual_quat(phi0, 1.0, spec).norm() < 1e-13);
    CHECK(residual_hessian(phi0, 1.0, spec).norm() < 1e-12);
    CHECK(first_reformulation_check(phi0, 1.0, spec) < 1e-12);
  }
}

TEST_CASE("n = 1 residual is affine in the potential") {
  std::mt19937_64 rng(31);
  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField f = band_limited_scalar(g, 1, 2, rng);
  ProblemSpec spec = make_problem(g, f, true);
  FormField a = band_limited_scalar(g, 1, 2, rng);
  FormField b = band_limited_scalar(g, 1, 2, rng);
  FormField zero = zero_field(g, 0);
  zero.component(0);
  FormField lhs = residual_density(a + b, 1.0, spec) + residual_density(zero, 1.0, spec);
  FormField rhs = residual_density(a, 1.0, spec) + residual_density(b, 1.0, spec);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("hessian formulation matches the quaternionic one up to a fixed constant") {
  std::mt19937_64 rng(37);
  for (int n : {1, 2}) {
    TorusGrid g = make_grid(n, 0b1111, 8);
    FormField f = band_limited_scalar(g, 1, 2, rng);
    ProblemSpec spec = make_problem(g, f, true);
    OmegaForms w = omega_forms(standard_structure(n));
    FiberForm om_n = unit_scalar(n);
    FiberForm q_n = unit_scalar(n);
    for (int i = 0; i < n; ++i) {
      om_n = wedge(om_n, w.omega_I);
      q_n = wedge(q_n, spec.omega0);
    }
    const cdouble c = top_coefficient(wedge(om_n, spec.phi_form.form)) /
                      top_coefficient(wedge(q_n, conj_form(spec.theta.form)));
    for (int trial = 0; trial < 5; ++trial) {
      FormField phi = scaled_to_c0(band_limited_scalar(g, 1, 3, rng), 0.03);
      FormField hess_side = top_density(residual_hessian(phi, 1.0, spec));
      FormField quat_side = top_density(wedge_field(
          residual_quat(phi, 1.0, spec), constant_field(g, conj_form(spec.theta.form))));
      quat_side *= c;
      const double scale = hess_side.norm() + quat_side.norm();
      CHECK((hess_side - quat_side).norm() < 1e-9 * scale);
      CHECK(first_reformulation_check(phi, 1.0, spec) < 1e-9);
    }
  }
}

TEST_CASE("top su(2)-weight part of the (n,n) block is one-dimensional") {
  for (int n : {1, 2}) {
    const FiberContext& ctx = FiberContext::get(n);
    const auto& ranks = ctx.block(n, n);
    Eigen::MatrixXcd restricted(ranks.size(), ranks.size());
    const Eigen::MatrixXcd& P = ctx.plus_projector(2 * n);
    for (size_t i = 0; i < ranks.size(); ++i)
      for (size_t j = 0; j < ranks.size(); ++j) restricted(i, j) = P(ranks[i], ranks[j]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(restricted);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10) ++rank;
    CHECK(rank == 1);

    OmegaForms w = omega_forms(standard_structure(n));
    FiberForm om_n = unit_scalar(n);
    for (int i = 0; i < n; ++i) om_n = wedge(om_n, w.omega_I);
    FiberForm p = project_plus(om_n);
    CHECK(p.norm() > 1e-10);  // spans the line
  }
}

TEST_CASE("calibration constant") {
  std::mt19937_64 rng(41);
  TorusGrid g = make_grid(2, 0b1111, 8);
  FormField zero = zero_field(g, 0);
  zero.component(0);

  ProblemSpec s0 = make_problem(g, zero, true);
  CHECK(calibrate_A(zero, s0) == doctest::Approx(1.0).epsilon(1e-13));

  FormField c_field = zero_field(g, 0);
  c_field.component(0).setConstant(0.37);
  ProblemSpec sc = make_problem(g, c_field, true);
  CHECK(calibrate_A(zero, sc) == doctest::Approx(std::exp(-0.37)).epsilon(1e-12));

  // A is independent of phi (Stokes)
  FormField f = band_limited_scalar(g, 1, 2, rng);
  ProblemSpec sf = make_problem(g, f, true);
  FormField phi = scaled_to_c0(band_limited_scalar(g, 1, 3, rng), 0.03);
  CHECK(calibrate_A(phi, sf) == doctest::Approx(calibrate_A(zero, sf)).epsilon(1e-10));
}

TEST_CASE("necessary condition value and admissibility refusal") {
  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField zero = zero_field(g, 0);
  zero.component(0);
  ProblemSpec s = make_problem(g, zero, true);
  CHECK(std::abs(necessary_condition_value(zero, s)) < 1e-13);

  // mean-zero perturbation of e^f
  Eigen::VectorXd x = grid_coordinates(g, 0);
  Eigen::VectorXcd lv(g.points());
  for (long i = 0; i < g.points(); ++i) lv[i] = std::log(1.0 + 0.1 * std::sin(2 * pi * x[i]));
  FormField fl = scalar_field(g, lv);
  CHECK(std::abs(necessary_condition_value(fl, s)) < 1e-12);
  CHECK_NOTHROW(make_problem(g, fl, false));

  FormField fc = zero_field(g, 0);
  fc.component(0).setConstant(0.1);
  const double expect = (std::exp(0.1) - 1.0) *
                        integrate(wedge_field(constant_field(g, s.omega0),
                                              constant_field(g, conj_form(s.theta.form))))
                            .real();
  CHECK(necessary_condition_value(fc, s) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(make_problem(g, fc, false), std::invalid_argument);
}

TEST_CASE("linearized operator: kernel, symbol, self-adjointness") {
  std::mt19937_64 rng(43);
  TorusGrid g = make_grid(2, 0b1111, 8);
  FormField zero = zero_field(g, 0);
  zero.component(0);
  ProblemSpec spec = make_problem(g, zero, true);

  FormField cst = zero_field(g, 0);
  cst.component(0).setConstant(2.5);
  CHECK(linearized_operator(cst, zero, spec).norm() < 1e-12);

  // flat symbol is real and strictly negative away from mode zero
  // (modes supported entirely on Nyquist indices have zero symbol by the
  // derivative convention and are skipped)
  Eigen::VectorXcd sym = flat_symbol(spec);
  CHECK(std::abs(sym[0]) < 1e-10);
  const int N = g.N;
  const int d = g.dim();
  double max_imag = 0, max_real = -1e30;
  for (long i = 1; i < sym.size(); ++i) {
    bool nyquist_only = true;
    long rem = i;
    for (int j = d - 1; j >= 0; --j) {
      const int idx = rem % N;
      rem /= N;
      if (idx != 0 && idx != N / 2) nyquist_only = false;
    }
    max_imag = std::max(max_imag, std::abs(sym[i].imag()));
    if (!nyquist_only) max_real = std::max(max_real, sym[i].real());
  }
  CHECK(max_imag < 1e-8 * sym.cwiseAbs().maxCoeff());
  CHECK(max_real < -1.0);

  FormField phi = scaled_to_c0(mild_scalar(g, 3, rng), 0.03);
  FormField p1 = band_limited_scalar(g, 1, 3, rng);
  FormField p2 = band_limited_scalar(g, 1, 3, rng);
  FormField lp2 = linearized_operator(p2, phi, spec);
  FormField lp1 = linearized_operator(p1, phi, spec);
  const cdouble ip12 = (scalar_values(p1).conjugate().array() * scalar_values(lp2).array()).mean();
  const cdouble ip21 = (scalar_values(p2).conjugate().array() * scalar_values(lp1).array()).mean();
  const double scale = p1.norm() * lp2.norm() + p2.norm() * lp1.norm();
  CHECK(std::abs(ip12 - ip21) < 1e-9 * scale);
}

TEST_CASE("n = 1 flat symbol matches the closed form") {
  // on the flat hypercomplex line the operator is the (negative) Laplacian
  // density: symbol -pi^2 |k|^2 ... scaled; verified against -4 pi^2 |k|^2
  TorusGrid g = make_grid(1, 0b0011, 8);
  FormField zero = zero_field(g, 0);
  zero.component(0);
  ProblemSpec spec = make_problem(g, zero, true);
  Eigen::VectorXcd sym = flat_symbol(spec);
  for (int i0 = 0; i0 < 8; ++i0)
    for (int i1 = 0; i1 < 8; ++i1) {
      int k0 = grid_freq(i0, 8), k1 = grid_freq(i1, 8);
      if (std::abs(k0) == 4) k0 = 0;  // Nyquist derivative convention
      if (std::abs(k1) == 4) k1 = 0;
      const double expect = -pi * pi * (k0 * k0 + k1 * k1);
      CHECK(sym[i0 * 8 + i1].real() == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("linearization matches central finite differences at O(eps^2)") {
  std::mt19937_64 rng(47);
  TorusGrid g = make_grid(2, 0b1111, 8);
  FormField f0 = zero_field(g, 0);
  f0.component(0);
  ProblemSpec spec = make_problem(g, f0, true);
  FormField phi = scaled_to_c0(mild_scalar(g, 3, rng), 0.04);
  FormField psi = scaled_to_c0(band_limited_scalar(g, 1, 3, rng), 1.0);
  FormField lin = linearized_operator(psi, phi, spec);

  // the density map is a degree-n polynomial, so at n = 2 the central
  // difference of the plain residual is exact up to round-off
  {
    const double eps = 1e-2;
    FormField up = phi;
    scalar_values(up) += eps * scalar_values(psi);
    FormField dn = phi;
    scalar_values(dn) -= eps * scalar_values(psi);
    FormField fd = residual_density(up, 1.0, spec) - residual_density(dn, 1.0, spec);
    fd *= 1.0 / (2 * eps);
    CHECK((fd - lin).norm() < 1e-11);
  }

  // the log form of the equation is genuinely nonlinear; its linearization
  // is (L psi) / density, and central differences show the O(eps^2) decay
  auto log_g = [&](const FormField& at) {
    FormField dens = quat_density(
        wedge_field(omega_phi(at, spec), omega_phi(at, spec)), spec);
    return scalar_values(dens).real().array().log().matrix().eval();
  };
  Eigen::VectorXd dens_phi =
      scalar_values(quat_density(wedge_field(omega_phi(phi, spec), omega_phi(phi, spec)), spec))
          .real();
  Eigen::VectorXd lin_log =
      scalar_values(lin).real().array().cwiseQuotient(dens_phi.array()).matrix();
  auto fd_err = [&](double eps) {
    FormField up = phi;
    scalar_values(up) += eps * scalar_values(psi);
    FormField dn = phi;
    scalar_values(dn) -= eps * scalar_values(psi);
    Eigen::VectorXd fd = (log_g(up) - log_g(dn)) / (2 * eps);
    return (fd - lin_log).norm();
  };
  const double e3 = fd_err(1e-3);
  const double e4 = fd_err(1e-4);
  CHECK(e3 / e4 > 50.0);
  CHECK(e3 / e4 < 200.0);
}

TEST_CASE("newton: trivial data needs no iterations") {
  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField f0 = zero_field(g, 0);
  f0.component(0);
  ProblemSpec spec = make_problem(g, f0, true);
  SolveResult r = newton_solve(spec);
  CHECK(r.status == SolveStatus::converged);
  CHECK(r.state.newton_iter == 0);
  CHECK(r.state.residual_norm < 1e-13);
  CHECK(r.state.A == doctest::Approx(1.0));
  CHECK(r.state.min_positivity_margin > 0.9);
}

TEST_CASE("newton n = 1: one step, matches the Fourier oracle") {
  TorusGrid g = make_grid(1, 0b1111, 16);
  FormField f = mode_scalar_field(g, {1, 0, 1, 0}, 0.3, 0.2);
  ProblemSpec spec = make_problem(g, f, true);
  SolveResult r = newton_solve(spec);
  CHECK(r.status == SolveStatus::converged);
  CHECK(r.state.newton_iter <= 1);
  CHECK(r.state.residual_norm <= 1e-10);
  CHECK(r.state.min_positivity_margin > 0);

  // independent closed-form solve: phi_hat = rhs_hat / symbol
  Eigen::VectorXcd sym = flat_symbol(spec);
  Eigen::VectorXcd rhs(g.points());
  const Eigen::VectorXcd& fv = scalar_values(spec.f);
  for (long i = 0; i < g.points(); ++i) rhs[i] = r.state.A * std::exp(fv[i].real()) - 1.0;
  auto& sp = Spectral::get(g.dim(), g.N);
  sp.forward(rhs);
  for (long i = 0; i < rhs.size(); ++i)
    rhs[i] = (std::abs(sym[i]) > 1e-8) ? rhs[i] / sym[i] : cdouble(0);
  sp.backward(rhs);
  FormField oracle = scalar_field(g, rhs);
  dealias(oracle);
  normalize_potential(oracle);
  CHECK((r.state.phi - oracle).norm() <= 1e-10);
}

TEST_CASE("newton n = 2: manufactured solution recovery") {
  std::mt19937_64 rng(53);
  TorusGrid g = make_grid(2, 0b1111, 8);
  FormField target = scaled_to_c0(mild_scalar(g, 4, rng), 0.05);
  normalize_potential(target);
  FormField f = manufactured_f(target, g);
  ProblemSpec spec = make_problem(g, f, true);
  SolveResult r = newton_solve(spec);
  CHECK(r.status == SolveStatus::converged);
  CHECK(r.state.newton_iter <= 8);
  FormField diff = r.state.phi - target;
  CHECK(diff.norm() / target.norm() <= 1e-6);
  for (const IterRecord& rec : r.trace) CHECK(rec.margin > 0);
}

TEST_CASE("uniqueness probe") {
  std::mt19937_64 rng(59);
  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField f = mode_scalar_field(g, {0, 1, 0, 0}, 0.2, 0.0);
  ProblemSpec spec = make_problem(g, f, true);

  FormField zero = zero_field(g, 0);
  zero.component(0);
  FormField other = scaled_to_c0(mild_scalar(g, 2, rng), 0.05);
  CHECK(uniqueness_probe(spec, {zero, other}) <= 1e-9);

  // constant-shifted inits collapse to the same normalized solution
  FormField shifted = other;
  scalar_values(shifted).array() += 3.0;
  CHECK(uniqueness_probe(spec, {other, shifted}) <= 1e-11);
}

TEST_CASE("cone exit is reported for an inadmissible start") {
  TorusGrid g = make_grid(1, 0b1111, 8);
  FormField f0 = zero_field(g, 0);
  f0.component(0);
  ProblemSpec spec = make_problem(g, f0, true);
  FormField bad = mode_scalar_field(g, {1, 0, 0, 0}, 5.0, 0.0);
  SolveResult r = newton_solve(spec, bad);
  CHECK(r.status == SolveStatus::cone_exit);
  CHECK(r.state.min_positivity_margin <= 0);
}

TEST_CASE("snapshot round trip is byte-identical") {
  std::mt19937_64 rng(61);
  TorusGrid g = make_grid(1, 0b0111, 8);
  FormField field = zero_field(g, 2);
  const FiberContext& ctx = FiberContext::get(1);
  std::normal_distribution<double> amp;
  for (int r = 0; r < ctx.idx.dim(2); r += 2) {
    Eigen::VectorXcd v(g.points());
    for (long i = 0; i < g.points(); ++i) v[i] = {amp(rng), amp(rng)};
    field.component(r) = v;
  }
  const std::string p1 = "/tmp/hkt_snap_1.hktf";
  const std::string p2 = "/tmp/hkt_snap_2.hktf";
  write_snapshot(p1, field);
  FormField back = read_snapshot(p1);
  CHECK((back - field).norm() == 0.0);
  CHECK(back.degree == field.degree);
  CHECK(back.grid == field.grid);
  write_snapshot(p2, back);

  std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.size() > 0);
}
