#include "hkt/ma_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hkt/fiber_algebra.hpp"
#include "hkt/spectral.hpp"

namespace hkt {

namespace {

FiberForm fiber_power(const FiberForm& base, int k) {
  FiberForm acc = unit_scalar(base.n);
  for (int i = 0; i < k; ++i) acc = wedge(acc, base);
  return acc;
}

FormField field_power(const FormField& base, int k, const TorusGrid& grid, int n) {
  if (k == 0) return constant_field(grid, unit_scalar(n));
  FormField acc = base;
  for (int i = 1; i < k; ++i) acc = wedge_field(acc, base);
  return acc;
}

Eigen::VectorXcd exp_field_values(const FormField& f) {
  const Eigen::VectorXcd& v = scalar_values(f);
  Eigen::VectorXcd out(v.size());
  for (long i = 0; i < v.size(); ++i) out[i] = std::exp(v[i].real());
  return out;
}

/// Coefficient of the unique (2n,0)-block basis form of a (2n,0)-field.
const Eigen::VectorXcd& top20_component(const FormField& field, const FiberContext& ctx) {
  const int rank = ctx.block(2 * ctx.n, 0)[0];
  const Eigen::VectorXcd* v = field.find(rank);
  if (!v) throw std::runtime_error("expected a (2n,0) component");
  return *v;
}

double field_l2(const Eigen::VectorXcd& v) { return std::sqrt(v.squaredNorm() / v.size()); }

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::cone_exit: return "cone_exit";
    case SolveStatus::linear_solve_failure: return "linear_solve_failure";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
  }
  return "unknown";
}

ProblemSpec make_problem(const TorusGrid& grid, FormField f, bool calibrate_A,
                         double necessary_tol) {
  ProblemSpec spec;
  spec.grid = grid;
  spec.omega0 = hkt_fiber(standard_structure(grid.n));
  spec.theta = make_theta(grid.n);
  spec.phi_form = make_phi(spec.theta);
  spec.f = std::move(f);
  spec.calibrate_A = calibrate_A;
  if (!calibrate_A) {
    const double viol = necessary_condition_value(spec.f, spec);
    const double scale = std::abs(integrate(wedge_field(
        constant_field(grid, fiber_power(spec.omega0, grid.n)),
        constant_field(grid, conj_form(spec.theta.form)))));
    if (std::abs(viol) > necessary_tol * scale)
      throw std::invalid_argument(
          "make_problem: data violates the compatibility condition, int (e^f - 1) "
          "Omega_0^n ^ conj(Theta) = " + std::to_string(viol) +
          "; enable calibration or fix f");
  }
  return spec;
}

FormField hessian_form(const FormField& phi) { return pd(pd_J(phi)); }

FormField omega_phi(const FormField& phi, const ProblemSpec& spec) {
  FormField h = hessian_form(phi);
  if (h.norm() == 0.0) return constant_field(spec.grid, spec.omega0);
  return constant_field(spec.grid, spec.omega0) + h;
}

FormField quat_density(const FormField& f20, const ProblemSpec& spec) {
  const FiberContext& ctx = FiberContext::get(spec.grid.n);
  const FiberForm om_n = fiber_power(spec.omega0, spec.grid.n);
  const cdouble c0 = om_n.coeffs[ctx.block(2 * spec.grid.n, 0)[0]];
  FormField out = zero_field(spec.grid, 0);
  out.component(0) = top20_component(f20, ctx) / c0;
  out.constant = f20.constant;
  return out;
}

FormField residual_quat(const FormField& phi, double A, const ProblemSpec& spec) {
  const int n = spec.grid.n;
  FormField lhs = field_power(omega_phi(phi, spec), n, spec.grid, n);
  FormField rhs = zero_field(spec.grid, 2 * n);
  const FiberForm om_n = fiber_power(spec.omega0, n);
  const FiberContext& ctx = FiberContext::get(n);
  const int rank = ctx.block(2 * n, 0)[0];
  rhs.component(rank) = A * om_n.coeffs[rank] * exp_field_values(spec.f);
  return lhs - rhs;
}

FormField residual_density(const FormField& phi, double A, const ProblemSpec& spec) {
  return quat_density(residual_quat(phi, A, spec), spec);
}

FormField top_density(const FormField& top) {
  const int n = top.grid.n;
  if (top.degree != 4 * n) throw std::invalid_argument("top_density: degree must be 4n");
  FiberForm unit(n, 4 * n, Eigen::VectorXcd::Ones(1));
  const cdouble kappa = top_coefficient(unit);
  FormField out = zero_field(top.grid, 0);
  const Eigen::VectorXcd* v = top.find(0);
  out.component(0) = v ? (kappa * *v).eval() : Eigen::VectorXcd::Zero(top.grid.points()).eval();
  out.constant = top.constant;
  return out;
}

FormField residual_hessian(const FormField& phi, double A, const ProblemSpec& spec) {
  const int n = spec.grid.n;
  OmegaForms w = omega_forms(standard_structure(n));
  FormField hess11 = pd(dbar(phi));
  FormField base = constant_field(spec.grid, w.omega_I) - cdouble(0, 1) * hess11;
  FormField lhs = wedge_field(field_power(base, n, spec.grid, n),
                              constant_field(spec.grid, spec.phi_form.form));
  FiberForm ref = wedge(fiber_power(w.omega_I, n), spec.phi_form.form);
  FormField rhs = zero_field(spec.grid, 4 * n);
  rhs.component(0) = A * ref.coeffs[0] * exp_field_values(spec.f);
  return lhs - rhs;
}

double first_reformulation_check(const FormField& phi, double A, const ProblemSpec& spec) {
  const int n = spec.grid.n;
  OmegaForms w = omega_forms(standard_structure(n));
  const FiberForm om_n = fiber_power(w.omega_I, n);
  const FiberForm p_plus = project_plus(om_n);

  FormField hess11 = pd(dbar(phi));
  FormField base = constant_field(spec.grid, w.omega_I) - cdouble(0, 1) * hess11;
  FormField lhs = wedge_field(field_power(base, n, spec.grid, n),
                              constant_field(spec.grid, p_plus));
  FiberForm ref = wedge(om_n, p_plus);
  FormField rhs = zero_field(spec.grid, 4 * n);
  rhs.component(0) = A * ref.coeffs[0] * exp_field_values(spec.f);
  FormField first = top_density(lhs - rhs);

  // constant conversion factor between the two normalizations
  const cdouble c = top_coefficient(ref) /
                    top_coefficient(wedge(fiber_power(spec.omega0, n), conj_form(spec.theta.form)));
  FormField quat_top = top_density(
      wedge_field(residual_quat(phi, A, spec), constant_field(spec.grid, conj_form(spec.theta.form))));
  quat_top *= c;
  const double scale = quat_top.norm() + first.norm() + 1e-300;
  return (first - quat_top).norm() / scale;
}

double calibrate_A(const FormField& phi, const ProblemSpec& spec) {
  const int n = spec.grid.n;
  FormField theta_bar = constant_field(spec.grid, conj_form(spec.theta.form));
  const double num =
      integrate(wedge_field(field_power(omega_phi(phi, spec), n, spec.grid, n), theta_bar)).real();
  FormField efo = zero_field(spec.grid, 0);
  efo.component(0) = exp_field_values(spec.f);
  const double den =
      integrate(wedge_field(wedge_field(efo, constant_field(spec.grid, fiber_power(spec.omega0, n))),
                            theta_bar))
          .real();
  if (den <= 0) throw std::invalid_argument("calibrate_A: nonpositive reference volume");
  return num / den;
}

double necessary_condition_value(const FormField& f, const ProblemSpec& spec) {
  FormField g = zero_field(spec.grid, 0);
  g.component(0) = exp_field_values(f).array() - 1.0;
  FormField meas = wedge_field(constant_field(spec.grid, fiber_power(spec.omega0, spec.grid.n)),
                               constant_field(spec.grid, conj_form(spec.theta.form)));
  return integrate(wedge_field(g, meas)).real();
}

FormField linearized_operator(const FormField& psi, const FormField& phi,
                              const ProblemSpec& spec) {
  const int n = spec.grid.n;
  FormField pow = field_power(omega_phi(phi, spec), n - 1, spec.grid, n);
  FormField out = quat_density(wedge_field(hessian_form(psi), pow), spec);
  out *= static_cast<double>(n);
  return out;
}

double min_positivity_margin(const FormField& phi, const ProblemSpec& spec) {
  FormField om = omega_phi(phi, spec);
  double margin = std::numeric_limits<double>::infinity();
  const long limit = om.constant ? 1 : spec.grid.points();
  for (long idx = 0; idx < limit; ++idx) {
    Eigen::MatrixXd Q = q_quadratic_form(fiber_at(om, idx));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    margin = std::min(margin, es.eigenvalues().minCoeff());
  }
  return margin;
}

void normalize_potential(FormField& phi) {
  Eigen::VectorXcd& v = scalar_values(phi);
  v.array() -= v.mean();
  for (long i = 0; i < v.size(); ++i) v[i] = cdouble(v[i].real(), 0.0);
}

namespace {

struct SolverContext {
  const ProblemSpec& spec;
  Eigen::VectorXcd ef;       // e^f values
  double rhs_scale;          // || A e^f ||_L2 with A = 1
  Eigen::VectorXcd symbol;   // Fourier symbol of the flat linearized operator

  explicit SolverContext(const ProblemSpec& s) : spec(s) {
    ef = exp_field_values(s.f);
    rhs_scale = field_l2(ef);
    // the exact symbol: apply the flat operator to a delta and transform
    FormField delta = zero_field(s.grid, 0);
    Eigen::VectorXcd dv = Eigen::VectorXcd::Zero(s.grid.points());
    dv[0] = 1.0;
    delta.component(0) = dv;
    FormField zero_phi = zero_field(s.grid, 0);
    zero_phi.component(0);
    FormField ld = linearized_operator(delta, zero_phi, s);
    symbol = scalar_values(ld);
    Spectral::get(s.grid.dim(), s.grid.N).forward(symbol);
  }

  Eigen::VectorXd project(const Eigen::VectorXcd& v) const {
    FormField s = zero_field(spec.grid, 0);
    s.component(0) = v;
    dealias(s);
    Eigen::VectorXcd w = scalar_values(s);
    w.array() -= w.mean();
    return w.real();
  }

  // inverse of the negated flat operator, constants projected out
  Eigen::VectorXd precondition(const Eigen::VectorXd& r) const {
    Eigen::VectorXcd v = r.cast<cdouble>();
    auto& sp = Spectral::get(spec.grid.dim(), spec.grid.N);
    sp.forward(v);
    const double floor = 1e-12 * symbol.cwiseAbs().maxCoeff();
    for (long i = 0; i < v.size(); ++i)
      v[i] = (std::abs(symbol[i]) > floor) ? v[i] / (-symbol[i].real()) : cdouble(0);
    sp.backward(v);
    return project(v);
  }
};

FormField to_scalar_field(const TorusGrid& g, const Eigen::VectorXd& v) {
  FormField s = zero_field(g, 0);
  s.component(0) = v.cast<cdouble>();
  return s;
}

/// Preconditioned CG for (-L) x = b on the mean-zero band-limited subspace.
bool solve_linear(const SolverContext& ctx, const FormField& omega_pow_nm1,
                  const Eigen::VectorXd& b, double rel_tol, int max_iter, Eigen::VectorXd& x) {
  const TorusGrid& g = ctx.spec.grid;
  const double n = ctx.spec.grid.n;
  auto apply = [&](const Eigen::VectorXd& v) {
    FormField psi = to_scalar_field(g, v);
    FormField lv = quat_density(wedge_field(hessian_form(psi), omega_pow_nm1), ctx.spec);
    return ctx.project(-n * scalar_values(lv));
  };

  x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  const double b_norm = b.norm();
  if (b_norm == 0) return true;
  Eigen::VectorXd z = ctx.precondition(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd q = apply(p);
    const double pq = p.dot(q);
    if (pq <= 0) return false;  // lost definiteness
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    if (r.norm() <= rel_tol * b_norm) return true;
    z = ctx.precondition(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return false;
}

}  // namespace

SolveResult newton_solve(const ProblemSpec& spec, const FormField& phi0, SolveOptions opts) {
  SolverContext ctx(spec);
  SolveResult res;
  SolveState& st = res.state;
  st.phi = phi0;
  st.phi.component(0);
  normalize_potential(st.phi);
  {
    FormField tmp = st.phi;
    dealias(tmp);
    st.phi = tmp;
  }
  st.A = spec.calibrate_A ? calibrate_A(st.phi, spec) : 1.0;

  // the discrete model lives on the dealiased band, so convergence is
  // measured on the band-limited residual (out-of-band data harmonics are
  // not reachable by a band-limited potential)
  auto residual_values = [&](const FormField& phi, double A) {
    FormField rd = residual_density(phi, A, spec);
    dealias(rd);
    return scalar_values(rd).real().eval();
  };

  Eigen::VectorXd r = residual_values(st.phi, st.A);
  double r_norm = field_l2(r.cast<cdouble>()) / (st.A * ctx.rhs_scale);
  st.residual_norm = r_norm;
  st.min_positivity_margin = min_positivity_margin(st.phi, spec);
  res.trace.push_back({0, r_norm, st.A, st.min_positivity_margin, 0.0});
  if (st.min_positivity_margin <= 0) {
    res.status = SolveStatus::cone_exit;
    return res;
  }

  for (int iter = 1; iter <= opts.max_newton; ++iter) {
    if (r_norm <= opts.tol) {
      res.status = SolveStatus::converged;
      return res;
    }
    FormField pow = field_power(omega_phi(st.phi, spec), spec.grid.n - 1, spec.grid, spec.grid.n);
    // solve (-L) delta = r, i.e. L delta = -r
    Eigen::VectorXd b = ctx.project(r.cast<cdouble>());
    Eigen::VectorXd delta;
    const double lin_tol = std::max(1e-12, 1e-3 * r_norm);
    if (!solve_linear(ctx, pow, b, lin_tol, opts.max_krylov, delta)) {
      res.status = SolveStatus::linear_solve_failure;
      return res;
    }

    double t = 1.0;
    bool accepted = false;
    bool saw_positive = false;
    FormField cand = st.phi;
    while (t >= std::ldexp(1.0, -20)) {
      cand = st.phi;
      scalar_values(cand) += (t * delta).cast<cdouble>();
      normalize_potential(cand);
      const double margin = min_positivity_margin(cand, spec);
      if (margin > 0) {
        saw_positive = true;
        const double A_cand = spec.calibrate_A ? calibrate_A(cand, spec) : 1.0;
        Eigen::VectorXd r_cand = residual_values(cand, A_cand);
        const double r_cand_norm = field_l2(r_cand.cast<cdouble>()) / (A_cand * ctx.rhs_scale);
        if (r_cand_norm <= (1.0 - 1e-4 * t) * r_norm || r_cand_norm <= opts.tol) {
          st.phi = cand;
          st.A = A_cand;
          st.min_positivity_margin = margin;
          r = r_cand;
          r_norm = r_cand_norm;
          st.residual_norm = r_norm;
          st.newton_iter = iter;
          res.trace.push_back({iter, r_norm, st.A, margin, t});
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.status = saw_positive ? SolveStatus::linear_solve_failure : SolveStatus::cone_exit;
      return res;
    }
  }
  res.status = (r_norm <= opts.tol) ? SolveStatus::converged : SolveStatus::max_iter_exceeded;
  return res;
}

SolveResult newton_solve(const ProblemSpec& spec, SolveOptions opts) {
  FormField zero = zero_field(spec.grid, 0);
  zero.component(0);
  return newton_solve(spec, zero, opts);
}

double uniqueness_probe(const ProblemSpec& spec, const std::vector<FormField>& inits,
                        SolveOptions opts) {
  std::vector<FormField> sols;
  for (const FormField& init : inits) {
    SolveResult r = newton_solve(spec, init, opts);
    if (r.status != SolveStatus::converged)
      throw std::runtime_error(std::string("uniqueness_probe: solve failed: ") +
                               to_string(r.status));
    sols.push_back(r.state.phi);
  }
  double dev = 0.0;
  for (size_t a = 0; a < sols.size(); ++a)
    for (size_t b = a + 1; b < sols.size(); ++b) dev = std::max(dev, (sols[a] - sols[b]).max_abs());
  return dev;
}

FormField manufactured_f(const FormField& target, const TorusGrid& grid) {
  ProblemSpec tmp;
  tmp.grid = grid;
  tmp.omega0 = hkt_fiber(standard_structure(grid.n));
  tmp.theta = make_theta(grid.n);
  FormField dens = quat_density(field_power(omega_phi(target, tmp), grid.n, grid, grid.n), tmp);
  FormField f = zero_field(grid, 0);
  Eigen::VectorXcd out(grid.points());
  const Eigen::VectorXcd& v = scalar_values(dens);
  for (long i = 0; i < v.size(); ++i) {
    if (v[i].real() <= 0)
      throw std::invalid_argument("manufactured_f: target leaves the positivity cone");
    out[i] = std::log(v[i].real());
  }
  f.component(0) = out;
  return f;
}

}  // namespace hkt
