#include "hkt/estimates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hkt/fiber_algebra.hpp"

namespace hkt {

namespace {

double theta_measure_coeff(const ProblemSpec& spec) {
  FiberForm om_n = unit_scalar(spec.grid.n);
  for (int i = 0; i < spec.grid.n; ++i) om_n = wedge(om_n, spec.omega0);
  return top_coefficient(wedge(om_n, conj_form(spec.theta.form))).real();
}

}  // namespace

MoserParameters default_moser(int n) {
  MoserParameters m;
  m.kappa = (2.0 * n) / (2.0 * n - 1.0);
  m.p_list = {2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  return m;
}

EnergyResult energy_inequality(const FormField& phi, const ProblemSpec& spec, double p) {
  if (p < 2) throw std::invalid_argument("energy_inequality: p must be >= 2");
  const int n = spec.grid.n;
  const long P = spec.grid.points();
  const Eigen::VectorXd pv = scalar_values(phi).real();
  const double c0 = pv.cwiseAbs().maxCoeff();
  const double delta = 1e-8 * c0;
  const double mu = theta_measure_coeff(spec);

  EnergyResult out{0, 0, 0, 0, delta};
  if (c0 == 0) return out;

  // |grad u|^2 for u = (phi^2 + delta^2)^{p/4} via the chain rule: u is a
  // smooth function of phi, and grad phi is exact for the band-limited phi,
  // so this avoids spectrally differentiating the kink of |phi|^{p/2}
  auto [grad2, rhs_unused] = grad_norm_identity(phi);
  (void)rhs_unused;
  const Eigen::VectorXd gp2 = scalar_values(grad2).real();
  double lhs_acc = 0;
  for (long i = 0; i < P; ++i) {
    const double s = pv[i] * pv[i] + delta * delta;
    lhs_acc += (p * p / 4.0) * std::pow(s, (p - 4.0) / 2.0) * pv[i] * pv[i] * gp2[i];
  }
  out.lhs = mu * lhs_acc / static_cast<double>(P);

  const Eigen::VectorXd fv = scalar_values(spec.f).real();
  double acc = 0;
  for (long i = 0; i < P; ++i) {
    const double w = std::pow(pv[i] * pv[i] + delta * delta, (p - 2.0) / 2.0);
    acc += (1.0 - std::exp(fv[i])) * pv[i] * w;
  }
  const double integral = mu * acc / static_cast<double>(P);
  // the integration-by-parts chain with the 4n gradient identity gives the
  // prefactor n p^2/(p-1); at n = 1, p = 2 the chain is an equality
  out.rhs = n * (p * p / (p - 1.0)) * integral;
  out.rhs_stated = (1.0 / (16.0 * n)) * (p * p / (p - 1.0)) * integral;
  out.slack = out.rhs - out.lhs;
  return out;
}

double gradient_identity_check(const FormField& psi) {
  auto [lhs, rhs] = grad_norm_identity(psi);
  const double scale = lhs.max_abs() + 1e-300;
  return (lhs - rhs).max_abs() / scale;
}

LpTable lp_growth_table(const FormField& phi, int n, const MoserParameters& params) {
  const Eigen::VectorXd v = scalar_values(phi).real().cwiseAbs();
  LpTable table;
  table.c0 = v.maxCoeff();
  if (table.c0 == 0) {
    for (double p : params.p_list) table.rows.push_back({p, 0.0});
    table.Q1 = 0;
    table.C3 = 1;
    table.monotone = true;
    return table;
  }
  const Eigen::VectorXd scaled = v / table.c0;
  std::vector<double> log_norms;
  for (double p : params.p_list) {
    // log ||phi||_p = log c0 + (1/p) log mean((|phi|/c0)^p), overflow-safe
    double mean_pow = scaled.array().pow(p).mean();
    const double ln = std::log(table.c0) + std::log(mean_pow) / p;
    log_norms.push_back(ln);
    table.rows.push_back({p, std::exp(ln)});
  }
  table.monotone = true;
  for (size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i].norm < table.rows[i - 1].norm * (1.0 - 1e-12)) table.monotone = false;
  if (table.rows.back().norm > table.c0 * (1.0 + 1e-12)) table.monotone = false;

  // fit log||phi||_p + (2n/p) log p = log Q1 - (2n/p) log C3 by least squares
  // in the variable x = 2n/p, then lift log Q1 so every bound holds
  const size_t m = params.p_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(m), ys(m);
  for (size_t i = 0; i < m; ++i) {
    xs[i] = 2.0 * n / params.p_list[i];
    ys[i] = log_norms[i] + xs[i] * std::log(params.p_list[i]);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double beta = (m * sxy - sx * sy) / (m * sxx - sx * sx + 1e-300);
  double alpha = -1e300;
  for (size_t i = 0; i < m; ++i) alpha = std::max(alpha, ys[i] - beta * xs[i]);
  table.Q1 = std::exp(alpha);
  table.C3 = std::exp(-beta);
  return table;
}

std::vector<SweepRow> c0_bound_sweep(int n, uint32_t active_mask,
                                     const std::vector<double>& amplitudes,
                                     const std::vector<int>& grid_sizes) {
  std::vector<SweepRow> rows;
  for (double amp : amplitudes) {
    for (int N : grid_sizes) {
      TorusGrid g = make_grid(n, active_mask, N);
      std::vector<int> k(4 * n, 0);
      k[g.axes()[0]] = 1;
      FormField f = mode_scalar_field(g, k, amp, 0.0);
      SweepRow row{amp, N, f.max_abs(), 0.0, false, ""};
      try {
        ProblemSpec spec = make_problem(g, f, true);
        SolveResult r = newton_solve(spec);
        row.status = to_string(r.status);
        if (r.status == SolveStatus::converged) {
          row.solved = true;
          row.phi_c0 = r.state.phi.max_abs();
        }
      } catch (const std::exception& e) {
        row.status = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

PoincareResult poincare_check(const TorusGrid& grid, int samples, std::mt19937_64& rng) {
  PoincareResult out{0, 0};
  // exact first eigenvalue from the Fourier spectrum: lambda = (2 pi)^2 min
  // |k|^2 over nonzero modes, so the constant is 1/(2 pi min |k|)
  long min_k2 = -1;
  const int d = grid.dim();
  std::vector<int> idx(d, 0);
  for (long flat = 0; flat < grid.points(); ++flat) {
    long rem = flat;
    long k2 = 0;
    for (int j = d - 1; j >= 0; --j) {
      int i = static_cast<int>(rem % grid.N);
      rem /= grid.N;
      int k = grid_freq(i, grid.N);
      if (std::abs(k) == grid.N / 2) k = 0;  // Nyquist derivative convention
      k2 += static_cast<long>(k) * k;
    }
    if (k2 > 0 && (min_k2 < 0 || k2 < min_k2)) min_k2 = k2;
  }
  out.spectral_constant = 1.0 / (2.0 * std::numbers::pi * std::sqrt(static_cast<double>(min_k2)));

  std::uniform_int_distribution<int> ki(-grid.N / 3, grid.N / 3);
  std::uniform_real_distribution<double> ph(0, 2 * std::numbers::pi);
  std::normal_distribution<double> amp;
  for (int s = 0; s < samples; ++s) {
    FormField psi = zero_field(grid, 0);
    psi.component(0);
    for (int t = 0; t < 4; ++t) {
      std::vector<int> k(4 * grid.n, 0);
      bool nonzero = false;
      for (int m : grid.axes()) {
        k[m] = ki(rng);
        nonzero = nonzero || k[m] != 0;
      }
      if (!nonzero) k[grid.axes()[0]] = 1;
      psi += mode_scalar_field(grid, k, amp(rng), ph(rng));
    }
    psi.constant = false;
    Eigen::VectorXcd& v = scalar_values(psi);
    v.array() -= v.mean();
    const double num = std::sqrt(v.real().squaredNorm() / v.size());
    auto [grad2, unused] = grad_norm_identity(psi);
    (void)unused;
    const double den = std::sqrt(scalar_values(grad2).real().mean());
    if (den > 0) out.max_sample_ratio = std::max(out.max_sample_ratio, num / den);
  }
  return out;
}

}  // namespace hkt
