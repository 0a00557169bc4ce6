#pragma once

#include <random>
#include <vector>

#include "hkt/ma_solver.hpp"

namespace hkt {

struct MoserParameters {
  double kappa;                 // 2n/(2n-1)
  std::vector<double> p_list;   // ascending, entries >= 2
};

MoserParameters default_moser(int n);

struct EnergyResult {
  double lhs;         // || grad |phi|^{p/2} ||_{L2}^2 against Omega_0^n ^ conj(Theta)
  double rhs;         // n p^2/(p-1) int (1 - e^f) phi |phi|^{p-2} ... ; this is
                      // the prefactor the integration-by-parts chain yields
  double rhs_stated;  // same integral with the commonly quoted (1/16n) p^2/(p-1)
  double slack;       // rhs - lhs
  double delta;       // smoothing parameter used for |phi|^{p/2}
};

/// Both sides of the energy inequality for a solved potential; |phi|^{p/2}
/// is evaluated as (phi^2 + delta^2)^{p/4} with delta = 1e-8 ||phi||_C0.
EnergyResult energy_inequality(const FormField& phi, const ProblemSpec& spec, double p);

/// Max pointwise relative deviation of the gradient identity
/// |grad psi|^2 = 4n (pd psi ^ pd_J psi ^ Omega_0^{n-1}) / Omega_0^n.
double gradient_identity_check(const FormField& psi);

struct LpRow {
  double p;
  double norm;  // L^p norm against the unit volume
};

struct LpTable {
  std::vector<LpRow> rows;
  double c0;        // grid maximum of |phi|
  double Q1;        // smallest constant with ||phi||_p <= Q1 (C3 p)^{-2n/p}
  double C3;        // fitted shape constant
  bool monotone;    // rows nondecreasing toward c0
};

/// L^p norms in log space (overflow-safe), fitted growth constants, and the
/// monotone approach to the C0 norm.
LpTable lp_growth_table(const FormField& phi, int n, const MoserParameters& params);

struct SweepRow {
  double amplitude;
  int N;
  double f_c0;
  double phi_c0;
  bool solved;
  std::string status;
};

/// Solves the family f = amplitude * base_mode at each grid resolution and
/// tabulates ||phi||_C0; solver failures are recorded, not fatal.
std::vector<SweepRow> c0_bound_sweep(int n, uint32_t active_mask,
                                     const std::vector<double>& amplitudes,
                                     const std::vector<int>& grid_sizes);

struct PoincareResult {
  double spectral_constant;  // exact: 1/(2 pi) on the unit torus
  double max_sample_ratio;   // max ||psi||_2 / ||grad psi||_2 over samples
};

/// Exact first nonzero Laplace eigenvalue via the Fourier symbol, plus the
/// inequality ||psi||_2 <= C ||grad psi||_2 on random mean-zero fields.
PoincareResult poincare_check(const TorusGrid& grid, int samples, std::mt19937_64& rng);

}  // namespace hkt
