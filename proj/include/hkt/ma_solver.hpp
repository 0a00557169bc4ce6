#pragma once

#include <string>
#include <vector>

#include "hkt/form_field.hpp"
#include "hkt/quat_maps.hpp"

namespace hkt {

/// A fully assembled instance of the quaternionic Monge-Ampere problem
/// (Omega_0 + pd pd_J phi)^n = A e^f Omega_0^n on the flat torus.
struct ProblemSpec {
  TorusGrid grid;
  FiberForm omega0;  // flat HKT fiber, q-real and strongly q-positive
  ThetaForm theta;
  PhiForm phi_form;
  FormField f;  // real scalar data
  bool calibrate_A = true;
};

/// Builds the standard flat instance for the given data. When calibrate_A is
/// false the data must satisfy the zero-mean compatibility condition
/// int (e^f - 1) Omega_0^n ^ conj(Theta) = 0; a violation throws.
ProblemSpec make_problem(const TorusGrid& grid, FormField f, bool calibrate_A,
                         double necessary_tol = 1e-8);

struct SolveState {
  FormField phi;  // real scalar potential, volume-mean zero
  double A = 1.0;
  // L2 norm of the band-limited residual density relative to ||A e^f||; the
  // discrete model lives on the dealiased band, so this is the solvable part
  double residual_norm = 0.0;
  int newton_iter = 0;
  double min_positivity_margin = 0.0;
};

enum class SolveStatus { converged, cone_exit, linear_solve_failure, max_iter_exceeded };

struct IterRecord {
  int iter;
  double residual;
  double A;
  double margin;
  double step;
};

struct SolveOptions {
  double tol = 1e-10;  // relative residual target
  int max_newton = 50;
  int max_krylov = 400;
};

struct SolveResult {
  SolveStatus status = SolveStatus::converged;
  SolveState state;
  std::vector<IterRecord> trace;
};

const char* to_string(SolveStatus s);

/// The twisted Hessian pd(pd_J(phi)) as a (2,0)-field.
FormField hessian_form(const FormField& phi);
/// Omega_0 + pd pd_J phi.
FormField omega_phi(const FormField& phi, const ProblemSpec& spec);

/// (Omega_0 + pd pd_J phi)^n - A e^f Omega_0^n as a (2n,0)-field.
FormField residual_quat(const FormField& phi, double A, const ProblemSpec& spec);
/// The same residual as a real scalar density relative to Omega_0^n.
FormField residual_density(const FormField& phi, double A, const ProblemSpec& spec);
/// (omega_I - sqrt(-1) pd dbar phi)^n ^ Phi - A e^f omega_I^n ^ Phi, top degree.
FormField residual_hessian(const FormField& phi, double A, const ProblemSpec& spec);

/// Scalar density (relative to the unit volume) of a (4n)-degree field.
FormField top_density(const FormField& top);
/// Scalar density of a (2n,0)-field relative to Omega_0^n.
FormField quat_density(const FormField& f20, const ProblemSpec& spec);

/// Relative deviation between the first reformulation
/// (omega_I - sqrt(-1) pd dbar phi)^n ^ P_+(omega_I^n) = A e^f (...) and
/// residual_quat, after scaling both into the same normalization.
double first_reformulation_check(const FormField& phi, double A, const ProblemSpec& spec);

/// A = int Omega_phi^n ^ conj(Theta) / int e^f Omega_0^n ^ conj(Theta).
double calibrate_A(const FormField& phi, const ProblemSpec& spec);

/// int (e^f - 1) Omega_0^n ^ conj(Theta): must vanish for solvability.
double necessary_condition_value(const FormField& f, const ProblemSpec& spec);

/// Scalar density of n pd pd_J psi ^ Omega_phi^{n-1} relative to Omega_0^n:
/// the linearization of the Monge-Ampere density at phi.
FormField linearized_operator(const FormField& psi, const FormField& phi,
                              const ProblemSpec& spec);

/// Smallest eigenvalue over the grid of the quadratic form of Omega_phi.
double min_positivity_margin(const FormField& phi, const ProblemSpec& spec);

/// Subtracts the volume mean in place (the constant-kernel normalization).
void normalize_potential(FormField& phi);

/// Damped Newton-Krylov iteration; phi0 defaults to zero when empty.
SolveResult newton_solve(const ProblemSpec& spec, const FormField& phi0, SolveOptions opts = {});
SolveResult newton_solve(const ProblemSpec& spec, SolveOptions opts = {});

/// Max pairwise C0 deviation of solves started from each init.
double uniqueness_probe(const ProblemSpec& spec, const std::vector<FormField>& inits,
                        SolveOptions opts = {});

/// Data f := log((Omega_0 + pd pd_J target)^n / Omega_0^n) manufactured so
/// that `target` solves the equation with A = 1.
FormField manufactured_f(const FormField& target, const TorusGrid& grid);

}  // namespace hkt
