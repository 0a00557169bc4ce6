#include "hkt/form_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hkt/fiber_context.hpp"
#include "hkt/quat_maps.hpp"
#include "hkt/simd/kernels.hpp"
#include "hkt/spectral.hpp"

namespace hkt {

namespace {

constexpr cdouble kI{0.0, 1.0};

struct Layout {
  std::vector<int> axes;     // active axes, ascending
  std::vector<long> stride;  // per active position, last fastest
  long P;
  int N;
};

Layout layout_of(const TorusGrid& g) {
  Layout L;
  L.axes = g.axes();
  L.N = g.N;
  L.P = g.points();
  const int d = static_cast<int>(L.axes.size());
  L.stride.assign(d, 1);
  for (int j = d - 2; j >= 0; --j) L.stride[j] = L.stride[j + 1] * g.N;
  return L;
}

int active_pos(const Layout& L, int axis) {
  for (size_t j = 0; j < L.axes.size(); ++j)
    if (L.axes[j] == axis) return static_cast<int>(j);
  return -1;
}

// Derivative frequency: signed, with the Nyquist mode zeroed.
inline int dfreq(long idx, const Layout& L, int pos) {
  if (pos < 0) return 0;
  const int i = static_cast<int>((idx / L.stride[pos]) % L.N);
  return (i == L.N / 2) ? 0 : grid_freq(i, L.N);
}

// Multiply a Fourier-space array by the symbol of d/dz_c (or d/dzbar_c).
void mul_holomorphic_symbol(Eigen::VectorXcd& F, const TorusGrid& g, const Layout& L, int c,
                            bool bar) {
  const int A = 4 * (c / 2) + 2 * (c % 2);
  const double s = (c % 2 == 0) ? 1.0 : -1.0;
  const double sb = bar ? -s : s;
  const int pa = active_pos(L, A);
  const int pb = active_pos(L, A + 1);
  const double pi = std::numbers::pi;
  for (long idx = 0; idx < L.P; ++idx) {
    const int ka = dfreq(idx, L, pa);
    const int kb = dfreq(idx, L, pb);
    F[idx] *= pi * cdouble(sb * kb, ka);
  }
  (void)g;
}

void mul_axis_symbol(Eigen::VectorXcd& F, const Layout& L, int axis) {
  const int p = active_pos(L, axis);
  if (p < 0) {
    F.setZero();
    return;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  for (long idx = 0; idx < L.P; ++idx) F[idx] *= cdouble(0.0, two_pi * dfreq(idx, L, p));
}

bool zero_symbol(const Layout& L, int c) {
  const int A = 4 * (c / 2) + 2 * (c % 2);
  return active_pos(L, A) < 0 && active_pos(L, A + 1) < 0;
}

// Dolbeault-type differential: wedge frame covector 2c+parity with the
// corresponding z-derivative of every component.
FormField dolbeault(const FormField& field, bool bar) {
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  FormField out = zero_field(field.grid, field.degree + 1);
  if (field.constant || field.grid.dim() == 0 || field.degree + 1 > ctx.frame_dim) {
    out.constant = field.constant;
    return out;
  }
  const Layout L = layout_of(field.grid);
  Spectral& fft = Spectral::get(static_cast<int>(L.axes.size()), L.N);
  for (const auto& [rank, values] : field.comps) {
    const uint32_t mask = ctx.idx.mask_of(field.degree, rank);
    Eigen::VectorXcd F = values;
    fft.forward(F);
    for (int c = 0; c < ctx.hol_dim; ++c) {
      const int f = 2 * c + (bar ? 1 : 0);
      if (mask & (1u << f)) continue;
      if (zero_symbol(L, c)) continue;
      Eigen::VectorXcd W = F;
      mul_holomorphic_symbol(W, field.grid, L, c, bar);
      fft.backward(W);
      const double sign = IndexTables::merge_sign(1u << f, mask);
      simd::kernels().axpy(out.component(ctx.idx.rank_of(mask | (1u << f))).data(), sign, W.data(),
                           static_cast<size_t>(L.P));
    }
  }
  return out;
}

// (rank, sign) pairs describing conj_form on the basis, cached per degree.
const std::vector<std::pair<int, double>>& conj_table(int n, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_pair(n, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const FiberContext& ctx = FiberContext::get(n);
  std::vector<std::pair<int, double>> table(ctx.idx.dim(degree));
  for (int r = 0; r < ctx.idx.dim(degree); ++r) {
    FiberForm unit{n, degree, Eigen::VectorXcd::Zero(ctx.idx.dim(degree))};
    unit.coeffs[r] = 1.0;
    FiberForm c = conj_form(unit);
    int rc = 0;
    double best = 0;
    for (int j = 0; j < c.coeffs.size(); ++j)
      if (std::abs(c.coeffs[j]) > best) {
        best = std::abs(c.coeffs[j]);
        rc = j;
      }
    table[r] = {rc, c.coeffs[rc].real()};
  }
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

const Eigen::VectorXcd* FormField::find(int rank) const {
  auto it = std::lower_bound(comps.begin(), comps.end(), rank,
                             [](const auto& a, int r) { return a.first < r; });
  return (it != comps.end() && it->first == rank) ? &it->second : nullptr;
}

Eigen::VectorXcd& FormField::component(int rank) {
  auto it = std::lower_bound(comps.begin(), comps.end(), rank,
                             [](const auto& a, int r) { return a.first < r; });
  if (it == comps.end() || it->first != rank)
    it = comps.insert(it, {rank, Eigen::VectorXcd::Zero(grid.points())});
  return it->second;
}

double FormField::norm() const {
  double acc = 0.0;
  for (const auto& [rank, values] : comps)
    acc += simd::kernels().sum_abs2(values.data(), values.size());
  return std::sqrt(acc / static_cast<double>(grid.points()));
}

double FormField::max_abs() const {
  double m = 0.0;
  for (const auto& [rank, values] : comps) m = std::max(m, values.cwiseAbs().maxCoeff());
  return m;
}

FormField& FormField::operator+=(const FormField& o) {
  if (grid != o.grid || degree != o.degree) throw std::invalid_argument("field +=: mismatch");
  for (const auto& [rank, values] : o.comps)
    simd::kernels().axpy(component(rank).data(), 1.0, values.data(), values.size());
  constant = constant && o.constant;
  return *this;
}

FormField& FormField::operator-=(const FormField& o) {
  if (grid != o.grid || degree != o.degree) throw std::invalid_argument("field -=: mismatch");
  for (const auto& [rank, values] : o.comps)
    simd::kernels().axpy(component(rank).data(), -1.0, values.data(), values.size());
  constant = constant && o.constant;
  return *this;
}

FormField& FormField::operator*=(cdouble s) {
  for (auto& [rank, values] : comps) simd::kernels().scale(values.data(), s, values.size());
  return *this;
}

FormField zero_field(const TorusGrid& grid, int degree) {
  FormField f;
  f.grid = grid;
  f.degree = degree;
  return f;
}

FormField constant_field(const TorusGrid& grid, const FiberForm& fiber) {
  if (fiber.n != grid.n) throw std::invalid_argument("constant_field: fiber dimension mismatch");
  FormField f = zero_field(grid, fiber.degree);
  f.constant = true;
  for (int r = 0; r < fiber.coeffs.size(); ++r)
    if (fiber.coeffs[r] != 0.0) f.component(r).setConstant(fiber.coeffs[r]);
  return f;
}

FormField scalar_field(const TorusGrid& grid, Eigen::VectorXcd values) {
  if (values.size() != grid.points()) throw std::invalid_argument("scalar_field: size mismatch");
  FormField f = zero_field(grid, 0);
  f.comps.push_back({0, std::move(values)});
  return f;
}

FiberForm fiber_at(const FormField& field, long point) {
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  FiberForm out{field.grid.n, field.degree, Eigen::VectorXcd::Zero(ctx.idx.dim(field.degree))};
  for (const auto& [rank, values] : field.comps) out.coeffs[rank] = values[point];
  return out;
}

FiberForm mean_fiber(const FormField& field) {
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  FiberForm out{field.grid.n, field.degree, Eigen::VectorXcd::Zero(ctx.idx.dim(field.degree))};
  const double P = static_cast<double>(field.grid.points());
  for (const auto& [rank, values] : field.comps)
    out.coeffs[rank] = simd::kernels().sum(values.data(), values.size()) / P;
  return out;
}

Eigen::VectorXcd& scalar_values(FormField& field) {
  if (field.degree != 0) throw std::invalid_argument("scalar_values: degree must be 0");
  return field.component(0);
}

const Eigen::VectorXcd& scalar_values(const FormField& field) {
  static const Eigen::VectorXcd empty;
  if (field.degree != 0) throw std::invalid_argument("scalar_values: degree must be 0");
  const Eigen::VectorXcd* v = field.find(0);
  return v ? *v : empty;
}

Eigen::VectorXd grid_coordinates(const TorusGrid& grid, int axis) {
  const Layout L = layout_of(grid);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.P);
  const int p = active_pos(L, axis);
  if (p < 0) return x;
  for (long idx = 0; idx < L.P; ++idx)
    x[idx] = static_cast<double>((idx / L.stride[p]) % L.N) / L.N;
  return x;
}

FormField mode_scalar_field(const TorusGrid& grid, const std::vector<int>& k, double amplitude,
                            double phase) {
  if (static_cast<int>(k.size()) != 4 * grid.n)
    throw std::invalid_argument("mode_scalar_field: wave vector must have 4n entries");
  const Layout L = layout_of(grid);
  Eigen::VectorXd arg = Eigen::VectorXd::Constant(L.P, phase);
  bool flat = true;
  for (int m = 0; m < 4 * grid.n; ++m) {
    if (k[m] == 0) continue;
    if (!grid.axis_active(m))
      throw std::invalid_argument("mode_scalar_field: nonzero wave number on inactive axis");
    if (std::abs(k[m]) > grid.N / 3)
      throw std::invalid_argument("mode_scalar_field: wave number outside the dealiased band");
    arg += (2.0 * std::numbers::pi * k[m]) * grid_coordinates(grid, m);
    flat = false;
  }
  FormField f = scalar_field(grid, (amplitude * arg.array().cos()).cast<cdouble>());
  f.constant = flat;
  return f;
}

FormField apply_fiber_linear(const Eigen::MatrixXcd& M, const FormField& field) {
  FormField out = zero_field(field.grid, field.degree);
  out.constant = field.constant;
  for (const auto& [rank, values] : field.comps)
    for (int ro = 0; ro < M.rows(); ++ro) {
      const cdouble m = M(ro, rank);
      if (m == 0.0) continue;
      simd::kernels().axpy(out.component(ro).data(), m, values.data(), values.size());
    }
  return out;
}

FormField conj_field(const FormField& field) {
  const auto& table = conj_table(field.grid.n, field.degree);
  FormField out = zero_field(field.grid, field.degree);
  out.constant = field.constant;
  for (const auto& [rank, values] : field.comps) {
    auto [rc, sign] = table[rank];
    out.component(rc) += sign * values.conjugate();
  }
  return out;
}

FormField extend_J_field(const FormField& field) {
  if (field.degree == 0) return field;
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  return apply_fiber_linear(ctx.mult_matrix(FiberContext::L_J, field.degree), field);
}

FormField project_plus_field(const FormField& field) {
  if (field.degree == 0) return field;
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  return apply_fiber_linear(ctx.plus_projector(field.degree), field);
}

FormField R_field(const FormField& field) {
  if (field.degree == 0) return field;
  return apply_fiber_linear(R_full_matrix(field.grid.n, field.degree), field);
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(cdouble s, FormField a) { return a *= s; }

FormField pd(const FormField& field) { return dolbeault(field, false); }
FormField dbar(const FormField& field) { return dolbeault(field, true); }

FormField d(const FormField& field) {
  FormField out = pd(field);
  out += dbar(field);
  return out;
}

FormField pd_J(const FormField& field) {
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  for (const auto& [rank, values] : field.comps) {
    auto [p, q] = IndexTables::bidegree_of(ctx.idx.mask_of(field.degree, rank));
    if (q != 0) throw std::invalid_argument("pd_J: input must have bidegree (p,0)");
  }
  FormField j = extend_J_field(field);
  FormField dj = dbar(j);
  FormField out = extend_J_field(dj);
  // invert J on degree p+1: J^2 = (-1)^(p+1)
  if ((field.degree + 1) % 2 != 0) out *= -1.0;
  return out;
}

FormField d_plus(const FormField& field) {
  if (field.degree > 2 * field.grid.n - 1)
    throw std::invalid_argument("d_plus: degree must be < 2n");
  return project_plus_field(d(field));
}

void dealias(FormField& field) {
  if (field.constant || field.grid.dim() == 0) return;
  const Layout L = layout_of(field.grid);
  Spectral& fft = Spectral::get(static_cast<int>(L.axes.size()), L.N);
  const int keep = L.N / 3;
  for (auto& [rank, values] : field.comps) {
    fft.forward(values);
    for (long idx = 0; idx < L.P; ++idx)
      for (size_t p = 0; p < L.stride.size(); ++p) {
        const int k = grid_freq(static_cast<int>((idx / L.stride[p]) % L.N), L.N);
        if (std::abs(k) > keep) {
          values[idx] = 0.0;
          break;
        }
      }
    fft.backward(values);
  }
}

FormField wedge_field(const FormField& a, const FormField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("wedge_field: grid mismatch");
  const FiberContext& ctx = FiberContext::get(a.grid.n);
  const int k = a.degree + b.degree;
  FormField out = zero_field(a.grid, k);
  out.constant = a.constant && b.constant;
  if (k > ctx.frame_dim) return out;
  const size_t P = static_cast<size_t>(a.grid.points());
  for (const auto& e : ctx.wedge_table(a.degree, b.degree)) {
    const Eigen::VectorXcd* va = a.find(e.r1);
    if (!va) continue;
    const Eigen::VectorXcd* vb = b.find(e.r2);
    if (!vb) continue;
    simd::kernels().cmul_acc(out.component(e.rout).data(), va->data(), vb->data(), e.sign, P);
  }
  if (!a.constant && !b.constant) dealias(out);
  return out;
}

cdouble integrate(const FormField& top) {
  if (top.degree != 4 * top.grid.n) throw std::invalid_argument("integrate: not top degree");
  return top_coefficient(mean_fiber(top));
}

double imag_drift(const FormField& field) {
  double m = 0.0;
  for (const auto& [rank, values] : field.comps)
    m = std::max(m, values.imag().cwiseAbs().maxCoeff());
  return m;
}

void force_real(FormField& field) {
  for (auto& [rank, values] : field.comps) values = values.real().cast<cdouble>();
}

std::pair<FormField, FormField> grad_norm_identity(const FormField& psi) {
  const TorusGrid& g = psi.grid;
  const int n = g.n;
  const FiberContext& ctx = FiberContext::get(n);
  const Layout L = layout_of(g);

  FormField lhs = zero_field(g, 0);
  Eigen::VectorXcd& lv = lhs.component(0);
  if (g.dim() > 0 && !psi.constant && psi.find(0)) {
    Spectral& fft = Spectral::get(g.dim(), g.N);
    Eigen::VectorXcd F = *psi.find(0);
    fft.forward(F);
    for (int m = 0; m < 4 * n; ++m) {
      if (!g.axis_active(m)) continue;
      Eigen::VectorXcd W = F;
      mul_axis_symbol(W, L, m);
      fft.backward(W);
      lv.array() += W.array().real().square();
    }
  }

  FiberForm omega0 = hkt_fiber(standard_structure(n));
  FiberForm omega_pow = unit_scalar(n);
  for (int i = 0; i < n - 1; ++i) omega_pow = wedge(omega_pow, omega0);
  FiberForm omega_n = wedge(omega_pow, omega0);
  const int top_rank = ctx.block(2 * n, 0)[0];

  FormField t = wedge_field(wedge_field(pd(psi), pd_J(psi)), constant_field(g, omega_pow));
  FormField rhs = zero_field(g, 0);
  Eigen::VectorXcd& rv = rhs.component(0);
  if (const Eigen::VectorXcd* tv = t.find(top_rank))
    rv = (4.0 * n / omega_n.coeffs[top_rank]) * (*tv);
  return {lhs, rhs};
}

}  // namespace hkt
