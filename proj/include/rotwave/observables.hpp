#pragma once

// Expectation values, uncertainty products, density grids and
// autocorrelation functions.  Moments are exact bilinear forms on the
// coefficients (no quadrature); grids sum the expansion per node with a
// fixed order, so results are deterministic.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rotwave/expansion.hpp"
#include "rotwave/specfun.hpp"

namespace rotwave::observables {

struct AngularMomentumReport {
  double mean_Lx = 0.0, mean_Ly = 0.0, mean_Lz = 0.0;
  double mean_Lx2 = 0.0, mean_Ly2 = 0.0, mean_Lz2 = 0.0, mean_L2 = 0.0;
  double var_Lx = 0.0, var_Ly = 0.0;
  double uncertainty_product = 0.0;  // dLx^2 * dLy^2
  double lz_bound = 0.0;             // <Lz>^2 / 4
};

inline AngularMomentumReport angular_momentum_report(const SphericalExpansion& s) {
  AngularMomentumReport r;
  const auto fx = apply_lx(s);
  const auto fy = apply_ly(s);
  r.mean_Lx = std::real(inner(s, fx));
  r.mean_Ly = std::real(inner(s, fy));
  r.mean_Lx2 = std::real(inner(fx, fx));
  r.mean_Ly2 = std::real(inner(fy, fy));
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M) {
      const double w = std::norm(s.at(I, M));
      if (w == 0.0) continue;
      r.mean_Lz += M * w;
      r.mean_Lz2 += double(M) * M * w;
      r.mean_L2 += double(I) * (I + 1) * w;
    }
  r.var_Lx = r.mean_Lx2 - r.mean_Lx * r.mean_Lx;
  r.var_Ly = r.mean_Ly2 - r.mean_Ly * r.mean_Ly;
  r.uncertainty_product = r.var_Lx * r.var_Ly;
  r.lz_bound = 0.25 * r.mean_Lz * r.mean_Lz;
  return r;
}

struct UncertaintyCheck {
  double product;
  double bound;
  bool satisfied;
};

inline UncertaintyCheck uncertainty_check(const SphericalExpansion& s) {
  const auto r = angular_momentum_report(s);
  UncertaintyCheck c{r.uncertainty_product, r.lz_bound, false};
  c.satisfied = std::abs(c.product - c.bound) <= 1e-8 * std::max(1.0, c.bound);
  return c;
}

// ---------------------------------------------------------------------------
// Probability density on a (theta, phi) grid.

struct GridDensity {
  std::vector<double> theta_nodes;
  std::vector<double> phi_nodes;
  std::vector<double> values;  // row-major, theta index slow
  Frame frame = Frame::Lab;
  bool sin_weighted = false;  // values scaled by 2*pi*sin(theta)

  double& at(std::size_t i, std::size_t j) {
    return values[i * phi_nodes.size() + j];
  }
  double at(std::size_t i, std::size_t j) const {
    return values[i * phi_nodes.size() + j];
  }
};

namespace detail {

// Per-theta partial sums f_M(theta) = sum_I b_{IM} Pbar_I^M; the phi
// dependence is then a short Fourier series.
inline void theta_partials(const SphericalExpansion& s, double theta,
                           std::vector<Complex>& f) {
  const int L = s.l_max();
  static thread_local std::vector<double> pbar;
  specfun::legendre_bar_table(L, std::cos(theta), std::sin(theta), pbar);
  auto pidx = [](int l, int m) { return l * (l + 1) / 2 + m; };
  f.assign(2 * L + 1, Complex{});
  for (int I = 0; I <= L; ++I)
    for (int M = -I; M <= I; ++M) {
      const Complex b = s.at(I, M);
      if (b == Complex{}) continue;
      const int ma = std::abs(M);
      double p = pbar[pidx(I, ma)];
      if (M < 0 && ma % 2 != 0) p = -p;
      f[M + L] += b * p;
    }
}

inline Complex eval_from_partials(const std::vector<Complex>& f, int L,
                                  double phi) {
  Complex v{};
  for (int M = -L; M <= L; ++M)
    v += f[M + L] * std::exp(Complex(0.0, M * phi));
  return v;
}

}  // namespace detail

inline Complex evaluate(const SphericalExpansion& s, double theta, double phi) {
  std::vector<Complex> f;
  detail::theta_partials(s, theta, f);
  return detail::eval_from_partials(f, s.l_max(), phi);
}

inline GridDensity density_grid(const SphericalExpansion& s, int n_theta,
                                int n_phi, bool sin_weighted = false) {
  if (n_theta < 2 || n_phi < 2)
    throw std::domain_error("density_grid: need at least 2 nodes per axis");
  GridDensity g;
  g.frame = s.frame();
  g.sin_weighted = sin_weighted;
  g.theta_nodes.resize(n_theta);
  g.phi_nodes.resize(n_phi);
  for (int i = 0; i < n_theta; ++i)
    g.theta_nodes[i] = specfun::pi * i / (n_theta - 1);
  for (int j = 0; j < n_phi; ++j)
    g.phi_nodes[j] = 2.0 * specfun::pi * j / (n_phi - 1);
  g.values.resize(std::size_t(n_theta) * n_phi);
  std::vector<Complex> f;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = g.theta_nodes[i];
    detail::theta_partials(s, theta, f);
    const double w = sin_weighted ? 2.0 * specfun::pi * std::sin(theta) : 1.0;
    for (int j = 0; j < n_phi; ++j) {
      const Complex v = detail::eval_from_partials(f, s.l_max(), g.phi_nodes[j]);
      g.at(i, j) = w * std::norm(v);
    }
  }
  return g;
}

// Gauss-Legendre x uniform-phi quadrature of the density; equals the state
// norm (1 for normalized states) up to truncation of the rule.
inline double sphere_norm_quadrature(const SphericalExpansion& s,
                                     int n_gl = 64, int n_phi = 128) {
  const auto rule = specfun::gauss_legendre(n_gl);
  double total = 0.0;
  std::vector<Complex> f;
  for (int i = 0; i < n_gl; ++i) {
    const double theta = std::acos(rule.nodes[i]);
    detail::theta_partials(s, theta, f);
    double ring = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * specfun::pi * j / n_phi;
      ring += std::norm(detail::eval_from_partials(f, s.l_max(), phi));
    }
    total += rule.weights[i] * ring * 2.0 * specfun::pi / n_phi;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Autocorrelation |<Psi(0)|Psi(t)>|^2 under the I(I+1) spectrum.

inline std::vector<double> autocorrelation(const SphericalExpansion& s,
                                           const std::vector<double>& times,
                                           double T_rev) {
  // Collapse onto per-I populations first.
  std::vector<double> pop(s.l_max() + 1, 0.0);
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M) pop[I] += std::norm(s.at(I, M));
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double tau = times[i] / T_rev;
    Complex a{};
    for (int I = 0; I <= s.l_max(); ++I) {
      if (pop[I] == 0.0) continue;
      // Reduce the cycle count before multiplying by 2*pi so that exact
      // half-revivals come out bit-exact.
      double cyc = double(I) * (I + 1) * tau;
      cyc -= std::floor(cyc);
      a += pop[I] * std::exp(Complex(0.0, -2.0 * specfun::pi * cyc));
    }
    out[i] = std::norm(a);
  }
  return out;
}

inline std::vector<double> uniform_times(double t_max, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t_max * i / (n - 1);
  return t;
}

}  // namespace rotwave::observables
