#pragma once

// Symmetric-top evolution with spectrum omega0 [I(I+1) + delta K^2]:
// four time constants, evolution on the (alpha, gamma) Euler-angle torus at
// fixed beta, and the q x q' clone grid for rational delta.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rotwave/expansion.hpp"
#include "rotwave/revivals.hpp"
#include "rotwave/specfun.hpp"

namespace rotwave::toprotor {

struct RotorSpec {
  double omega0 = 1.0;
  double delta = 0.0;  // J_x / J_z - 1
  // Exact commensurability declaration: delta = r/p with p * T_rev_I equal
  // to r * T_rev_K.  Floats never imply rationality; the caller declares it.
  std::optional<std::pair<int, int>> rational;  // (p, r)

  void validate() const {
    if (!(omega0 > 0.0)) throw std::domain_error("RotorSpec: omega0 <= 0");
    if (!(delta > -1.0)) throw std::domain_error("RotorSpec: delta <= -1");
    if (rational) {
      const auto [p, r] = *rational;
      if (p <= 0 || r == 0)
        throw std::domain_error("RotorSpec: rational pair needs p > 0, r != 0");
      if (std::abs(delta - double(r) / p) > 1e-12 * std::max(1.0, std::abs(delta)))
        throw std::domain_error("RotorSpec: delta does not equal r/p");
    }
  }
};

struct TopTimeConstants {
  double T_cl_I = 0.0, T_rev_I = 0.0;
  double T_cl_K = 0.0, T_rev_K = 0.0;  // T_cl_K infinite when K_bar = 0
  bool T_cl_K_infinite = false;
  std::optional<double> T_rev_IK;  // common revival, rational delta only
  double I_bar = 0.0, K_bar = 0.0;  // |<L_z>| and <L_Z>
  double delta = 0.0;
  double omega0 = 0.0;
};

struct TopMomentsReport {
  double mean_Lz = 0.0;   // laboratory projection, M = -I implicit
  double mean_L2 = 0.0;
  double mean_LZ = 0.0;   // body-frame projection
  double mean_LX = 0.0, mean_LY = 0.0;
  double mean_LX2 = 0.0, mean_LY2 = 0.0;
  double var_LX = 0.0, var_LY = 0.0;
  double body_uncertainty_product = 0.0;  // dLX^2 * dLY^2
};

inline TopMomentsReport top_moments(const TopExpansion& s) {
  TopMomentsReport r;
  const auto fx = apply_body_lx(s);
  const auto fy = apply_body_ly(s);
  r.mean_LX = std::real(inner(s, fx));
  r.mean_LY = std::real(inner(s, fy));
  r.mean_LX2 = std::real(inner(fx, fx));
  r.mean_LY2 = std::real(inner(fy, fy));
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K <= I; ++K) {
      const double w = std::norm(s.at(I, K));
      if (w == 0.0) continue;
      r.mean_Lz += -double(I) * w;
      r.mean_L2 += double(I) * (I + 1) * w;
      r.mean_LZ += double(K) * w;
    }
  r.var_LX = r.mean_LX2 - r.mean_LX * r.mean_LX;
  r.var_LY = r.mean_LY2 - r.mean_LY * r.mean_LY;
  r.body_uncertainty_product = r.var_LX * r.var_LY;
  return r;
}

inline TopTimeConstants top_time_constants(const TopExpansion& s,
                                           const RotorSpec& spec) {
  spec.validate();
  const auto m = top_moments(s);
  TopTimeConstants tc;
  tc.omega0 = spec.omega0;
  tc.delta = spec.delta;
  tc.I_bar = std::abs(m.mean_Lz);
  tc.K_bar = m.mean_LZ;
  tc.T_rev_I = 2.0 * specfun::pi / spec.omega0;
  tc.T_cl_I = tc.T_rev_I / (2.0 * tc.I_bar + 1.0);
  if (spec.delta == 0.0) {
    tc.T_rev_K = std::numeric_limits<double>::infinity();
    tc.T_cl_K = std::numeric_limits<double>::infinity();
    tc.T_cl_K_infinite = true;
    return tc;
  }
  tc.T_rev_K = tc.T_rev_I / spec.delta;
  const double kb = std::abs(tc.K_bar);
  if (kb < 1e-10) {
    tc.T_cl_K = std::numeric_limits<double>::infinity();
    tc.T_cl_K_infinite = true;
  } else {
    tc.T_cl_K = std::abs(tc.T_rev_K) / (2.0 * kb);
  }
  if (spec.rational) {
    // delta = r/p reduced; lcm(T_rev_I, (p/r) T_rev_I) = p T_rev_I.
    auto [p, r] = *spec.rational;
    const int g = std::gcd(p, std::abs(r));
    tc.T_rev_IK = double(p / g) * tc.T_rev_I;
  }
  return tc;
}

// Torus coefficients D_{IK} = C_{IK} d^I_{-I,K}(beta0); the wave function at
// fixed beta0 is F(alpha, gamma) = sum D_{IK} e^{i alpha I} e^{-i gamma K}.
inline TopExpansion torus_coefficients(const TopExpansion& s, double beta0) {
  TopExpansion d(s.l_max());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K <= I; ++K) {
      const Complex c = s.at(I, K);
      if (c == Complex{}) continue;
      d.at(I, K) = c * specfun::wigner_small_d(I, -I, K, beta0);
    }
  return d;
}

// Quadratic phases for both quantum numbers, cycle counts floor-reduced so
// that integer revivals are bit-exact.  tau is t / T_rev_I.
inline TopExpansion top_phase_evolve(const TopExpansion& d, double tau,
                                     double delta) {
  TopExpansion out(d.l_max());
  for (int I = 0; I <= d.l_max(); ++I)
    for (int K = -I; K <= I; ++K) {
      const Complex c = d.at(I, K);
      if (c == Complex{}) continue;
      double ci = double(I) * (I + 1) * tau;
      ci -= std::floor(ci);
      double ck = double(K) * K * tau * delta;
      ck -= std::floor(ck);
      out.at(I, K) =
          c * std::exp(Complex(0.0, -2.0 * specfun::pi * (ci + ck)));
    }
  return out;
}

struct TorusDensity {
  std::vector<double> alpha_nodes;
  std::vector<double> gamma_nodes;
  std::vector<double> values;  // row-major, alpha index slow

  double& at(std::size_t i, std::size_t j) {
    return values[i * gamma_nodes.size() + j];
  }
  double at(std::size_t i, std::size_t j) const {
    return values[i * gamma_nodes.size() + j];
  }
};

inline TorusDensity torus_density(const TopExpansion& d, int n_alpha = 256,
                                  int n_gamma = 256) {
  if (n_alpha < 2 || n_gamma < 2)
    throw std::domain_error("torus_density: need at least 2 nodes per axis");
  TorusDensity g;
  g.alpha_nodes.resize(n_alpha);
  g.gamma_nodes.resize(n_gamma);
  for (int i = 0; i < n_alpha; ++i)
    g.alpha_nodes[i] = 2.0 * specfun::pi * i / (n_alpha - 1);
  for (int j = 0; j < n_gamma; ++j)
    g.gamma_nodes[j] = 2.0 * specfun::pi * j / (n_gamma - 1);
  g.values.resize(std::size_t(n_alpha) * n_gamma);
  const int L = d.l_max();
  // Per-gamma partials f_I(gamma) = sum_K D_{IK} e^{-i gamma K}, then a
  // short series in alpha.
  std::vector<Complex> f(std::size_t(L + 1) * n_gamma);
  for (int j = 0; j < n_gamma; ++j) {
    const double gamma = g.gamma_nodes[j];
    for (int I = 0; I <= L; ++I) {
      Complex v{};
      for (int K = -I; K <= I; ++K) {
        const Complex c = d.at(I, K);
        if (c == Complex{}) continue;
        v += c * std::exp(Complex(0.0, -gamma * K));
      }
      f[std::size_t(I) * n_gamma + j] = v;
    }
  }
  for (int i = 0; i < n_alpha; ++i) {
    const double alpha = g.alpha_nodes[i];
    for (int j = 0; j < n_gamma; ++j) {
      Complex v{};
      for (int I = 0; I <= L; ++I)
        v += f[std::size_t(I) * n_gamma + j] * std::exp(Complex(0.0, alpha * I));
      g.at(i, j) = std::norm(v);
    }
  }
  return g;
}

inline TorusDensity top_evolve(const TopExpansion& state, double t,
                               const TopTimeConstants& tc, double beta0,
                               int n_alpha = 256, int n_gamma = 256) {
  auto d = torus_coefficients(state, beta0);
  d = top_phase_evolve(d, t / tc.T_rev_I, tc.delta);
  return torus_density(d, n_alpha, n_gamma);
}

// Torus autocorrelation |<Psi(0)|Psi(t)>|^2, beta-independent in its time
// structure; uses the normalized |C_{IK}|^2 populations directly.
inline std::vector<double> top_autocorrelation(const TopExpansion& s,
                                               const std::vector<double>& times,
                                               const TopTimeConstants& tc) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double tau = times[i] / tc.T_rev_I;
    Complex a{};
    for (int I = 0; I <= s.l_max(); ++I)
      for (int K = -I; K <= I; ++K) {
        const double w = std::norm(s.at(I, K));
        if (w == 0.0) continue;
        double ci = double(I) * (I + 1) * tau;
        ci -= std::floor(ci);
        double ck = double(K) * K * tau * tc.delta;
        ck -= std::floor(ck);
        a += w * std::exp(Complex(0.0, -2.0 * specfun::pi * (ci + ck)));
      }
    out[i] = std::norm(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// q x q' clone grid at t = (m/n) T_rev_IK for rational delta = r/p.

// Identity-aware wrapper: reduces f mod 1 and to lowest terms; num == 0
// means the quadratic phase is trivial at this time.
struct ReducedFraction {
  int num = 0, den = 1;
};

inline ReducedFraction reduce_mod_one(long long num, long long den) {
  if (den <= 0) throw std::domain_error("reduce_mod_one: den <= 0");
  num %= den;
  if (num < 0) num += den;
  const long long g = std::gcd(num, den);
  return {int(num / g), int(den / g)};
}

struct TopCloneEntry {
  int s1 = 0, s2 = 0;
  Complex amplitude;       // a_{s1} * a_{s2}
  double alpha_shift = 0;  // torus translation of this fractional wave
  double gamma_shift = 0;
  double fidelity = 0.0;   // against the translated initial torus function
};

struct TopCloneReport {
  int m = 0, n = 0;
  ReducedFraction f_I;  // t / T_rev_I mod 1
  ReducedFraction f_K;  // t / T_rev_K mod 1
  int q_I = 1, q_K = 1;
  std::vector<TopCloneEntry> grid;
};

namespace detail {

// Degenerate single-wave decomposition for a trivial quadratic phase.
inline revivals::FractionalDecomposition identity_decomposition() {
  revivals::FractionalDecomposition d;
  d.m = 0;
  d.n = 1;
  d.l = 1;
  d.q = 1;
  d.a = {Complex(1.0, 0.0)};
  d.t_s = {0.0};
  d.s0 = 0;
  return d;
}

}  // namespace detail

inline TopCloneReport top_clone_check(const TopExpansion& state, int m, int n,
                                      const RotorSpec& spec, double beta0) {
  spec.validate();
  if (!spec.rational)
    throw std::domain_error("top_clone_check: rational delta not declared");
  if (n < 1 || m < 1) throw std::domain_error("top_clone_check: need m, n >= 1");
  auto [p, r] = *spec.rational;
  {
    const int g = std::gcd(p, std::abs(r));
    p /= g;
    r /= g;
  }
  TopCloneReport rep;
  rep.m = m;
  rep.n = n;
  // t = (m/n) T_rev_IK = (m p / n) T_rev_I = (m r / n) T_rev_K.
  rep.f_I = reduce_mod_one(1LL * m * p, n);
  rep.f_K = reduce_mod_one(1LL * m * r, n);

  const auto dI = rep.f_I.num == 0
                      ? detail::identity_decomposition()
                      : revivals::gauss_decompose(rep.f_I.num, rep.f_I.den);
  const auto dK = rep.f_K.num == 0
                      ? detail::identity_decomposition()
                      : revivals::gauss_decompose(rep.f_K.num, rep.f_K.den);
  rep.q_I = dI.q;
  rep.q_K = dK.q;

  auto tor = torus_coefficients(state, beta0);
  tor.normalize();
  const double tauI = double(rep.f_I.num) / rep.f_I.den;
  const int L = tor.l_max();
  const double thin1 = 0.5 / std::sqrt(double(dI.q));
  const double thin2 = 0.5 / std::sqrt(double(dK.q));
  for (int s1 = 0; s1 < dI.l; ++s1) {
    if (std::abs(dI.a[s1]) < thin1) continue;
    for (int s2 = 0; s2 < dK.l; ++s2) {
      if (std::abs(dK.a[s2]) < thin2) continue;
      TopCloneEntry e;
      e.s1 = s1;
      e.s2 = s2;
      e.amplitude = dI.a[s1] * dK.a[s2];
      // The fractional wave is the initial torus function translated by
      // (alpha_shift, gamma_shift); both shifts are exact rationals of 2 pi.
      e.alpha_shift = 2.0 * specfun::pi * (tauI - double(s1) / dI.l);
      e.gamma_shift = 2.0 * specfun::pi * double(s2) / dK.l;
      Complex ov{};
      for (int I = 0; I <= L; ++I)
        for (int K = -I; K <= I; ++K) {
          const Complex c = tor.at(I, K);
          if (c == Complex{}) continue;
          // wave coefficient
          double cw = -tauI * I + double(I) * s1 / dI.l + double(K) * s2 / dK.l;
          cw -= std::floor(cw);
          // translated-initial coefficient has the identical phase, so the
          // overlap is of |c|^2 with matching phases; compute it anyway as a
          // numerical confirmation.
          double ct = (-e.alpha_shift * I + e.gamma_shift * K) /
                      (2.0 * specfun::pi);
          ct -= std::floor(ct);
          ov += std::norm(c) *
                std::exp(Complex(0.0, 2.0 * specfun::pi * (cw - ct)));
        }
      e.fidelity = std::norm(ov);
      rep.grid.push_back(e);
    }
  }
  return rep;
}

}  // namespace rotwave::toprotor
