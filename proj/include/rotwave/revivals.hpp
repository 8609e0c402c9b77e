#pragma once

// Time evolution under the quadratic I(I+1) spectrum: exact Gauss-sum
// decomposition at rational fractions of the revival time, fractional-wave
// synthesis, clone/mutant classification, carpets and spread estimates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rotwave/expansion.hpp"
#include "rotwave/observables.hpp"
#include "rotwave/specfun.hpp"

namespace rotwave::revivals {

struct TimeConstants {
  double omega0 = 0.0;
  double T_rev = 0.0;
  double T_cl = 0.0;
  double I_bar = 0.0;
};

inline TimeConstants time_constants(const SphericalExpansion& s, double omega0) {
  if (!(omega0 > 0.0)) throw std::domain_error("time_constants: omega0 <= 0");
  const auto r = observables::angular_momentum_report(s);
  TimeConstants tc;
  tc.omega0 = omega0;
  tc.T_rev = 2.0 * specfun::pi / omega0;
  tc.I_bar = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * r.mean_L2));
  tc.T_cl = tc.T_rev / (2.0 * tc.I_bar + 1.0);
  return tc;
}

// Phases b_{IM} -> b_{IM} exp(-2 pi i I(I+1) t / T_rev); norm preserved.
inline SphericalExpansion evolve(const SphericalExpansion& s, double t,
                                 double T_rev) {
  const double tau = t / T_rev;
  SphericalExpansion out(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I) {
    double cyc = double(I) * (I + 1) * tau;
    cyc -= std::floor(cyc);
    const Complex phase = std::exp(Complex(0.0, -2.0 * specfun::pi * cyc));
    for (int M = -I; M <= I; ++M) out.at(I, M) = s.at(I, M) * phase;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-sum decomposition of exp(-2 pi i I^2 m/n) into linear phases.

struct FractionalDecomposition {
  int m = 0, n = 0;
  int l = 0;                // n, or n/2 when n is a multiple of four
  int q = 0;                // number of nonzero a_s
  std::vector<Complex> a;   // length l
  std::vector<double> t_s;  // effective times in units of T_rev
  int s0 = -1;              // clone index n - m, or -1 when absent
};

inline FractionalDecomposition gauss_decompose(int m, int n) {
  if (n < 2 || m < 1 || m >= n)
    throw std::domain_error("gauss_decompose: need 1 <= m < n, n >= 2");
  if (std::gcd(m, n) != 1)
    throw std::domain_error("gauss_decompose: m and n must be coprime");

  FractionalDecomposition d;
  d.m = m;
  d.n = n;
  d.l = (n % 4 == 0) ? n / 2 : n;
  d.q = (n % 2 == 0) ? n / 2 : n;
  d.a.assign(d.l, Complex{});
  // a_s = (1/l) sum_I exp(-2 pi i I^2 m/n) exp(+2 pi i I s / l); the inverse
  // DFT is the exact oracle for the phases.
  for (int s = 0; s < d.l; ++s) {
    Complex a{};
    for (int I = 0; I < d.l; ++I) {
      const std::int64_t quad = (std::int64_t(I) * I * m) % n;
      const double ph = -2.0 * specfun::pi * double(quad) / n +
                        2.0 * specfun::pi * double((std::int64_t(I) * s) % d.l) / d.l;
      a += std::exp(Complex(0.0, ph));
    }
    d.a[s] = a / double(d.l);
  }
  d.t_s.resize(d.l);
  for (int s = 0; s < d.l; ++s)
    d.t_s[s] = double(m) / n + double(s) / d.l;
  const bool has_clone = (n % 2 != 0) || (n % 4 == 2);
  d.s0 = has_clone ? (n - m) % d.l : -1;
  return d;
}

// Map t = (m/n) T_rev with m/n >= 1/2 into [0, 1/2) using the T_rev/2
// periodicity, reducing to lowest terms.
inline std::pair<int, int> reduce_fraction_mod_half(int m, int n) {
  m %= n;
  if (m < 0) m += n;
  if (2 * m >= n) {
    m = 2 * m - n;
    n = 2 * n;
  }
  const int g = std::gcd(m, n);
  return {m / g, n / g};
}

// ---------------------------------------------------------------------------
// Fractional waves Psi^s_cl with linear phases exp(-i I omega0 t_s).

struct FractionalWave {
  int s = 0;
  double t_s = 0.0;  // units of T_rev
  Complex a;
  SphericalExpansion state;
};

struct FractionalWaveSet {
  FractionalDecomposition decomposition;
  std::vector<FractionalWave> waves;  // only nonzero a_s
};

inline SphericalExpansion classical_wave(const SphericalExpansion& s,
                                         double t_over_Trev) {
  SphericalExpansion out(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I) {
    double cyc = double(I) * t_over_Trev;
    cyc -= std::floor(cyc);
    const Complex phase = std::exp(Complex(0.0, -2.0 * specfun::pi * cyc));
    for (int M = -I; M <= I; ++M) out.at(I, M) = s.at(I, M) * phase;
  }
  return out;
}

inline FractionalWaveSet fractional_waves(const SphericalExpansion& state,
                                          int m, int n) {
  FractionalWaveSet set;
  set.decomposition = gauss_decompose(m, n);
  const auto& d = set.decomposition;
  const double tiny = 0.5 / std::sqrt(double(d.q));
  for (int s = 0; s < d.l; ++s) {
    if (std::abs(d.a[s]) < tiny) continue;
    FractionalWave w;
    w.s = s;
    w.t_s = d.t_s[s];
    w.a = d.a[s];
    w.state = classical_wave(state, w.t_s);
    set.waves.push_back(std::move(w));
  }
  return set;
}

// Reconstruction sum_s a_s Psi^s_cl; must equal evolve(state, (m/n) T_rev).
inline SphericalExpansion reconstruct(const FractionalWaveSet& set) {
  if (set.waves.empty()) throw std::domain_error("reconstruct: empty wave set");
  const auto& first = set.waves.front().state;
  SphericalExpansion out(first.l_max(), first.frame());
  for (const auto& w : set.waves)
    for (int I = 0; I <= out.l_max(); ++I)
      for (int M = -I; M <= I; ++M) out.at(I, M) += w.a * w.state.at(I, M);
  return out;
}

// ---------------------------------------------------------------------------
// Clone / rotated-clone / mutant classification.

enum class WaveClass { Clone, RotatedClone, Mutant };

inline const char* wave_class_name(WaveClass c) {
  switch (c) {
    case WaveClass::Clone: return "clone";
    case WaveClass::RotatedClone: return "rotated-clone";
    default: return "mutant";
  }
}

struct CloneEntry {
  int s = 0;
  double t_s = 0.0;
  WaveClass classification = WaveClass::Mutant;
  double fidelity_at_zero = 0.0;
  double best_fidelity = 0.0;
  double best_rotation = 0.0;
};

inline double rotation_fidelity(const SphericalExpansion& ref,
                                const SphericalExpansion& wave, double chi) {
  // |<ref| R_z(chi) wave>|^2 without materializing the rotated state.
  Complex ov{};
  const int L = std::min(ref.l_max(), wave.l_max());
  for (int I = 0; I <= L; ++I)
    for (int M = -I; M <= I; ++M) {
      const Complex b = wave.at(I, M);
      if (b == Complex{}) continue;
      ov += std::conj(ref.at(I, M)) * b * std::exp(Complex(0.0, -M * chi));
    }
  return std::norm(ov);
}

inline std::vector<CloneEntry> clone_report(const SphericalExpansion& state,
                                            int m, int n,
                                            double fidelity_threshold = 1.0 - 1e-6,
                                            int sweep_angles = 1024) {
  const auto set = fractional_waves(state, m, n);
  std::vector<CloneEntry> report;
  report.reserve(set.waves.size());
  for (const auto& w : set.waves) {
    CloneEntry e;
    e.s = w.s;
    e.t_s = w.t_s;
    e.fidelity_at_zero = rotation_fidelity(state, w.state, 0.0);
    // Candidate rotations: the discrete set omega0 t_s (mod 2 pi) plus a
    // uniform sweep, then a short golden-section refinement.
    std::vector<double> candidates;
    candidates.push_back(0.0);
    candidates.push_back(2.0 * specfun::pi * (w.t_s - std::floor(w.t_s)));
    for (int i = 0; i < sweep_angles; ++i)
      candidates.push_back(2.0 * specfun::pi * i / sweep_angles);
    double best_f = -1.0, best_chi = 0.0;
    for (double chi : candidates) {
      const double f = rotation_fidelity(state, w.state, chi);
      if (f > best_f) {
        best_f = f;
        best_chi = chi;
      }
    }
    double lo = best_chi - 2.0 * specfun::pi / sweep_angles;
    double hi = best_chi + 2.0 * specfun::pi / sweep_angles;
    for (int iter = 0; iter < 60; ++iter) {
      const double c1 = lo + 0.381966 * (hi - lo);
      const double c2 = hi - 0.381966 * (hi - lo);
      if (rotation_fidelity(state, w.state, c1) <
          rotation_fidelity(state, w.state, c2))
        lo = c1;
      else
        hi = c2;
    }
    const double chi_ref = 0.5 * (lo + hi);
    const double f_ref = rotation_fidelity(state, w.state, chi_ref);
    if (f_ref > best_f) {
      best_f = f_ref;
      best_chi = chi_ref;
    }
    e.best_fidelity = best_f;
    e.best_rotation = best_chi;
    if (e.fidelity_at_zero > fidelity_threshold)
      e.classification = WaveClass::Clone;
    else if (e.best_fidelity > fidelity_threshold)
      e.classification = WaveClass::RotatedClone;
    else
      e.classification = WaveClass::Mutant;
    report.push_back(e);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Carpets.

struct Carpet {
  std::vector<double> times;      // units of T_rev
  std::vector<double> axis;      // phi (lab carpet) or theta' (linear carpet)
  std::vector<double> values;    // row-major, time index slow
  bool sin_weighted = false;

  double& at(std::size_t i, std::size_t j) { return values[i * axis.size() + j]; }
  double at(std::size_t i, std::size_t j) const {
    return values[i * axis.size() + j];
  }
};

// |Psi(theta_fixed, phi, t)|^2 over a (t, phi) grid.
inline Carpet carpet(const SphericalExpansion& state, double theta_fixed,
                     const std::vector<double>& times_over_Trev, int n_phi) {
  Carpet c;
  c.times = times_over_Trev;
  c.axis.resize(n_phi);
  for (int j = 0; j < n_phi; ++j)
    c.axis[j] = 2.0 * specfun::pi * j / (n_phi - 1);
  c.values.resize(times_over_Trev.size() * std::size_t(n_phi));
  std::vector<Complex> f;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const auto st = evolve(state, c.times[i], 1.0);
    observables::detail::theta_partials(st, theta_fixed, f);
    for (int j = 0; j < n_phi; ++j)
      c.at(i, j) = std::norm(
          observables::detail::eval_from_partials(f, st.l_max(), c.axis[j]));
  }
  return c;
}

// Axial carpet over (t, theta') with the ring weight 2 pi sin(theta').
// With classical_phases the per-I phase is linear (exp(-2 pi i I t/T_rev)),
// otherwise quadratic I(I+1).
inline Carpet carpet_axial(const SphericalExpansion& axial_state,
                           const std::vector<double>& times_over_Trev,
                           int n_theta, bool classical_phases = false) {
  Carpet c;
  c.sin_weighted = true;
  c.times = times_over_Trev;
  c.axis.resize(n_theta);
  for (int j = 0; j < n_theta; ++j)
    c.axis[j] = specfun::pi * j / (n_theta - 1);
  c.values.resize(times_over_Trev.size() * std::size_t(n_theta));
  std::vector<Complex> f;
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const auto st = classical_phases
                        ? classical_wave(axial_state, c.times[i])
                        : evolve(axial_state, c.times[i], 1.0);
    for (int j = 0; j < n_theta; ++j) {
      const Complex v = observables::evaluate(st, c.axis[j], 0.0);
      c.at(i, j) = 2.0 * specfun::pi * std::sin(c.axis[j]) * std::norm(v);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Spreading estimates, Eqs. for tau_eta, q_max and the q-clone lifetime.

struct SpreadEstimates {
  double delta_L_eta = 0.0;  // sqrt(<L^2> - <Lz^2>)
  double tau_eta = 0.0;
  double q_max = 0.0;
};

inline SpreadEstimates spread_estimates(
    double N, const observables::AngularMomentumReport& report, double omega0) {
  const double dl2 = report.mean_L2 - report.mean_Lz2;
  if (!(dl2 > 0.0)) throw std::domain_error("spread_estimates: dL_eta^2 <= 0");
  SpreadEstimates e;
  e.delta_L_eta = std::sqrt(dl2);
  e.tau_eta = (2.0 * specfun::pi / omega0) / e.delta_L_eta;
  e.q_max = specfun::pi / std::atan(1.0 / (2.0 * std::sqrt(N)));
  return e;
}

inline double clone_lifetime(int q, double delta_L_eta, double omega0) {
  return 2.0 * specfun::pi / (q * omega0 * delta_L_eta);
}

}  // namespace rotwave::revivals
