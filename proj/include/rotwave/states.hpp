#pragma once

// Builders for the coherent-state families.  All factorial- and power-
// bearing series are accumulated in log space with separate sign tracking;
// the returned expansions are normalized.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rotwave/expansion.hpp"
#include "rotwave/specfun.hpp"

namespace rotwave::states {

inline constexpr int hard_l_cap = 512;

struct ExponentialSpec {
  double N = 0.0;   // concentration parameter, > 0
  double eta = 0.0; // anisotropy parameter, any finite real
};

struct GaussianSeedSpec {
  double N = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;  // epsilon = 0 reduces to ExponentialSpec
};

struct BosonSpec {
  double k = 0.0;             // alpha_+ after the axis choice, > 0
  int two_s = 1;              // spin as 2s (1 = spin one half)
  bool integer_truncated = false;
};

struct TopSpec {
  double r = 0.0;       // > 0
  double lambda = 0.0;  // [0, pi]
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double neglected)
      : std::runtime_error(what), neglected_weight(neglected) {}
  double neglected_weight;
};

namespace detail {

// Signed log-magnitude accumulator: sum of terms sign*exp(log) without
// ever materializing the unscaled values.
struct LogAccumulator {
  double scale = -1e308;  // log of the scaling reference
  double acc = 0.0;       // sum / exp(scale)

  void add(double log_abs, double sign) {
    if (sign == 0.0 || log_abs == -1e308) return;
    if (log_abs > scale) {
      acc *= std::exp(scale - log_abs);
      scale = log_abs;
    }
    acc += sign * std::exp(log_abs - scale);
  }

  bool empty() const { return acc == 0.0; }
  double log_abs() const { return scale + std::log(std::abs(acc)); }
  double sign() const { return acc > 0 ? 1.0 : (acc < 0 ? -1.0 : 0.0); }
};

inline double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// Double-double arithmetic, enough precision to survive the alternating
// partial-wave series whose terms cancel by a factor growing like exp(N).
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD dd_two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD dd_add(const DD& a, const DD& b) {
  const DD s = dd_two_sum(a.hi, b.hi);
  return dd_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_mul(const DD& a, double b) {
  const double p = a.hi * b;
  const double e = std::fma(a.hi, b, -p) + a.lo * b;
  return dd_two_sum(p, e);
}

inline DD dd_div(const DD& a, double b) {
  const double q1 = a.hi / b;
  const double p = q1 * b;
  const double e = std::fma(q1, b, -p);
  return dd_two_sum(q1, ((a.hi - p) - e + a.lo) / b);
}

// log(|x|^p) with 0^0 = 1 handled; returns false when the factor is zero.
inline bool log_pow(double x, int p, double& log_out, double& sign_out) {
  if (p == 0) {
    log_out = 0.0;
    sign_out = 1.0;
    return true;
  }
  if (x == 0.0) return false;
  log_out = p * std::log(std::abs(x));
  sign_out = (x < 0.0 && p % 2 != 0) ? -1.0 : 1.0;
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single intelligent harmonic Y^l_eta expanded over Y^l_m.

inline SphericalExpansion intelligent_harmonic(int l, double eta) {
  if (l < 0) throw std::domain_error("intelligent_harmonic: l < 0");
  SphericalExpansion out(l);
  if (l == 0) {
    out.at(0, 0) = 1.0;
    return out;
  }
  if (eta == 1.0 || eta == -1.0) {
    out.at(l, eta > 0 ? l : -l) = 1.0;
    return out;
  }

  // Recurrence C_{m+1} = -C_{m-1} (1+eta)/(1-eta)
  //            * sqrt((l(l+1)-m(m-1))/(l(l+1)-m(m+1)))
  // run in log space from m = -l upward in steps of two.
  const double rho = (1.0 + eta) / (1.0 - eta);
  const int n_coeff = l + 1;  // m = -l, -l+2, ..., l
  std::vector<double> logs(n_coeff), signs(n_coeff);
  logs[0] = 0.0;
  double start_sign = (l % 2 == 0) ? 1.0 : -1.0;
  if ((1.0 - eta) < 0.0 && l % 2 != 0) start_sign = -start_sign;
  signs[0] = start_sign;
  const double ll1 = double(l) * (l + 1);
  for (int i = 1; i < n_coeff; ++i) {
    const int m = -l + 2 * i - 1;  // recurrence midpoint
    const double num = ll1 - double(m) * (m - 1);
    const double den = ll1 - double(m) * (m + 1);
    logs[i] = logs[i - 1] + std::log(std::abs(rho)) + 0.5 * std::log(num / den);
    signs[i] = -signs[i - 1] * detail::sign_of(rho);
  }
  const double log_max = *std::max_element(logs.begin(), logs.end());
  double norm = 0.0;
  for (int i = 0; i < n_coeff; ++i) {
    const double v = signs[i] * std::exp(logs[i] - log_max);
    out.at(l, -l + 2 * i) = v;
    norm += v * v;
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (int i = 0; i < n_coeff; ++i) out.at(l, -l + 2 * i) *= inv;
  return out;
}

// ---------------------------------------------------------------------------
// Exponential coherent wave packet, partial-wave weights of the double sum
//   b_{IM} ~ sum_{l-l'=M} (-1)^{l'} x+^l x-^{l'} / sqrt((2l)!(2l')!)
//            * <l l' 0 0|I 0> <l l' l -l'|I M> / sqrt(2I+1)
// with x+- = N(1 +- eta), reorganized per (I, M) over S = l + l'.

namespace detail {

struct LogCoeff {
  double log_abs = -1e308;
  double sign = 0.0;
};

inline LogCoeff exponential_bim(double N, double eta, int I, int M) {
  const auto& lf = specfun::factorial_table();
  const double xp = N * (1.0 + eta);
  const double xm = N * (1.0 - eta);
  int s_lo = std::max(I, std::abs(M));
  if ((s_lo - I) % 2 != 0) ++s_lo;

  // Leading term S = s_lo, in log space with the full CG product.
  const int l0 = (s_lo + M) / 2;
  const int lp0 = (s_lo - M) / 2;
  double lg_p, sg_p, lg_m, sg_m;
  if (!log_pow(xp, l0, lg_p, sg_p) || !log_pow(xm, lp0, lg_m, sg_m)) return {};
  const double cg = specfun::clebsch_gordan(l0, lp0, 0, 0, I, 0) *
                    specfun::clebsch_gordan(l0, lp0, l0, -lp0, I, M);
  if (cg == 0.0) return {};
  const double lt0 = lg_p + lg_m - 0.5 * (lf(2 * l0) + lf(2 * lp0)) +
                     std::log(std::abs(cg)) - 0.5 * std::log(2.0 * I + 1.0);
  double sg0 = sg_p * sg_m * sign_of(cg);
  if (lp0 % 2 != 0) sg0 = -sg0;

  // Relative series in double-double precision. Both CG factors collapse to
  // factorial products here (the second has extremal projections), so the
  // term ratio is exactly
  //   t_{S+2} / t_S = xp * xm * (g+1) / ((g+1-I)(S+I+2)(S+I+3)),
  // with g = (S+I)/2. For |eta| > 1 consecutive terms alternate in sign and
  // cancel by a factor ~ exp(0.6 N); plain doubles corrupt the sum past
  // N ~ 30, double-double keeps full accuracy through N in the hundreds.
  const double growth_edge = N * (1.0 + std::abs(eta)) + std::abs(M);
  DD r{1.0, 0.0};
  DD sum{1.0, 0.0};
  double r_peak = 1.0;
  int small_streak = 0;
  for (int S = s_lo; S + 2 <= 2 * hard_l_cap; S += 2) {
    const double g = 0.5 * (S + I);
    r = dd_mul(r, xp);
    r = dd_mul(r, xm);
    r = dd_mul(r, g + 1.0);
    r = dd_div(r, g + 1.0 - I);
    r = dd_div(r, double(S + I + 2));
    r = dd_div(r, double(S + I + 3));
    if (r.hi == 0.0) break;
    sum = dd_add(sum, r);
    r_peak = std::max(r_peak, std::abs(r.hi));
    if (double(S + 2) > growth_edge) {
      if (std::abs(r.hi) < r_peak * 1e-26)
        ++small_streak;
      else
        small_streak = 0;
      if (small_streak >= 3) break;
    }
  }
  const double total = sum.hi + sum.lo;
  if (total == 0.0) return {};
  return {lt0 + std::log(std::abs(total)), sg0 * sign_of(total)};
}

}  // namespace detail

inline SphericalExpansion exponential_wp(const ExponentialSpec& spec,
                                         double tail_tol = 1e-12) {
  if (!(spec.N > 0.0)) throw std::domain_error("exponential_wp: N must be > 0");
  if (!(tail_tol > 0.0)) throw std::domain_error("exponential_wp: tail_tol <= 0");
  if (!std::isfinite(spec.eta))
    throw std::domain_error("exponential_wp: eta not finite");

  // First pass: per-(I,M) log coefficients up to a dynamically chosen cap.
  std::vector<std::vector<detail::LogCoeff>> rows;  // rows[I][M+I]
  double log_peak = -1e308;
  const double log_cut = 0.5 * std::log(tail_tol) - 35.0;
  int l_stop = hard_l_cap;
  for (int I = 0; I <= hard_l_cap; ++I) {
    std::vector<detail::LogCoeff> row(2 * I + 1);
    double row_max = -1e308;
    for (int M = -I; M <= I; ++M) {
      // The CG selection rules force M to have the parity of I.
      if ((I - M) % 2 == 0) {
        row[M + I] = detail::exponential_bim(spec.N, spec.eta, I, M);
        row_max = std::max(row_max, row[M + I].log_abs);
      }
    }
    rows.push_back(std::move(row));
    log_peak = std::max(log_peak, row_max);
    if (row_max < log_peak + log_cut && I > spec.N * (1.0 + std::abs(spec.eta))) {
      l_stop = I;
      break;
    }
  }

  const int l_hi = static_cast<int>(rows.size()) - 1;
  SphericalExpansion out(l_hi);
  double norm = 0.0;
  std::vector<double> per_l_weight(l_hi + 1, 0.0);
  for (int I = 0; I <= l_hi; ++I) {
    for (int M = -I; M <= I; ++M) {
      const auto& c = rows[I][M + I];
      if (c.sign == 0.0) continue;
      // The (-1)^M flip orients the packet along +x (density peak at
      // theta' = 0); the raw double sum produces the -x orientation.
      const double flip = (M % 2 == 0) ? 1.0 : -1.0;
      const double v = flip * c.sign * std::exp(c.log_abs - log_peak);
      out.at(I, M) = v;
      per_l_weight[I] += v * v;
      norm += v * v;
    }
  }
  // Tail check against the hard cap.
  if (l_stop == hard_l_cap && l_hi == hard_l_cap) {
    const double tail = per_l_weight[l_hi] / norm;
    if (tail > tail_tol)
      throw TruncationError("exponential_wp: tail tolerance unreachable at l_max=512",
                            tail);
  }
  out.normalize();
  // Trim to the smallest l_max with neglected weight below tail_tol.
  double neglect = 0.0;
  int l_keep = l_hi;
  for (int I = l_hi; I >= 1; --I) {
    neglect += per_l_weight[I] / norm;
    if (neglect >= tail_tol) break;
    l_keep = I - 1;
  }
  if (l_keep < l_hi) {
    SphericalExpansion trimmed(l_keep);
    for (int I = 0; I <= l_keep; ++I)
      for (int M = -I; M <= I; ++M) trimmed.at(I, M) = out.at(I, M);
    trimmed.normalize();
    return trimmed;
  }
  return out;
}

// Axial (theta') representation of the eta = 0 exponential WP, with
// weights sqrt(2I+1) * i_I(N) on Y^I_0.
inline SphericalExpansion linear_exponential_axial(double N,
                                                   double tail_tol = 1e-12) {
  if (!(N > 0.0)) throw std::domain_error("linear_exponential_axial: N <= 0");
  std::vector<double> logs;
  double log_peak = -1e308;
  for (int I = 0; I <= hard_l_cap; ++I) {
    const auto iv = specfun::mod_sph_bessel_i_log(I, N);
    const double lg = 0.5 * std::log(2.0 * I + 1.0) + iv.log_abs;
    logs.push_back(lg);
    log_peak = std::max(log_peak, lg);
    if (lg < log_peak + std::log(tail_tol) - 35.0 && I > N) break;
  }
  const int l_hi = static_cast<int>(logs.size()) - 1;
  SphericalExpansion out(l_hi, Frame::XAxis);
  for (int I = 0; I <= l_hi; ++I) out.at(I, 0) = std::exp(logs[I] - log_peak);
  out.normalize();
  return out;
}

// ---------------------------------------------------------------------------
// Uniform linear WP (eta -> infinity at fixed eta*N): weights
// sqrt(2I+1) j_I(eta N) on Y^I_0 about the Oy axis.

inline SphericalExpansion uniform_linear_wp(double etaN) {
  if (!(etaN > 0.0)) throw std::domain_error("uniform_linear_wp: etaN <= 0");
  std::vector<double> w;
  double total = 0.0;
  for (int I = 0; I <= hard_l_cap; ++I) {
    const double v = std::sqrt(2.0 * I + 1.0) * specfun::sph_bessel_j(I, etaN);
    w.push_back(v);
    total += v * v;
    if (I > etaN + 20 && std::abs(v) < 1e-18) break;
  }
  const int l_hi = static_cast<int>(w.size()) - 1;
  SphericalExpansion out(l_hi, Frame::YAxis);
  for (int I = 0; I <= l_hi; ++I) out.at(I, 0) = w[I] / std::sqrt(total);
  return out;
}

// ---------------------------------------------------------------------------
// Boson-representation circular states |k s>, weights (k^2)^j / sqrt(p!)
// on |j = p s, m = j>.

inline SphericalExpansion boson_circular_state(const BosonSpec& spec,
                                               double tail_tol = 1e-12) {
  if (!(spec.k > 0.0)) throw std::domain_error("boson_circular_state: k <= 0");
  if (spec.two_s <= 0)
    throw std::domain_error("boson_circular_state: spin must be positive");
  if (spec.two_s % 2 != 0 && !spec.integer_truncated)
    throw std::domain_error(
        "boson_circular_state: half-integer spin requires integer_truncated "
        "(use boson_moments for untruncated expectation values)");

  const double log_k2 = 2.0 * std::log(spec.k);
  std::vector<std::pair<int, double>> kept;  // (j, log weight)
  double log_peak = -1e308;
  for (int p = 0;; ++p) {
    const std::int64_t two_j = std::int64_t(p) * spec.two_s;
    if (two_j / 2 > hard_l_cap) break;
    const bool integer_j = (two_j % 2 == 0);
    const double j = 0.5 * two_j;
    const double lg = j * log_k2 - 0.5 * specfun::log_factorial(p);
    if (integer_j) {
      kept.emplace_back(static_cast<int>(two_j / 2), lg);
      log_peak = std::max(log_peak, lg);
    }
    if (j > spec.k * spec.k && lg < log_peak + std::log(tail_tol) - 35.0) break;
  }
  const int l_hi = kept.back().first;
  SphericalExpansion out(l_hi);
  for (const auto& [j, lg] : kept) out.at(j, j) += std::exp(lg - log_peak);
  out.normalize();
  return out;
}

// Exact untruncated moments from the boson algebra (valid for any spin,
// including half-integer where no integer expansion exists).
struct BosonMoments {
  double mean_Lz;
  double mean_Lz2;
  double mean_Lx2;
  double mean_Ly2;
  double uncertainty_product;  // dLx^2 dLy^2
  double lz_bound;             // <Lz>^2 / 4
};

inline BosonMoments boson_moments(const BosonSpec& spec) {
  const double s = 0.5 * spec.two_s;
  const double k4s = std::pow(spec.k, 2.0 * spec.two_s);
  BosonMoments m{};
  m.mean_Lz = s * k4s;
  m.mean_Lz2 = s * s * k4s * (k4s + 1.0);
  m.mean_Lx2 = 0.5 * s * k4s;
  m.mean_Ly2 = m.mean_Lx2;
  m.uncertainty_product = m.mean_Lx2 * m.mean_Ly2;
  m.lz_bound = 0.25 * m.mean_Lz * m.mean_Lz;
  return m;
}

// ---------------------------------------------------------------------------
// top coherent state symmetric-top state |r, lambda>, restricted to integer I and K
// and renormalized.  If renorm_out is given it receives the fraction of the
// full (half-integer included) norm carried by the integer part.

inline TopExpansion top_coherent_state(const TopSpec& spec,
                                      double tail_tol = 1e-12,
                                      double* renorm_out = nullptr) {
  if (!(spec.r > 0.0)) throw std::domain_error("top_coherent_state: r <= 0");
  if (spec.lambda < 0.0 || spec.lambda > specfun::pi)
    throw std::domain_error("top_coherent_state: lambda outside [0, pi]");
  const auto& lf = specfun::factorial_table();
  const double sh = std::sin(0.5 * spec.lambda);
  const double ch = std::cos(0.5 * spec.lambda);
  const double log_2r = std::log(2.0 * spec.r);

  // log |C_{IK}| for half-integer-resolved indices: two_I, two_K.
  auto log_c = [&](int two_I, int two_K, double& lg) {
    const int ipk = (two_I + two_K) / 2;  // I+K, integer
    const int imk = (two_I - two_K) / 2;  // I-K, integer
    double lg_s, sg_s, lg_c2, sg_c2;
    if (!detail::log_pow(sh, ipk, lg_s, sg_s)) return false;
    if (!detail::log_pow(ch, imk, lg_c2, sg_c2)) return false;
    lg = 0.5 * two_I * log_2r + lg_s + lg_c2 - 0.5 * (lf(ipk) + lf(imk));
    return true;
  };

  double log_peak = -1e308;
  std::vector<std::vector<double>> logs;       // per integer I, per K
  std::vector<std::vector<double>> half_logs;  // per half-integer I, per K
  int l_hi = 0;
  for (int two_I = 0; two_I <= 2 * hard_l_cap; ++two_I) {
    double row_max = -1e308;
    const bool integer_I = (two_I % 2 == 0);
    std::vector<double> row(two_I + 1, -1e308);
    for (int two_K = -two_I; two_K <= two_I; two_K += 2) {
      double lg;
      if (!log_c(two_I, two_K, lg)) continue;
      row_max = std::max(row_max, lg);
      row[(two_K + two_I) / 2] = lg;
    }
    log_peak = std::max(log_peak, row_max);
    if (integer_I) {
      logs.push_back(std::move(row));
      l_hi = two_I / 2;
    } else {
      half_logs.push_back(std::move(row));
    }
    if (two_I > 4.0 * spec.r + 8 && row_max < log_peak + std::log(tail_tol) - 35.0)
      break;
  }
  double integer_weight = 0.0;
  double half_weight = 0.0;
  for (const auto& row : logs)
    for (double lg : row)
      if (lg > -1e307) integer_weight += std::exp(2.0 * (lg - log_peak));
  for (const auto& row : half_logs)
    for (double lg : row)
      if (lg > -1e307) half_weight += std::exp(2.0 * (lg - log_peak));
  if (l_hi >= hard_l_cap)
    throw TruncationError("top_coherent_state: tail tolerance unreachable", 0.0);

  TopExpansion out(l_hi);
  for (int I = 0; I <= l_hi; ++I)
    for (int K = -I; K <= I; ++K) {
      const double lg = logs[I][K + I];
      if (lg > -1e307) {
        const double sign = ((I + K) % 2 == 0) ? 1.0 : -1.0;
        out.at(I, K) = sign * std::exp(lg - log_peak);
      }
    }
  out.normalize();
  if (renorm_out)
    *renorm_out = integer_weight / (integer_weight + half_weight);
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature projection of the epsilon-generalized quasi-intelligent state
//   Psi ~ exp(N sin(theta) [(1 + i eps) cos(phi) + i eta sin(phi)]).

inline SphericalExpansion gaussian_seed_wp(const GaussianSeedSpec& spec,
                                           double tail_tol = 1e-12) {
  if (!(spec.N > 0.0)) throw std::domain_error("gaussian_seed_wp: N <= 0");
  const double amp = std::sqrt(spec.N / (2.0 * specfun::pi * std::sinh(2.0 * spec.N)));
  const double defect_tol = std::max(tail_tol, 1e-10);

  int l_max = exponential_wp({spec.N, spec.eta}, 1e-10).l_max() + 16;
  for (int attempt = 0; attempt < 4; ++attempt, l_max = l_max * 3 / 2 + 16) {
    if (l_max > hard_l_cap) break;
    const int n_theta = 2 * (l_max + 1);
    const int n_phi = 4 * (l_max + 1);
    const auto rule = specfun::gauss_legendre(n_theta);
    const double dphi_w = 2.0 * specfun::pi / n_phi;

    SphericalExpansion out(l_max);
    std::vector<double> pbar;
    std::vector<Complex> g(2 * l_max + 1);
    for (int j = 0; j < n_theta; ++j) {
      const double ct = rule.nodes[j];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      // g_M = sum_phi f(theta, phi) e^{-i M phi} * dphi
      std::fill(g.begin(), g.end(), Complex{});
      for (int kk = 0; kk < n_phi; ++kk) {
        const double phi = 2.0 * specfun::pi * kk / n_phi;
        const Complex arg(spec.N * st * std::cos(phi),
                          spec.N * st * (spec.epsilon * std::cos(phi) +
                                         spec.eta * std::sin(phi)));
        const Complex f = amp * std::exp(arg);
        for (int M = -l_max; M <= l_max; ++M)
          g[M + l_max] += f * std::exp(Complex(0.0, -M * phi)) * dphi_w;
      }
      specfun::legendre_bar_table(l_max, ct, st, pbar);
      auto pidx = [](int l, int m) { return l * (l + 1) / 2 + m; };
      for (int I = 0; I <= l_max; ++I)
        for (int M = -I; M <= I; ++M) {
          const int ma = std::abs(M);
          double p = pbar[pidx(I, ma)];
          if (M < 0 && ma % 2 != 0) p = -p;
          out.at(I, M) += rule.weights[j] * p * g[M + l_max];
        }
    }
    const double defect = std::abs(1.0 - out.norm_squared());
    if (defect <= defect_tol) {
      out.normalize();
      return out;
    }
  }
  throw TruncationError("gaussian_seed_wp: quadrature projection did not converge",
                        0.0);
}

// Direct FFT-free projection above is O(n_theta * n_phi * l_max); fine for
// the N <= 50 regime this library targets.

// ---------------------------------------------------------------------------
// General superposition of intelligent harmonics with weights lambda_l.

inline SphericalExpansion general_wp(const std::vector<double>& weights,
                                     double eta) {
  bool any = false;
  for (double w : weights) any = any || (w != 0.0);
  if (!any) throw std::domain_error("general_wp: all weights are zero");
  const int l_hi = static_cast<int>(weights.size()) - 1;
  SphericalExpansion out(l_hi);
  for (int l = 0; l <= l_hi; ++l) {
    if (weights[l] == 0.0) continue;
    const auto h = intelligent_harmonic(l, eta);
    for (int m = -l; m <= l; ++m) out.at(l, m) += weights[l] * h.at(l, m);
  }
  out.normalize();
  return out;
}

}  // namespace rotwave::states
