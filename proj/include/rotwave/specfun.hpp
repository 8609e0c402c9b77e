#pragma once

// Special functions evaluated in log space: factorials, Clebsch-Gordan
// coefficients, spherical harmonics, spherical Bessel functions and Wigner
// small-d matrices.  Everything here is pure and safe for concurrent use
// once the shared factorial table has been touched at least once.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotwave::specfun {

inline constexpr double pi = std::numbers::pi_v<double>;

// ---------------------------------------------------------------------------
// Factorials

class LogFactorialTable {
 public:
  explicit LogFactorialTable(int n_max) : values_(n_max + 1, 0.0) {
    for (int n = 1; n <= n_max; ++n)
      values_[n] = values_[n - 1] + std::log(static_cast<double>(n));
  }

  double operator()(int n) const {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    if (n >= static_cast<int>(values_.size()))
      throw std::length_error("log_factorial: n exceeds table capacity n_max=" +
                              std::to_string(values_.size() - 1));
    return values_[n];
  }

  int n_max() const { return static_cast<int>(values_.size()) - 1; }

 private:
  std::vector<double> values_;
};

// Shared table, large enough for every truncation cap in the library
// (l_max <= 512 implies arguments up to (2l)! and (l+l')! ~ 2048).
inline const LogFactorialTable& factorial_table() {
  static const LogFactorialTable table(4096);
  return table;
}

inline double log_factorial(int n) { return factorial_table()(n); }

// ---------------------------------------------------------------------------
// Clebsch-Gordan coefficients, Condon-Shortley convention.

namespace detail {

inline bool triangle_ok(int l1, int l2, int L) {
  return L >= std::abs(l1 - l2) && L <= l1 + l2;
}

// <l1 l2 0 0 | L 0> in closed form (single term, no cancellation).
inline double cg_both_m_zero(int l1, int l2, int L) {
  const int twog = l1 + l2 + L;
  if (twog % 2 != 0) return 0.0;
  const int g = twog / 2;
  const auto& lf = factorial_table();
  const double lg = lf(g) - lf(g - l1) - lf(g - l2) - lf(g - L) +
                    0.5 * (lf(2 * g - 2 * l1) + lf(2 * g - 2 * l2) +
                           lf(2 * g - 2 * L) - lf(2 * g + 1));
  const double sign = ((g - L) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sqrt(2.0 * L + 1.0) * std::exp(lg);
}

}  // namespace detail

inline double clebsch_gordan(int l1, int l2, int m1, int m2, int L, int M) {
  if (l1 < 0 || l2 < 0 || L < 0)
    throw std::domain_error("clebsch_gordan: negative angular momentum");
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(M) > L)
    throw std::domain_error("clebsch_gordan: |m| > l");
  if (M != m1 + m2) return 0.0;
  if (!detail::triangle_ok(l1, l2, L)) return 0.0;
  if (m1 == 0 && m2 == 0) return detail::cg_both_m_zero(l1, l2, L);

  const auto& lf = factorial_table();
  const double log_pre =
      0.5 * (std::log(2.0 * L + 1.0) + lf(L + l1 - l2) + lf(L - l1 + l2) +
             lf(l1 + l2 - L) - lf(l1 + l2 + L + 1) + lf(L + M) + lf(L - M) +
             lf(l1 - m1) + lf(l1 + m1) + lf(l2 - m2) + lf(l2 + m2));

  const int k_min = std::max({0, l2 - L - m1, l1 - L + m2});
  const int k_max = std::min({l1 + l2 - L, l1 - m1, l2 + m2});
  if (k_min > k_max) return 0.0;

  // Racah sum, scaled by the largest term to avoid overflow.
  std::vector<double> log_terms(k_max - k_min + 1);
  double log_max = -1e300;
  for (int k = k_min; k <= k_max; ++k) {
    const double lt = -(lf(k) + lf(l1 + l2 - L - k) + lf(l1 - m1 - k) +
                        lf(l2 + m2 - k) + lf(L - l2 + m1 + k) +
                        lf(L - l1 - m2 + k));
    log_terms[k - k_min] = lt;
    log_max = std::max(log_max, lt);
  }
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * std::exp(log_terms[k - k_min] - log_max);
  }
  return sum * std::exp(log_pre + log_max);
}

// ---------------------------------------------------------------------------
// Normalized associated Legendre functions and spherical harmonics.
//
// Pbar(l,m) is defined so that Y_l^m(theta,phi) = Pbar(l,m)(cos theta) e^{i m phi}
// with the Condon-Shortley phase folded in.  The recurrence is stable for
// all l used here (no factorial overflow).

// Fills table[idx(l,m)] = Pbar_l^m for 0 <= m <= l <= l_max,
// idx(l,m) = l*(l+1)/2 + m.
inline void legendre_bar_table(int l_max, double cos_theta, double sin_theta,
                               std::vector<double>& table) {
  table.assign(static_cast<std::size_t>(l_max + 1) * (l_max + 2) / 2, 0.0);
  auto idx = [](int l, int m) { return l * (l + 1) / 2 + m; };
  table[0] = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 1; m <= l_max; ++m)
    table[idx(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_theta *
                       table[idx(m - 1, m - 1)];
  for (int m = 0; m < l_max; ++m)
    table[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * cos_theta * table[idx(m, m)];
  for (int m = 0; m <= l_max; ++m) {
    for (int l = m + 2; l <= l_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b =
          std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                    (4.0 * double(l - 1) * (l - 1) - 1.0));
      table[idx(l, m)] =
          a * (cos_theta * table[idx(l - 1, m)] - b * table[idx(l - 2, m)]);
    }
  }
}

inline double legendre_bar(int l, int m, double cos_theta, double sin_theta) {
  static thread_local std::vector<double> scratch;
  legendre_bar_table(l, cos_theta, sin_theta, scratch);
  return scratch[l * (l + 1) / 2 + m];
}

struct AngularPoint {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2*pi)
};

inline std::complex<double> ylm(int l, int m, const AngularPoint& p) {
  if (l < 0 || std::abs(m) > l) throw std::domain_error("ylm: |m| > l");
  const int ma = std::abs(m);
  const double pbar = legendre_bar(l, ma, std::cos(p.theta), std::sin(p.theta));
  std::complex<double> value =
      pbar * std::exp(std::complex<double>(0.0, ma * p.phi));
  if (m < 0) value = (ma % 2 == 0 ? 1.0 : -1.0) * std::conj(value);
  return value;
}

// ---------------------------------------------------------------------------
// Modified spherical Bessel function i_l(x) = sqrt(pi/(2x)) I_{l+1/2}(x),
// returned in log-magnitude form (i_l is positive for x > 0).

struct LogValue {
  double log_abs;
  double sign;  // -1, 0 or +1

  double value() const { return sign * std::exp(log_abs); }
};

inline LogValue mod_sph_bessel_i_log(int l, double x) {
  if (l < 0) throw std::domain_error("mod_sph_bessel_i: l < 0");
  if (!(x > 0.0)) throw std::domain_error("mod_sph_bessel_i: x must be > 0");
  // log i_0 = x + log1p(-e^{-2x}) - log(2x)
  double log_val = x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0 * x);
  if (l == 0) return {log_val, 1.0};
  // Ratios r_k = i_k / i_{k-1} by backward recurrence; the seed at high
  // order is the asymptotic ratio x/(2k+1).
  const int k_start = l + 40 + static_cast<int>(2.0 * std::sqrt(std::max<double>(x, l)));
  std::vector<double> ratio(l + 1, 0.0);
  double r = x / (2.0 * k_start + 1.0);
  for (int k = k_start - 1; k >= 1; --k) {
    r = x / ((2.0 * k + 1.0) + x * r);
    if (k <= l) ratio[k] = r;
  }
  for (int k = 1; k <= l; ++k) log_val += std::log(ratio[k]);
  return {log_val, 1.0};
}

inline double mod_sph_bessel_i(int l, double x) {
  return mod_sph_bessel_i_log(l, x).value();
}

// ---------------------------------------------------------------------------
// Ordinary spherical Bessel j_l(x), Miller's downward recurrence normalized
// by the completeness sum  sum_l (2l+1) j_l^2 = 1.

inline double sph_bessel_j(int l, double x) {
  if (l < 0) throw std::domain_error("sph_bessel_j: l < 0");
  if (x < 0.0) throw std::domain_error("sph_bessel_j: x < 0");
  if (x == 0.0) return l == 0 ? 1.0 : 0.0;
  if (l == 0) return std::sin(x) / x;

  const int l_start = l + 25 + static_cast<int>(1.5 * x + 2.0 * std::sqrt(double(l)));
  double jp = 0.0;            // j_{k+1}, unnormalized
  double jc = 1e-30;          // j_k
  double target = 0.0;        // unnormalized j_l
  double norm = 0.0;
  for (int k = l_start; k >= 0; --k) {
    const double jm = (2.0 * k + 3.0) / x * jc - jp;  // j_{k}
    jp = jc;
    jc = jm;
    if (k == l) target = jc;
    norm += (2.0 * k + 1.0) * jc * jc;
    if (std::abs(jc) > 1e250) {
      const double s = 1e-250;
      jp *= s;
      jc *= s;
      target *= s;
      norm *= s * s;
    }
  }
  double result = target / std::sqrt(norm);
  // Completeness normalization loses the overall sign; fix it from j_0 or,
  // near a zero of j_0, from j_1.
  const double j0 = std::sin(x) / x;
  double ref_exact, ref_rec;
  if (std::abs(j0) > 1e-3) {
    ref_exact = j0;
    ref_rec = jc;
  } else {
    ref_exact = std::sin(x) / (x * x) - std::cos(x) / x;
    ref_rec = jp;
  }
  if (ref_exact * ref_rec < 0.0) result = -result;
  return result;
}

// ---------------------------------------------------------------------------
// Wigner small-d matrix.

namespace detail {

// Explicit Wigner sum; single-term for extremal indices, and used for
// moderate l elsewhere.  The m2 == 0 column is routed through the Legendre
// recurrence instead because the alternating sum cancels badly at large l.
inline double wigner_d_sum(int l, int m1, int m2, double beta) {
  const auto& lf = factorial_table();
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const double log_pre =
      0.5 * (lf(l + m1) + lf(l - m1) + lf(l + m2) + lf(l - m2));
  const int k_min = std::max(0, m2 - m1);
  const int k_max = std::min(l + m2, l - m1);

  std::vector<double> log_terms;
  std::vector<double> signs;
  log_terms.reserve(k_max - k_min + 1);
  double log_max = -1e300;
  for (int k = k_min; k <= k_max; ++k) {
    const int pc = 2 * l + m2 - m1 - 2 * k;  // power of cos(beta/2)
    const int ps = m1 - m2 + 2 * k;          // power of sin(beta/2)
    if ((pc > 0 && c == 0.0) || (ps > 0 && s == 0.0)) continue;
    double lt = -(lf(l + m2 - k) + lf(k) + lf(m1 - m2 + k) + lf(l - m1 - k));
    if (pc > 0) lt += pc * std::log(std::abs(c));
    if (ps > 0) lt += ps * std::log(std::abs(s));
    double sign = ((m1 - m2 + k) % 2 == 0) ? 1.0 : -1.0;
    if (pc > 0 && c < 0.0 && pc % 2 != 0) sign = -sign;
    if (ps > 0 && s < 0.0 && ps % 2 != 0) sign = -sign;
    log_terms.push_back(lt);
    signs.push_back(sign);
    log_max = std::max(log_max, lt);
  }
  if (log_terms.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_terms.size(); ++i)
    sum += signs[i] * std::exp(log_terms[i] - log_max);
  return sum * std::exp(log_pre + log_max);
}

// The column d^l_{., m2}(beta) is the eigenvector of the tridiagonal
// operator cos(beta) L_z + sin(beta) L_x with eigenvalue m2.  Two-sided
// recurrence (up from m1 = -l, down from m1 = +l, joined at the peak) is
// stable where the explicit alternating sum is not; the extremal element
// d_{-l, m2} is positive on (0, pi), which fixes the overall sign.
inline double wigner_d_column_element(int l, int m1, int m2, double beta) {
  const int n = 2 * l + 1;
  const double cb = std::cos(beta);
  const double sb2 = 0.5 * std::sin(beta);
  auto off = [l, sb2](int i) {  // coupling between m1 = -l+i and -l+i+1
    const double m = -l + i;
    return sb2 * std::sqrt(double(l) * (l + 1) - m * (m + 1));
  };
  // Inverse iteration for the eigenvector at the exactly known eigenvalue
  // m2; the tiny shift keeps the factorization nonsingular.
  const double shift = m2 + 1e-10;
  std::vector<double> x(n, 1.0 / std::sqrt(double(n)));
  std::vector<double> d0(n), d1(n), d2(n);
  std::vector<int> piv(n, 0);
  // One LU factorization with partial pivoting of the tridiagonal
  // T - shift*I (fill-in limited to a second superdiagonal).
  {
    std::vector<double> a(n), b(n), c(n);
    for (int i = 0; i < n; ++i) {
      a[i] = cb * (-l + i) - shift;
      b[i] = (i + 1 < n) ? off(i) : 0.0;  // symmetric off-diagonal
    }
    for (int i = 0; i < n; ++i) {
      d0[i] = a[i];
      d1[i] = (i + 1 < n) ? b[i] : 0.0;
      d2[i] = 0.0;
    }
    std::vector<double> low(n, 0.0);  // multipliers
    for (int i = 0; i + 1 < n; ++i) {
      double sub = b[i];  // T(i+1, i)
      if (std::abs(sub) > std::abs(d0[i])) {
        piv[i] = 1;
        std::swap(d0[i], sub);
        const double t1 = d1[i], t2 = d2[i];
        d1[i] = d0[i + 1];
        d2[i] = d1[i + 1];
        d0[i + 1] = t1;
        d1[i + 1] = t2;
      }
      const double mlt = sub / d0[i];
      low[i] = mlt;
      d0[i + 1] -= mlt * d1[i];
      d1[i + 1] -= mlt * d2[i];
    }
    // Two inverse-iteration sweeps reach machine precision because the
    // shifted matrix is nearly singular only along the wanted eigenvector.
    for (int sweep = 0; sweep < 2; ++sweep) {
      // forward substitution with the recorded row swaps
      for (int i = 0; i + 1 < n; ++i) {
        if (piv[i]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= low[i] * x[i];
      }
      // back substitution
      for (int i = n - 1; i >= 0; --i) {
        double v = x[i];
        if (i + 1 < n) v -= d1[i] * x[i + 1];
        if (i + 2 < n) v -= d2[i] * x[i + 2];
        x[i] = v / d0[i];
      }
      double norm = 0.0;
      for (double v : x) norm += v * v;
      norm = std::sqrt(norm);
      for (double& v : x) v /= norm;
    }
  }
  // Global sign: d_{-l, m2}(beta) > 0 on (0, pi), and the three-term
  // recurrence seeded there tracks the true (growing) solution up to the
  // column peak, so its sign at the peak is exact.
  int p = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(x[i]) > std::abs(x[p])) p = i;
  {
    double fm2 = 0.0, fm1 = 1.0;  // f[-1], f[0] with d_{-l,m2} > 0
    for (int i = 1; i <= p; ++i) {
      const double m = -l + i - 1;
      const double f = ((cb * m - m2) * fm1 - off(i - 2) * fm2) / off(i - 1);
      fm2 = fm1;
      fm1 = f;
      if (std::abs(fm1) > 1e200) {
        fm1 *= 1e-200;
        fm2 *= 1e-200;
      }
    }
    if (fm1 * x[p] < 0.0)
      for (double& v : x) v = -v;
  }
  return x[m1 + l];
}

}  // namespace detail

inline double wigner_small_d(int l, int m1, int m2, double beta) {
  if (l < 0 || std::abs(m1) > l || std::abs(m2) > l)
    throw std::domain_error("wigner_small_d: |m| > l");
  if (m2 == 0) {
    // d^l_{m 0}(beta) = sqrt(4 pi / (2l+1)) Re Y_l^m(beta, 0)
    const int ma = std::abs(m1);
    double d = std::sqrt(4.0 * pi / (2.0 * l + 1.0)) *
               legendre_bar(l, ma, std::cos(beta), std::sin(beta));
    if (m1 < 0 && ma % 2 != 0) d = -d;
    return d;
  }
  if (m1 == 0) {
    const double d = wigner_small_d(l, m2, 0, beta);
    return ((m2 % 2) == 0) ? d : -d;
  }
  // Single-term and few-term sums are cancellation-free; so is any sum at
  // small l.  Degenerate angles must use the sum (the recurrence divides
  // by sin(beta)).
  const int k_min = std::max(0, m2 - m1);
  const int k_max = std::min(l + m2, l - m1);
  if (k_max - k_min <= 1 || l <= 16 || std::sin(beta) == 0.0)
    return detail::wigner_d_sum(l, m1, m2, beta);
  return detail::wigner_d_column_element(l, m1, m2, beta);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [-1, 1].

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n < 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace rotwave::specfun
