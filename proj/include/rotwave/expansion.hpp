#pragma once

// State representations: SphericalExpansion holds the coefficients b_{IM}
// of a wave function on the sphere, TopExpansion the coefficients C_{IK}
// of a symmetric-top state with the laboratory projection fixed at M = -I.
// Both are immutable values once built; ladder operators return new values.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rotwave/specfun.hpp"

namespace rotwave {

using Complex = std::complex<double>;

// Quantization axis of the expansion.  States with axial symmetry are kept
// in the frame whose polar axis is their symmetry axis (theta' for Ox,
// theta'' for Oy); everything else lives in the laboratory frame.
enum class Frame { Lab, XAxis, YAxis };

inline const char* frame_name(Frame f) {
  switch (f) {
    case Frame::XAxis: return "theta-prime";
    case Frame::YAxis: return "theta-second";
    default: return "lab";
  }
}

class SphericalExpansion {
 public:
  SphericalExpansion() = default;
  explicit SphericalExpansion(int l_max, Frame frame = Frame::Lab)
      : l_max_(l_max),
        frame_(frame),
        c_(static_cast<std::size_t>(l_max + 1) * (l_max + 1), Complex{}) {
    if (l_max < 0) throw std::domain_error("SphericalExpansion: l_max < 0");
  }

  int l_max() const { return l_max_; }
  Frame frame() const { return frame_; }
  void set_frame(Frame f) { frame_ = f; }

  Complex& at(int l, int m) { return c_[index(l, m)]; }
  const Complex& at(int l, int m) const { return c_[index(l, m)]; }

  Complex operator()(int l, int m) const {
    if (l < 0 || l > l_max_ || std::abs(m) > l) return Complex{};
    return c_[index(l, m)];
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& z : c_) s += std::norm(z);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw std::domain_error("SphericalExpansion: zero state");
    for (auto& z : c_) z /= n;
  }

  const std::vector<Complex>& coefficients() const { return c_; }

 private:
  std::size_t index(int l, int m) const {
    return static_cast<std::size_t>(l) * l + l + m;
  }

  int l_max_ = 0;
  Frame frame_ = Frame::Lab;
  std::vector<Complex> c_;
};

inline Complex inner(const SphericalExpansion& a, const SphericalExpansion& b) {
  const int l = std::min(a.l_max(), b.l_max());
  Complex s{};
  for (int I = 0; I <= l; ++I)
    for (int M = -I; M <= I; ++M) s += std::conj(a.at(I, M)) * b.at(I, M);
  return s;
}

// Ladder matrix element sqrt(l(l+1) - m(m+1)) for L+ |l m> -> |l m+1>.
inline double ladder_up(int l, int m) {
  return std::sqrt(double(l) * (l + 1) - double(m) * (m + 1));
}

inline SphericalExpansion apply_lz(const SphericalExpansion& s) {
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M) r.at(I, M) = double(M) * s.at(I, M);
  return r;
}

inline SphericalExpansion apply_lplus(const SphericalExpansion& s) {
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M < I; ++M) r.at(I, M + 1) = ladder_up(I, M) * s.at(I, M);
  return r;
}

inline SphericalExpansion apply_lminus(const SphericalExpansion& s) {
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I + 1; M <= I; ++M)
      r.at(I, M - 1) = ladder_up(I, M - 1) * s.at(I, M);
  return r;
}

inline SphericalExpansion apply_lx(const SphericalExpansion& s) {
  const auto p = apply_lplus(s);
  const auto m = apply_lminus(s);
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M) r.at(I, M) = 0.5 * (p.at(I, M) + m.at(I, M));
  return r;
}

inline SphericalExpansion apply_ly(const SphericalExpansion& s) {
  const auto p = apply_lplus(s);
  const auto m = apply_lminus(s);
  SphericalExpansion r(s.l_max(), s.frame());
  const Complex half_over_i(0.0, -0.5);
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M)
      r.at(I, M) = half_over_i * (p.at(I, M) - m.at(I, M));
  return r;
}

// Rotation about Oz by chi: Psi(theta, phi) -> Psi(theta, phi - chi).
inline SphericalExpansion rotate_z(const SphericalExpansion& s, double chi) {
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M)
      r.at(I, M) = s.at(I, M) * std::exp(Complex(0.0, -M * chi));
  return r;
}

// Coefficients of the complex-conjugate wave function:
// conj(sum b_{IM} Y^I_M) = sum (-1)^M conj(b_{I,-M}) Y^I_M.
inline SphericalExpansion conjugate_state(const SphericalExpansion& s) {
  SphericalExpansion r(s.l_max(), s.frame());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M) {
      const double sign = (M % 2 == 0) ? 1.0 : -1.0;
      r.at(I, M) = sign * std::conj(s.at(I, -M));
    }
  return r;
}

// Re-express an axial state (only M = 0 populated, frame X or Y) in the
// laboratory frame via the addition theorem:
//   Y^I_0(theta_axis) = sqrt(4 pi/(2I+1)) sum_m conj(Y^I_m(axis)) Y^I_m(theta,phi)
inline SphericalExpansion to_lab_frame(const SphericalExpansion& s) {
  if (s.frame() == Frame::Lab) return s;
  const double axis_phi = (s.frame() == Frame::XAxis) ? 0.0 : 0.5 * specfun::pi;
  SphericalExpansion r(s.l_max(), Frame::Lab);
  for (int I = 0; I <= s.l_max(); ++I) {
    for (int M = -I; M <= I; ++M)
      if (M != 0 && std::abs(s.at(I, M)) != 0.0)
        throw std::domain_error("to_lab_frame: state is not axial");
    const Complex b = s.at(I, 0);
    if (b == Complex{}) continue;
    const double scale = std::sqrt(4.0 * specfun::pi / (2.0 * I + 1.0));
    for (int M = -I; M <= I; ++M) {
      const auto y = specfun::ylm(I, M, {0.5 * specfun::pi, axis_phi});
      r.at(I, M) = b * scale * std::conj(y);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Symmetric-top expansion, M = -I implicit.

class TopExpansion {
 public:
  TopExpansion() = default;
  explicit TopExpansion(int l_max)
      : l_max_(l_max),
        c_(static_cast<std::size_t>(l_max + 1) * (l_max + 1), Complex{}) {
    if (l_max < 0) throw std::domain_error("TopExpansion: l_max < 0");
  }

  int l_max() const { return l_max_; }

  Complex& at(int l, int k) { return c_[index(l, k)]; }
  const Complex& at(int l, int k) const { return c_[index(l, k)]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& z : c_) s += std::norm(z);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw std::domain_error("TopExpansion: zero state");
    for (auto& z : c_) z /= n;
  }

 private:
  std::size_t index(int l, int k) const {
    return static_cast<std::size_t>(l) * l + l + k;
  }

  int l_max_ = 0;
  std::vector<Complex> c_;
};

inline Complex inner(const TopExpansion& a, const TopExpansion& b) {
  const int l = std::min(a.l_max(), b.l_max());
  Complex s{};
  for (int I = 0; I <= l; ++I)
    for (int K = -I; K <= I; ++K) s += std::conj(a.at(I, K)) * b.at(I, K);
  return s;
}

// Body-frame components obey the anomalous commutation [L_X, L_Y] = -i L_Z,
// so (L_X + i L_Y) lowers K and (L_X - i L_Y) raises it.
inline TopExpansion apply_body_lplus(const TopExpansion& s) {
  TopExpansion r(s.l_max());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I + 1; K <= I; ++K)
      r.at(I, K - 1) = ladder_up(I, K - 1) * s.at(I, K);
  return r;
}

inline TopExpansion apply_body_lminus(const TopExpansion& s) {
  TopExpansion r(s.l_max());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K < I; ++K) r.at(I, K + 1) = ladder_up(I, K) * s.at(I, K);
  return r;
}

inline TopExpansion apply_body_lx(const TopExpansion& s) {
  const auto p = apply_body_lplus(s);
  const auto m = apply_body_lminus(s);
  TopExpansion r(s.l_max());
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K <= I; ++K) r.at(I, K) = 0.5 * (p.at(I, K) + m.at(I, K));
  return r;
}

inline TopExpansion apply_body_ly(const TopExpansion& s) {
  const auto p = apply_body_lplus(s);
  const auto m = apply_body_lminus(s);
  TopExpansion r(s.l_max());
  const Complex half_over_i(0.0, -0.5);
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K <= I; ++K)
      r.at(I, K) = half_over_i * (p.at(I, K) - m.at(I, K));
  return r;
}

}  // namespace rotwave
