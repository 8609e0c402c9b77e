#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "rotwave/expansion.hpp"
#include "rotwave/observables.hpp"
#include "rotwave/states.hpp"

using namespace rotwave;
using specfun::pi;

namespace {

// residual norm of (L_x + i eta L_y) psi, the defining annihilation law
double annihilation_residual(const SphericalExpansion& s, double eta) {
  const auto fx = apply_lx(s);
  const auto fy = apply_ly(s);
  double r = 0.0;
  for (int I = 0; I <= s.l_max(); ++I)
    for (int M = -I; M <= I; ++M)
      r += std::norm(fx.at(I, M) + Complex(0.0, eta) * fy.at(I, M));
  return std::sqrt(r);
}

}  // namespace

TEST_CASE("intelligent harmonic is annihilated by Lx + i eta Ly") {
  for (int l : {1, 2, 7, 40})
    for (double eta : {0.0, 0.25, 1.0, -0.5, 2.0}) {
      const auto h = states::intelligent_harmonic(l, eta);
      CHECK(h.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(annihilation_residual(h, eta) < 1e-10 * l);
    }
}

TEST_CASE("intelligent harmonic parity: only m with parity of l") {
  const auto h = states::intelligent_harmonic(5, 0.3);
  for (int m = -5; m <= 5; ++m)
    if ((5 - m) % 2 != 0) CHECK(std::abs(h.at(5, m)) == 0.0);
}

TEST_CASE("exponential packet: normalized, correct parity, annihilated") {
  for (double eta : {0.0, 0.5, 1.0, 2.0}) {
    const auto s = states::exponential_wp({10.0, eta});
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    for (int I = 0; I <= s.l_max(); ++I)
      for (int M = -I; M <= I; ++M)
        if ((I - M) % 2 != 0) CHECK(std::abs(s.at(I, M)) == 0.0);
    CHECK(annihilation_residual(s, eta) < 1e-8);
  }
}

TEST_CASE("exponential packet moments match the closed forms") {
  for (double N : {5.0, 20.0})
    for (double eta : {0.0, 0.5, 1.0}) {
      const auto s = states::exponential_wp({N, eta});
      const auto r = observables::angular_momentum_report(s);
      const double base = N / std::tanh(2.0 * N) - 0.5;
      CHECK(r.mean_Lz == doctest::Approx(eta * base).epsilon(1e-9));
      CHECK(r.mean_Ly2 == doctest::Approx(0.5 * base).epsilon(1e-9));
      CHECK(r.mean_Lx2 ==
            doctest::Approx(0.5 * eta * eta * base).epsilon(1e-9).scale(1.0));
      CHECK(r.mean_Lz2 == doctest::Approx(0.5 * base * (1.0 - 2.0 * eta * eta) +
                                          eta * eta * N * N)
                              .epsilon(1e-9));
    }
}

TEST_CASE("circular packet weights match the single-sum form") {
  // C_I = sqrt(2N/sinh 2N) (2N)^I / sqrt((2I+1)!)
  const double N = 12.0;
  const auto s = states::exponential_wp({N, 1.0});
  const auto& lf = specfun::factorial_table();
  const double log_norm = 0.5 * (std::log(2.0 * N) - std::log(std::sinh(2.0 * N)));
  for (int I = 0; I <= std::min(40, s.l_max()); ++I) {
    const double expect =
        std::exp(log_norm + I * std::log(2.0 * N) - 0.5 * lf(2 * I + 1));
    CHECK(std::abs(s.at(I, I)) == doctest::Approx(expect).epsilon(1e-9).scale(1e-12));
    for (int M = -I; M < I; ++M) CHECK(std::abs(s.at(I, M)) < 1e-12);
  }
}

TEST_CASE("linear packet: lab expansion equals the axial Bessel form") {
  const double N = 15.0;
  const auto lab = states::exponential_wp({N, 0.0});
  const auto axial = states::linear_exponential_axial(N);
  const auto axial_lab = to_lab_frame(axial);
  const double overlap = std::abs(inner(lab, axial_lab));
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-10));
  // per-I populations agree as well
  for (int I = 0; I <= std::min(lab.l_max(), axial.l_max()); ++I) {
    double wl = 0.0, wa = 0.0;
    for (int M = -I; M <= I; ++M) {
      wl += std::norm(lab.at(I, M));
      wa += std::norm(axial_lab.at(I, M));
    }
    CHECK(wl == doctest::Approx(wa).epsilon(1e-8).scale(1e-13));
  }
}

TEST_CASE("uniform linear packet is annihilated by Ly") {
  const auto s = states::uniform_linear_wp(20.0);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.frame() == Frame::YAxis);
  const auto lab = to_lab_frame(s);
  const auto fy = apply_ly(lab);
  CHECK(std::sqrt(fy.norm_squared()) < 1e-8);
}

TEST_CASE("boson circular state, spin one half truncated") {
  // C_I proportional to k^{4I} / sqrt((2I)!), only m = I populated
  const double k2 = 39.0;
  const auto s = states::boson_circular_state({std::sqrt(k2), 1, true});
  const auto& lf = specfun::factorial_table();
  // ratio test against the closed form
  const double c0 = std::abs(s.at(0, 0));
  for (int I = 1; I <= std::min(30, s.l_max()); ++I) {
    const double expect =
        c0 * std::exp(I * std::log(k2) - 0.5 * lf(2 * I));
    CHECK(std::abs(s.at(I, I)) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("boson integer spin expansion reproduces the algebraic moments") {
  const states::BosonSpec spec{2.0, 2, false};  // s = 1, k^2 = 4
  const auto s = states::boson_circular_state(spec);
  const auto r = observables::angular_momentum_report(s);
  const auto m = states::boson_moments(spec);
  CHECK(r.mean_Lz == doctest::Approx(m.mean_Lz).epsilon(1e-10));
  CHECK(r.mean_Lz2 == doctest::Approx(m.mean_Lz2).epsilon(1e-10));
  CHECK(r.mean_Lx2 == doctest::Approx(m.mean_Lx2).epsilon(1e-10));
  CHECK(r.mean_Ly2 == doctest::Approx(m.mean_Ly2).epsilon(1e-10));
}

TEST_CASE("boson half-integer untruncated is rejected with guidance") {
  CHECK_THROWS_AS(states::boson_circular_state({2.0, 1, false}),
                  std::domain_error);
}

TEST_CASE("top coherent state top state sign conventions and moments") {
  const double r = 8.0, lambda = pi / 3.0;
  const auto s = states::top_coherent_state({r, lambda});
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  double mean_Lz = 0.0, mean_LZ = 0.0, mean_L2 = 0.0;
  for (int I = 0; I <= s.l_max(); ++I)
    for (int K = -I; K <= I; ++K) {
      const double w = std::norm(s.at(I, K));
      mean_Lz += -double(I) * w;
      mean_LZ += double(K) * w;
      mean_L2 += double(I) * (I + 1) * w;
    }
  CHECK(mean_Lz == doctest::Approx(-r).epsilon(2e-3));
  CHECK(mean_LZ == doctest::Approx(-r * std::cos(lambda)).epsilon(2e-3));
  CHECK(mean_L2 == doctest::Approx(r * (r + 1.5)).epsilon(2e-3));
  // body-frame transverse component
  const auto fx = apply_body_lx(s);
  CHECK(std::real(inner(s, fx)) ==
        doctest::Approx(-r * std::sin(lambda)).epsilon(2e-3));
}

TEST_CASE("top coherent state integer-restriction weight fraction is reported") {
  double frac = 0.0;
  states::top_coherent_state({4.0, pi / 2.0}, 1e-12, &frac);
  CHECK(frac > 0.0);
  CHECK(frac < 1.0);
}

TEST_CASE("quadrature-projected state matches the series construction") {
  const states::GaussianSeedSpec spec{8.0, 0.5, 0.0};
  const auto proj = states::gaussian_seed_wp(spec);
  const auto series = states::exponential_wp({8.0, 0.5});
  CHECK(std::abs(inner(series, proj)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("epsilon-deformed state breaks the uncertainty equality") {
  const auto s = states::gaussian_seed_wp({8.0, 1.0, 0.5});
  const auto c = observables::uncertainty_check(s);
  CHECK_FALSE(c.satisfied);
  CHECK(std::abs(c.product - c.bound) > 1e-3 * c.bound);
}

TEST_CASE("general superposition is normalized and spans the weights") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(12);
  for (auto& v : w) v = u(rng);
  const auto s = states::general_wp(w, 0.7);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
  for (int l = 0; l < 12; ++l) {
    double wl = 0.0;
    for (int m = -l; m <= l; ++m) wl += std::norm(s.at(l, m));
    CHECK(wl > 0.0);
  }
  CHECK_THROWS_AS(states::general_wp({0.0, 0.0}, 1.0), std::domain_error);
}

TEST_CASE("builders validate their domains") {
  CHECK_THROWS_AS(states::exponential_wp({-1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(states::linear_exponential_axial(0.0), std::domain_error);
  CHECK_THROWS_AS(states::uniform_linear_wp(-2.0), std::domain_error);
  CHECK_THROWS_AS(states::top_coherent_state({4.0, 4.0}), std::domain_error);
  CHECK_THROWS_AS(states::intelligent_harmonic(-1, 0.0), std::domain_error);
}
