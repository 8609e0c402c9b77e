#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include "rotwave/revivals.hpp"
#include "rotwave/states.hpp"

using namespace rotwave;
using specfun::pi;

namespace {

double max_coeff_diff(const SphericalExpansion& a, const SphericalExpansion& b) {
  const int L = std::max(a.l_max(), b.l_max());
  double m = 0.0;
  for (int I = 0; I <= L; ++I)
    for (int M = -I; M <= I; ++M) m = std::max(m, std::abs(a(I, M) - b(I, M)));
  return m;
}

SphericalExpansion random_state(int l_max, double eta, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(l_max + 1);
  for (auto& v : w) v = u(rng);
  return states::general_wp(w, eta);
}

}  // namespace

TEST_CASE("time constants from the mean angular momentum") {
  const auto s = states::exponential_wp({20.0, 1.0});
  const auto tc = revivals::time_constants(s, 2.0);
  CHECK(tc.T_rev == doctest::Approx(pi).epsilon(1e-14));
  // I_bar(I_bar + 1) = <L^2>
  const auto r = observables::angular_momentum_report(s);
  CHECK(tc.I_bar * (tc.I_bar + 1.0) == doctest::Approx(r.mean_L2).epsilon(1e-12));
  CHECK(tc.T_cl == doctest::Approx(tc.T_rev / (2.0 * tc.I_bar + 1.0)));
  CHECK_THROWS_AS(revivals::time_constants(s, 0.0), std::domain_error);
}

TEST_CASE("evolution is unitary and has period T_rev/2") {
  const auto s = states::exponential_wp({20.0, 0.5});
  for (double t : {0.1, 0.37, 12.9}) {
    const auto e = revivals::evolve(s, t, 1.0);
    CHECK(e.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(max_coeff_diff(revivals::evolve(s, 0.5, 1.0), s) < 1e-13);
  CHECK(max_coeff_diff(revivals::evolve(s, 4.0, 1.0), s) < 1e-13);
}

TEST_CASE("Gauss decomposition case rules for n up to 40") {
  for (int n = 2; n <= 40; ++n)
    for (int m = 1; m < n; ++m) {
      if (std::gcd(m, n) != 1) continue;
      const auto d = revivals::gauss_decompose(m, n);
      if (n % 2 != 0) {
        CHECK(d.l == n);
        CHECK(d.q == n);
        CHECK(d.s0 == (n - m) % d.l);
      } else if (n % 4 == 0) {
        CHECK(d.l == n / 2);
        CHECK(d.q == n / 2);
        CHECK(d.s0 == -1);
      } else {
        CHECK(d.l == n);
        CHECK(d.q == n / 2);
        CHECK(d.s0 == (n - m) % d.l);
      }
      // moduli: nonzero entries all equal 1/sqrt(q)
      int nonzero = 0;
      for (const auto& a : d.a) {
        const double mag = std::abs(a);
        if (mag > 1e-8) {
          ++nonzero;
          CHECK(std::abs(mag - 1.0 / std::sqrt(double(d.q))) < 1e-12);
        } else {
          CHECK(mag < 1e-12);
        }
      }
      CHECK(nonzero == d.q);
      // the identity the a_s were solved from, checked at a few I
      for (int I : {0, 1, 5, n}) {
        Complex lhs = std::exp(
            Complex(0.0, -2.0 * pi * double((long long)(I) * I * m % n) / n));
        Complex rhs{};
        for (int sdx = 0; sdx < d.l; ++sdx)
          rhs += d.a[sdx] *
                 std::exp(Complex(0.0, -2.0 * pi * double(I) * sdx / d.l));
        CHECK(std::abs(lhs - rhs) < 1e-12);
      }
    }
  CHECK_THROWS_AS(revivals::gauss_decompose(2, 4), std::domain_error);
  CHECK_THROWS_AS(revivals::gauss_decompose(0, 3), std::domain_error);
  CHECK_THROWS_AS(revivals::gauss_decompose(3, 3), std::domain_error);
}

TEST_CASE("fractional waves reconstruct the evolved state exactly") {
  const auto s = random_state(60, 0.8, 7u);
  for (auto [m, n] : {std::pair{1, 3}, {1, 4}, {3, 8}, {2, 9}, {5, 12}, {4, 11}}) {
    const auto set = revivals::fractional_waves(s, m, n);
    const auto rec = revivals::reconstruct(set);
    const auto direct = revivals::evolve(s, double(m) / n, 1.0);
    CHECK(max_coeff_diff(rec, direct) < 1e-12);
  }
}

TEST_CASE("the s0 wave is a coefficient-exact clone of the initial state") {
  for (auto [m, n] : {std::pair{1, 3}, {2, 5}, {1, 6}, {3, 10}, {4, 7}}) {
    const auto s = random_state(40, 0.4, unsigned(m * 100 + n));
    const auto set = revivals::fractional_waves(s, m, n);
    const int s0 = set.decomposition.s0;
    REQUIRE(s0 >= 0);
    bool found = false;
    for (const auto& w : set.waves)
      if (w.s == s0) {
        found = true;
        CHECK(max_coeff_diff(w.state, s) < 1e-12);
      }
    CHECK(found);
  }
}

TEST_CASE("fraction reduction into the half-open revival window") {
  auto [m1, n1] = revivals::reduce_fraction_mod_half(3, 4);
  CHECK(m1 == 1);
  CHECK(n1 == 4);
  auto [m2, n2] = revivals::reduce_fraction_mod_half(5, 6);
  CHECK(m2 == 1);
  CHECK(n2 == 3);
  auto [m3, n3] = revivals::reduce_fraction_mod_half(7, 3);  // 1/3 mod 1
  CHECK(m3 == 1);
  CHECK(n3 == 3);
  auto [m4, n4] = revivals::reduce_fraction_mod_half(1, 2);
  CHECK(m4 == 0);
  CHECK(n4 == 1);
}

TEST_CASE("circular packet fractional waves are rotated clones") {
  const auto s = states::exponential_wp({20.0, 1.0});
  const auto report = revivals::clone_report(s, 1, 3);
  CHECK(report.size() == 3);
  for (const auto& e : report) {
    CHECK(e.best_fidelity > 1.0 - 1e-6);
    CHECK(e.classification != revivals::WaveClass::Mutant);
  }
}

TEST_CASE("elliptic packet fractional waves include mutants") {
  const auto s = states::exponential_wp({20.0, 0.25});
  const auto report = revivals::clone_report(s, 1, 4);
  int mutants = 0;
  for (const auto& e : report)
    if (e.classification == revivals::WaveClass::Mutant) ++mutants;
  CHECK(mutants > 0);
}

TEST_CASE("fractional waves pair under conjugation with eta negated") {
  const auto plus = states::exponential_wp({12.0, 0.5});
  const auto minus = states::exponential_wp({12.0, -0.5});
  const auto set_p = revivals::fractional_waves(plus, 1, 3);
  const auto set_m = revivals::fractional_waves(minus, 1, 3);
  for (const auto& wp : set_p.waves) {
    const auto conj_wp = conjugate_state(wp.state);
    double best = 0.0;
    for (const auto& wm : set_m.waves)
      best = std::max(best, std::abs(inner(conj_wp, wm.state)));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("carpet column at t = 0 equals the initial density section") {
  const auto s = states::exponential_wp({10.0, 1.0});
  const auto cp = revivals::carpet(s, 0.5 * pi, {0.0, 0.1}, 73);
  for (std::size_t j = 0; j < cp.axis.size(); ++j) {
    const double direct =
        std::norm(observables::evaluate(s, 0.5 * pi, cp.axis[j]));
    CHECK(cp.at(0, j) == doctest::Approx(direct).epsilon(1e-12).scale(1e-15));
  }
}

TEST_CASE("axial carpet carries the ring weight") {
  const auto s = states::linear_exponential_axial(10.0);
  const auto cp = revivals::carpet_axial(s, {0.0}, 41);
  CHECK(cp.sin_weighted);
  for (std::size_t j = 0; j < cp.axis.size(); ++j) {
    const double direct = 2.0 * pi * std::sin(cp.axis[j]) *
                          std::norm(observables::evaluate(s, cp.axis[j], 0.0));
    CHECK(cp.at(0, j) == doctest::Approx(direct).epsilon(1e-12).scale(1e-15));
  }
}

TEST_CASE("classical and quadratic axial carpets differ after t = 0") {
  const auto s = states::linear_exponential_axial(12.0);
  const auto quad = revivals::carpet_axial(s, {0.11}, 41, false);
  const auto lin = revivals::carpet_axial(s, {0.11}, 41, true);
  double diff = 0.0;
  for (std::size_t j = 0; j < quad.axis.size(); ++j)
    diff = std::max(diff, std::abs(quad.at(0, j) - lin.at(0, j)));
  CHECK(diff > 1e-3);
}

TEST_CASE("spreading estimates") {
  const double N = 20.0;
  const auto s1 = states::exponential_wp({N, 1.0});
  const auto s0 = states::exponential_wp({N, 0.0});
  const auto r1 = observables::angular_momentum_report(s1);
  const auto r0 = observables::angular_momentum_report(s0);
  const auto e1 = revivals::spread_estimates(N, r1, 1.0);
  const auto e0 = revivals::spread_estimates(N, r0, 1.0);
  CHECK(e1.q_max == doctest::Approx(pi / std::atan(1.0 / (2.0 * std::sqrt(N)))));
  CHECK(e1.q_max == doctest::Approx(28.2).epsilon(0.01));
  CHECK(e1.tau_eta < e0.tau_eta);
  // defining relation of the q-clone lifetime
  const double tau5 = revivals::clone_lifetime(5, e1.delta_L_eta, 1.0);
  CHECK(tau5 * 5.0 * 1.0 * e1.delta_L_eta == doctest::Approx(2.0 * pi));
}
