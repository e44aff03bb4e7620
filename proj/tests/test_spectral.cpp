#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "inloop/spectral.hpp"

using namespace inloop;
using std::numbers::pi;

namespace {
const CavityParams kCav(0.3, 0.5, 0.2, 2.0);  // kappa = 1
}

TEST_CASE("chi_c at resonance is 1/kappa, purely real") {
    const Complex v = chi_c(kCav.detuning, kCav);
    CHECK(v.real() == doctest::Approx(1.0 / kCav.kappa()).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(0.0));
}

TEST_CASE("chi_c direct substitution: w=0, Delta=kappa -> (1-i)/(2 kappa)") {
    const CavityParams cav(0.5, 0.5, 0.0, 1.0);
    const Complex v = chi_c(0.0, cav);
    CHECK(std::abs(v - Complex(0.5, -0.5)) < 1e-14);
}

TEST_CASE("|chi_c|^2 peaks at the detuning over a dense grid") {
    double best_w = 0.0, best = -1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double w = -10.0 + 20.0 * i / 4000.0;
        const double v = std::norm(chi_c(w, kCav));
        if (v > best) {
            best = v;
            best_w = w;
        }
    }
    CHECK(best_w == doctest::Approx(kCav.detuning).epsilon(1e-3));
}

TEST_CASE("cavity phases") {
    SUBCASE("Delta = 0 -> phi_c = 0") {
        const CavityParams cav(0.5, 0.3, 0.0, 0.0);
        CHECK(cavity_phases(cav).phi_c == doctest::Approx(0.0));
    }
    SUBCASE("Delta = kappa -> phi_c = -pi/4") {
        const CavityParams cav(0.5, 0.5, 0.0, 1.0);
        CHECK(cavity_phases(cav).phi_c == doctest::Approx(-pi / 4).epsilon(1e-14));
    }
    SUBCASE("single-sided resonant -> phi_c' = 0") {
        const CavityParams cav(1.0, 0.0, 0.0, 0.0);
        CHECK(cavity_phases(cav).phi_c_prime == doctest::Approx(0.0));
    }
    SUBCASE("critically coupled on resonance is degenerate") {
        const CavityParams cav(0.5, 0.5, 0.0, 0.0);
        CHECK_THROWS_AS(cavity_phases(cav), DegeneratePhaseError);
        CHECK(cavity_phases_or(cav, 0.0).phi_c_prime == 0.0);
    }
}

TEST_CASE("zeta_c on resonance with theta 0 is 1/(kappa - i w)") {
    const CavityParams cav(0.4, 0.4, 0.2, 0.0);
    for (double w : {-3.0, -0.7, 0.0, 0.2, 5.0}) {
        const Complex expect = 1.0 / Complex(cav.kappa(), -w);
        CHECK(std::abs(zeta_c(w, 0.0, cav) - expect) < 1e-14);
    }
}

TEST_CASE("conjugate symmetry of every response on random draws") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::uniform_real_distribution<double> us(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const CavityParams cav(u(rng), u(rng), 0.1 * u(rng), us(rng));
        const MechanicalParams mech(u(rng) + 1.0, 1e-3 * u(rng), 10.0, 0.1);
        const FlatFilter f{us(rng), u(rng), us(rng)};
        const double w = us(rng), th = us(rng);
        CHECK(std::abs(chi_c(-w, cav) - 1.0 / Complex(cav.kappa(), cav.detuning + w)) <
              1e-14);
        CHECK(std::abs(zeta_c(-w, th, cav) - std::conj(zeta_c(w, th, cav))) < 1e-14);
        CHECK(std::abs(zeta_m(-w, mech) - std::conj(zeta_m(w, mech))) < 1e-14);
        CHECK(std::abs(f.value(-w) - std::conj(f.value(w))) < 1e-14);
    }
}

TEST_CASE("flat filter with zero gain vanishes everywhere") {
    const FlatFilter f{0.0, 1.3, 0.7};
    for (double w : {-5.0, 0.0, 1.0, 17.0}) CHECK(std::abs(f.value(w)) == 0.0);
}

TEST_CASE("flat filter DC point is exactly the gain") {
    const FlatFilter f{0.25, 2.0, 1.1};
    CHECK(f.value(0.0) == Complex(0.25, 0.0));
}

TEST_CASE("mechanical response") {
    const MechanicalParams mech(1.0, 1e-4, 0.0, 0.0);
    SUBCASE("static limit zeta_m(0) ~ 1/omega_m") {
        CHECK(std::abs(zeta_m(0.0, mech) - Complex(1.0, 0.0)) < 1e-6);
    }
    SUBCASE("exact vs approximant near resonance, gamma = 1e-4 omega_m") {
        const double w = mech.omega_m;
        const Complex a = zeta_m(w, mech), b = zeta_m_approx(w, mech);
        CHECK(std::abs(a - b) / std::abs(a) < 1e-3);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(CavityParams(-0.1, 0.5, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CavityParams(0.0, 0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MechanicalParams(1.0, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MechanicalParams(1.0, 1e-3, -1.0, 0.0), std::invalid_argument);
    CHECK(MechanicalParams(1.0, 0.5, 0.0, 0.0).warnings().size() == 1);
    CHECK(MechanicalParams(1.0, 1e-4, 0.0, 0.0).warnings().empty());
    CHECK_THROWS_AS(ComplexSpectrum({1.0, 1.0}, {Complex{}, Complex{}}),
                    std::invalid_argument);
}
