#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "inloop/laser_loop.hpp"

using namespace inloop;
using std::numbers::pi;

namespace {
LaserLoop loop_of(double gain, double tau, double phi, double eta, double theta) {
    return make_flat_loop(FlatFilter{gain, tau, phi}, DetectorParams(eta, theta));
}
}  // namespace

TEST_CASE("squash factor open loop and phase-quadrature detection") {
    CHECK(squash_factor(0.7, loop_of(0.0, 1.0, 0.0, 1.0, 0.0)) == Complex(1.0, 0.0));
    // detecting the phase quadrature leaves the amplitude loop open
    const LaserLoop l = loop_of(0.9, 1.0, 0.0, 1.0, pi / 2);
    for (double w : {-2.0, 0.3, 11.0})
        CHECK(std::abs(squash_factor(w, l) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("squash factor at an odd extremum with gbar = 1/2 is 1/2") {
    // eta=1, theta=0, w tau = pi -> g = -gbar, lambda = 1/(1+2 gbar) = 1/2
    const LaserLoop l = loop_of(0.5, 1.0, 0.0, 1.0, 0.0);
    const Complex lam = squash_factor(pi, l);
    CHECK(std::abs(lam - Complex(0.5, 0.0)) < 1e-12);
}

TEST_CASE("squash factor conjugate symmetry") {
    const LaserLoop l = loop_of(0.3, 1.7, 0.4, 0.8, 0.2);
    for (double w : {0.13, 1.0, 9.4})
        CHECK(std::abs(squash_factor(-w, l) - std::conj(squash_factor(w, l))) < 1e-14);
}

TEST_CASE("photocurrent PSD") {
    SUBCASE("zero gain gives shot noise at all frequencies") {
        const LaserLoop l = loop_of(0.0, 1.0, 0.0, 0.7, 0.3);
        for (double w : {-8.0, 0.0, 0.5, 3.3}) CHECK(photocurrent_psd(w, l) == 1.0);
    }
    SUBCASE("minima reach 1/4 at the stability boundary") {
        const double g = 0.5 - 1e-9;
        const LaserLoop l = loop_of(g, 1.0, 0.0, 1.0, 0.0);
        CHECK(photocurrent_psd(pi, l) == doctest::Approx(0.25).epsilon(1e-6));
    }
    SUBCASE("closed flat form agrees with |lambda|^2 on random draws") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 500; ++k) {
            const LaserLoop l = loop_of(2.0 * u(rng) - 1.0, 0.2 + 2.0 * u(rng),
                                        2.0 * pi * u(rng), u(rng), 2.0 * pi * u(rng));
            const double w = 20.0 * (u(rng) - 0.5);
            const double a = photocurrent_psd(w, l);
            const double b = photocurrent_psd_flat_form(w, l);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
        }
    }
    SUBCASE("PSD is nonnegative and even in frequency") {
        const LaserLoop l = loop_of(0.4, 1.2, 0.9, 0.9, 0.1);
        for (double w : {0.2, 1.7, 6.0}) {
            CHECK(photocurrent_psd(w, l) >= 0.0);
            CHECK(photocurrent_psd(w, l) ==
                  doctest::Approx(photocurrent_psd(-w, l)).epsilon(1e-13));
        }
    }
}

TEST_CASE("extrema frequencies") {
    SUBCASE("phi=0, tau=1 gives w_n = n pi") {
        const auto ext = extrema_frequencies(loop_of(0.3, 1.0, 0.0, 1.0, 0.0), 3);
        // n=0 appears once (w=0), n=1..3 in +- pairs
        REQUIRE(ext.size() == 7);
        CHECK(ext[0].omega == doctest::Approx(0.0));
        bool found_pi = false;
        for (const auto& e : ext)
            if (std::abs(e.omega - pi) < 1e-12) found_pi = true;
        CHECK(found_pi);
    }
    SUBCASE("even n are maxima when gbar cos(theta) > 0") {
        const auto ext = extrema_frequencies(loop_of(0.3, 1.0, 0.0, 1.0, 0.0), 4);
        for (const auto& e : ext) {
            const int n = static_cast<int>(std::lround(std::abs(e.omega) / pi));
            if (n % 2 == 0) CHECK(e.kind == ExtremumKind::maximum);
            else CHECK(e.kind == ExtremumKind::minimum);
        }
    }
    SUBCASE("tags match numerically located extrema of the sampled PSD") {
        const double tau = 0.8, phi = 0.45, g = 0.35;
        const LaserLoop l = loop_of(g, tau, phi, 0.9, 0.2);
        const auto ext = extrema_frequencies(l, 6);
        const double dw = 1e-4;
        for (const auto& e : ext) {
            if (std::abs(e.omega) < 10 * dw) continue;  // skip the DC convention point
            const double c = photocurrent_psd(e.omega, l);
            const double m = photocurrent_psd(e.omega - dw, l);
            const double p = photocurrent_psd(e.omega + dw, l);
            if (e.kind == ExtremumKind::maximum) {
                CHECK(c >= m);
                CHECK(c >= p);
            } else {
                CHECK(c <= m);
                CHECK(c <= p);
            }
        }
    }
    SUBCASE("zero delay is an error") {
        CHECK_THROWS_AS(extrema_frequencies(loop_of(0.3, 0.0, 0.0, 1.0, 0.0), 2),
                        std::invalid_argument);
    }
}

TEST_CASE("in-loop quadrature PSD") {
    SUBCASE("zero gain gives vacuum") {
        const LaserLoop l = loop_of(0.0, 1.0, 0.0, 0.8, 0.4);
        CHECK(inloop_quadrature_psd(1.3, 0.9, l) == doctest::Approx(1.0));
    }
    SUBCASE("eta=1, phi=theta_fb=0 equals the photocurrent PSD (1+2g lambda = lambda)") {
        const LaserLoop l = loop_of(0.35, 1.0, 0.0, 1.0, 0.0);
        for (double w : {0.3, 1.0, 2.9, 7.7})
            CHECK(inloop_quadrature_psd(w, 0.0, l) ==
                  doctest::Approx(photocurrent_psd(w, l)).epsilon(1e-12));
    }
    SUBCASE("constructed interference zero vanishes inside the stable window") {
        const double theta = 1.4, tau = 1.0, phifb = 0.0;
        const auto z = interference_zero_tuple(theta, pi / 3, tau, phifb);
        const LaserLoop l = loop_of(z.gain, tau, phifb, 1.0, theta);
        CHECK(laser_stability(l).stable);
        CHECK(inloop_quadrature_psd(z.omega, z.phi, l) < 1e-10);
        CHECK(z.gain == doctest::Approx(1.0 / (2.0 * std::sin(pi / 3))).epsilon(1e-12));
    }
    SUBCASE("invariant under phi -> phi + 2 pi") {
        const LaserLoop l = loop_of(0.3, 1.1, 0.2, 0.85, 0.6);
        CHECK(inloop_quadrature_psd(2.0, 0.7, l) ==
              doctest::Approx(inloop_quadrature_psd(2.0, 0.7 + 2 * pi, l)).epsilon(1e-12));
    }
}

TEST_CASE("laser stability bound") {
    SUBCASE("zero gain is stable with margin 1/(2 sqrt(eta))") {
        const auto s = laser_stability(loop_of(0.0, 1.0, 0.0, 0.64, 0.0));
        CHECK(s.stable);
        CHECK(s.margin == doctest::Approx(0.5 / 0.8).epsilon(1e-12));
    }
    SUBCASE("eta=1, theta=0, gbar=0.5 sits on the boundary: not stable") {
        CHECK_FALSE(laser_stability(loop_of(0.5, 1.0, 0.0, 1.0, 0.0)).stable);
    }
    SUBCASE("eta=0.25, theta=0 threshold gain is 1") {
        CHECK_FALSE(laser_stability(loop_of(1.0, 1.0, 0.0, 0.25, 0.0)).stable);
        CHECK(laser_stability(loop_of(0.999, 1.0, 0.0, 0.25, 0.0)).stable);
    }
}

TEST_CASE("flat-filter squashing floor: min S_i >= 1/4 inside the window") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double eta = 0.3 + 0.7 * u(rng), theta = 0.8 * u(rng);
        const double gmax = 0.5 / (std::sqrt(eta) * std::cos(theta));
        const LaserLoop l = loop_of((2.0 * u(rng) - 1.0) * 0.999 * gmax, 1.0,
                                    2 * pi * u(rng), eta, theta);
        for (int i = 0; i <= 200; ++i)
            CHECK(photocurrent_psd(i * 4.0 * pi / 200, l) >= 0.25 - 1e-12);
    }
}

TEST_CASE("detector params consistency invariant") {
    CHECK_NOTHROW(DetectorParams(0.8, 0.0, 0.96, 0.2));
    CHECK_THROWS_AS(DetectorParams(0.8, 0.0, 0.9, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(DetectorParams(1.2, 0.0), std::invalid_argument);
}
