#ifndef INLOOP_LASER_LOOP_HPP_
#define INLOOP_LASER_LOOP_HPP_

// Feedback on a free laser beam: a quadrature at phase theta_fb is detected
// with efficiency eta and the photocurrent modulates the beam amplitude
// through a causal filter. Squashing/anti-squashing of the photocurrent,
// in-loop quadrature spectra and the flat-filter stability bound live here.

#include <optional>
#include <vector>

#include "inloop/spectral.hpp"

namespace inloop {

struct DetectorParams {
    double eta = 1.0;       // effective efficiency in [0, 1]
    double theta_fb = 0.0;  // detected quadrature phase [rad]
    // Optional bookkeeping: eta = eta_d / (1 + S_e/S_sn) must hold to 1e-12
    // when both are supplied.
    std::optional<double> eta_d;
    std::optional<double> noise_ratio;  // S_e / S_sn

    DetectorParams(double eta_, double theta,
                   std::optional<double> etad = std::nullopt,
                   std::optional<double> ratio = std::nullopt);
};

struct LaserLoop {
    FilterFunction filter;
    DetectorParams detector;
};

LaserLoop make_flat_loop(const FlatFilter& f, const DetectorParams& det);

// lambda(w) = 1 / (1 - 2 sqrt(eta) g(w) cos(theta_fb)); divergence is
// representable (stability is a separate check).
Complex squash_factor(double w, const LaserLoop& loop);

// S_i(w) = |lambda(w)|^2, shot-noise units.
double photocurrent_psd(double w, const LaserLoop& loop);

// Printed flat-filter closed form
// [1 - 4 sqrt(eta) cos(theta) gbar cos(|w| tau + phi) + 4 eta gbar^2 cos^2(theta)]^-1,
// kept as an independent code path for cross-checks.
double photocurrent_psd_flat_form(double w, const LaserLoop& loop);

enum class ExtremumKind { maximum, minimum };
struct Extremum {
    double omega;
    ExtremumKind kind;
};

// Flat-filter extrema w_n = +-(n pi - phi_fb)/tau_fb, n = 0..n_max, tagged by
// parity and the sign of gbar cos(theta_fb). Throws for delay = 0.
std::vector<Extremum> extrema_frequencies(const LaserLoop& loop, int n_max);

// S_{X_in^(phi)}(w) = |1 + 2 sqrt(eta) cos(phi) g lambda e^{i(phi-theta)}|^2
//                   + 4 (1-eta) cos^2(phi) |g lambda|^2.
double inloop_quadrature_psd(double w, double phi, const LaserLoop& loop);

struct LaserStability {
    bool stable;
    double margin;  // 1/(2 sqrt(eta)) - |gbar cos(theta_fb)|
};

// Flat-filter closed-form bound |gbar cos(theta_fb)| < 1/(2 sqrt(eta)).
LaserStability laser_stability(const LaserLoop& loop);

// Constructs a perfect-interference tuple for eta = 1: quadrature phase
// phi = theta_fb - dphi, gain gbar = 1/(2 |sin dphi|) and the smallest
// positive frequency at which S_{X_in^(phi)} vanishes exactly.
struct InterferenceZero {
    double phi;
    double gain;
    double omega;
};
InterferenceZero interference_zero_tuple(double theta_fb, double dphi,
                                         double tau, double phi_fb);

}  // namespace inloop

#endif  // INLOOP_LASER_LOOP_HPP_
