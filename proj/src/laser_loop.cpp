#include "inloop/laser_loop.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace inloop {

using std::numbers::pi;

DetectorParams::DetectorParams(double eta_, double theta, std::optional<double> etad,
                               std::optional<double> ratio)
    : eta(eta_), theta_fb(theta), eta_d(etad), noise_ratio(ratio) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("DetectorParams: eta must be in [0, 1]");
    if (eta_d && noise_ratio) {
        const double implied = *eta_d / (1.0 + *noise_ratio);
        if (std::abs(eta - implied) > 1e-12)
            throw std::invalid_argument(
                "DetectorParams: eta != eta_d/(1 + S_e/S_sn) beyond 1e-12");
    }
}

LaserLoop make_flat_loop(const FlatFilter& f, const DetectorParams& det) {
    return {FilterFunction::from_flat(f), det};
}

Complex squash_factor(double w, const LaserLoop& loop) {
    const double c = std::cos(loop.detector.theta_fb);
    return 1.0 / (1.0 - 2.0 * std::sqrt(loop.detector.eta) * loop.filter(w) * c);
}

double photocurrent_psd(double w, const LaserLoop& loop) {
    return std::norm(squash_factor(w, loop));
}

double photocurrent_psd_flat_form(double w, const LaserLoop& loop) {
    const FlatFilter& f = loop.filter.require_flat("photocurrent_psd_flat_form");
    const double eta = loop.detector.eta;
    const double c = std::cos(loop.detector.theta_fb);
    const double cosph = (w == 0.0) ? 1.0 : std::cos(std::abs(w) * f.delay + f.phase_offset);
    return 1.0 / (1.0 - 4.0 * std::sqrt(eta) * c * f.gain * cosph +
                  4.0 * eta * f.gain * f.gain * c * c);
}

std::vector<Extremum> extrema_frequencies(const LaserLoop& loop, int n_max) {
    const FlatFilter& f = loop.filter.require_flat("extrema_frequencies");
    if (f.delay <= 0.0)
        throw std::invalid_argument("extrema_frequencies: delay must be > 0 "
                                    "(no discrete extrema otherwise)");
    const double gc = f.gain * std::cos(loop.detector.theta_fb);
    std::vector<Extremum> out;
    for (int n = 0; n <= n_max; ++n) {
        const double w = (n * pi - f.phase_offset) / f.delay;
        // The formula parametrizes the w > 0 branch (phase w tau + phi); the
        // spectrum is even, so each positive root mirrors to -w. A
        // nonpositive w_n does not solve the w > 0 branch condition, except
        // for the w = 0 point when phi_fb = 0.
        if (w < 0.0 || (w == 0.0 && f.phase_offset != 0.0)) continue;
        // even n: squash factor hits 1/(1 - 2 sqrt(eta) gbar cos) -> maxima
        // when gbar cos(theta) > 0, minima otherwise; odd n the other way.
        const bool even_is_max = gc > 0.0;
        const ExtremumKind kind = ((n % 2 == 0) == even_is_max) ? ExtremumKind::maximum
                                                                : ExtremumKind::minimum;
        out.push_back({w, kind});
        if (w > 0.0) out.push_back({-w, kind});
    }
    return out;
}

double inloop_quadrature_psd(double w, double phi, const LaserLoop& loop) {
    const double eta = loop.detector.eta;
    const double cphi = std::cos(phi);
    const Complex g = loop.filter(w);
    const Complex lam = squash_factor(w, loop);
    const Complex coherent =
        1.0 + 2.0 * std::sqrt(eta) * cphi * g * lam *
                  std::exp(kI * (phi - loop.detector.theta_fb));
    return std::norm(coherent) + 4.0 * (1.0 - eta) * cphi * cphi * std::norm(g * lam);
}

LaserStability laser_stability(const LaserLoop& loop) {
    const FlatFilter& f = loop.filter.require_flat("laser_stability");
    const double eta = loop.detector.eta;
    const double drive = std::abs(f.gain * std::cos(loop.detector.theta_fb));
    if (eta == 0.0) return {true, std::numeric_limits<double>::infinity()};
    const double bound = 0.5 / std::sqrt(eta);
    return {drive < bound, bound - drive};
}

InterferenceZero interference_zero_tuple(double theta_fb, double dphi,
                                         double tau, double phi_fb) {
    if (tau <= 0.0) throw std::invalid_argument("interference_zero_tuple: tau must be > 0");
    const double s = std::sin(dphi);
    if (s == 0.0)
        throw std::invalid_argument("interference_zero_tuple: dphi must not be a multiple of pi");
    const double phi = theta_fb - dphi;
    // 1 + 2 cos(phi) g lambda e^{i(phi-theta)} = 0 requires
    // g = e^{i(3 pi/2 - phi)} / (2 sin(dphi)); for the flat filter the phase
    // condition fixes w tau + phi_fb mod 2 pi.
    const Complex gtarget = -1.0 / (2.0 * std::sin(-dphi) * kI * std::exp(kI * phi));
    double arg = std::arg(gtarget);  // = w tau + phi_fb (for gain > 0)
    double w = (arg - phi_fb) / tau;
    const double period = 2.0 * pi / tau;
    while (w <= 0.0) w += period;
    return {phi, std::abs(gtarget), w};
}

}  // namespace inloop
