#ifndef INLOOP_PULSE_HPP_
#define INLOOP_PULSE_HPP_

// Response to a short light pulse near the red sideband (Delta ~ omega_m):
// coherent light-matter oscillations in the rotating frame. Three routes of
// decreasing fidelity: the delayed equations with non-resonant terms kept
// (full_dde), the effective-cavity equations (effective), and the
// sin/cos closed form (closed_form).

#include <vector>

#include "inloop/numerics.hpp"
#include "inloop/optomech.hpp"

namespace inloop {

enum class PulseMode { full_dde, effective, closed_form };

struct PulseTrace {
    std::vector<double> times;
    std::vector<Complex> alpha_bar;  // slowly varying cavity amplitude
    std::vector<Complex> beta_bar;   // slowly varying mechanical amplitude
    Complex alpha_p;                 // pulse amplitude
    PulseMode mode;
    bool effective;                  // true for the reduced (no-delay) models
    double kappa_eff;
    double delta_eff;
};

struct EffectivePulseParams {
    double kappa_eff;  // kappa - mu_bar cos(w_m tau - theta_bar_fb)
    double delta_eff;  // (Delta - w_m) - mu_bar sin(w_m tau - theta_bar_fb)
    double mu_bar;     // 2 sqrt(kfb k1 eta) gbar
};
EffectivePulseParams pulse_effective_params(const OmLoop& om);

// Integrate/evaluate the pulse response on [0, horizon]. The delta pulse is
// the exact initial condition alpha_bar(0+) = 2 sqrt(pi k1) alpha_p e^{-i phi_c}
// shared by all three modes (no numeric impulse). step = 0 picks
// min(tau/10, 1/(50 w_m)); an explicit step > tau/10 is refused.
PulseTrace pulse_response(const OmLoop& om, Complex alpha_p, double horizon,
                          PulseMode mode, double step = 0.0);

struct OscillationFit {
    double frequency;     // from successive |beta| peaks
    double envelope_rate; // decay rate of the peak envelope
    int n_peaks;
};
// Peak-based estimate of the oscillation frequency and envelope decay of
// |beta_bar(t)|.
OscillationFit fit_oscillation(const PulseTrace& trace);

}  // namespace inloop

#endif  // INLOOP_PULSE_HPP_
