#ifndef INLOOP_CAVITY_LOOP_HPP_
#define INLOOP_CAVITY_LOOP_HPP_

// Empty optical cavity inside the feedback loop: the loop is closed on the
// transmitted or the reflected output. Photocurrent and out-of-loop spectra,
// loop-gain stability windows, steady-state correlations and the effective
// single-pole cavity model.

#include <limits>
#include <vector>

#include "inloop/laser_loop.hpp"
#include "inloop/numerics.hpp"
#include "inloop/spectral.hpp"

namespace inloop {

enum class Port { transmission, reflection };

struct CavityLoop {
    CavityParams cav;
    LaserLoop loop;
    Port port = Port::transmission;

    CavityLoop(CavityParams c, LaserLoop l, Port p)
        : cav(std::move(c)), loop(std::move(l)), port(p) {}

    double kappa_fb() const { return port == Port::reflection ? cav.kappa1 : cav.kappa2; }
    double kappa_un() const { return port == Port::reflection ? cav.kappa2 : cav.kappa1; }
    // Input -> output phase of the detected / unused port. The reflected-port
    // phase uses phi_c' = 0 at the degenerate critical-coupling point so that
    // kappa1 sweeps stay continuous; cavity_phases() itself refuses it.
    double phi_out_fb() const;
    double phi_out_un() const;
    double theta_bar_fb() const { return loop.detector.theta_fb + phi_out_fb(); }

    CavityLoop with_gain(double g) const;
};

// zeta_fb^(theta_bar)(w) = 2 sqrt(kfb k1) zeta_c^(theta_bar)(w)
//                          - cos(theta_bar) [reflection only]
Complex zeta_fb(double w, const CavityLoop& cl);
// Same transfer function towards the unused output at quadrature theta_un.
Complex zeta_un(double w, double theta_un, const CavityLoop& cl);

// h_fb = g (transmission), g / (1 + 2 sqrt(eta) g cos(theta_bar)) (reflection).
// Throws SingularConfigError when the reflection denominator vanishes.
Complex h_fb(double w, const CavityLoop& cl);
// h_fb/g evaluated without the 0/0 at zero gain.
Complex h_over_g(double w, const CavityLoop& cl);

// mu_fb = 2 sqrt(kfb k1 eta) h_fb
Complex mu_fb(double w, const CavityLoop& cl);
// lambda_c,fb = 1 / (1 - 2 mu_fb zeta_c^(theta_bar))
Complex lambda_cfb(double w, const CavityLoop& cl);

// S_i(w) = |h/g|^2 |lambda_c,fb|^2
double photocurrent_psd_cavity(double w, const CavityLoop& cl);

// Total loop gain G_fb(w) = 2 sqrt(eta) g(w) zeta_fb(w); the loop is unstable
// when G_fb = 1, and S_i = |1 - G_fb|^-2.
Complex loop_gain(double w, const CavityLoop& cl);
// Flat-filter loop gain at the reference gain gbar = 1 (G_fb is linear in
// gbar, so this fixes the whole family).
Complex loop_gain_unit(double w, const CavityLoop& cl);

struct StabilityWindow {
    double g_upper_ref;  // G_fb^> = max Re G_fb(w_i)|_{gbar=1}
    double g_lower_ref;  // G_fb^< = min Re G_fb(w_i)|_{gbar=1}
    double gain_min;     // stable gbar interval (may be +-inf)
    double gain_max;
    std::vector<double> im_zeros;
    bool stable_at_current_gain;
};

// Im-zeros of the unit-gain loop gain located by sign-change bracketing on
// `grid` points over |w| <= omega_max (default max(20 kappa, 4 pi/tau)),
// bisected to 1e-10 relative. Throws NumericsError if no zero is found
// (widen the range).
StabilityWindow loop_gain_and_stability(const CavityLoop& cl, double omega_max = 0.0,
                                        int grid = 2048);

// Boolean verdict for a general (not necessarily flat) filter at its own gain.
bool loop_stable(const CavityLoop& cl, double omega_max = 0.0, int grid = 2048);

// S_out,un^(theta_un) = 1 + |2 zeta_un h_fb lambda_c,fb|^2  (>= 1 always)
double outofloop_psd(double w, double theta_un, const CavityLoop& cl);

struct CorrelationMatrix {
    double n_st = 0.0;
    Complex m_st{0.0, 0.0};
    double n_error = 0.0;  // achieved quadrature errors
    double m_error = 0.0;
};

// n_st = (2 k1 / 2 pi) Int |h lambda chi_c|^2 dw,
// m_st = (2 k1 / 2 pi) e^{-2 i phi_c} Int |h lambda|^2 chi_c(w) chi_c(-w) dw.
// Requires a stable loop.
CorrelationMatrix steady_correlations(const CavityLoop& cl, const QuadratureSpec& spec = {});

// chi_c^eff(w) = chi_c(w) lambda_c,fb(w)
Complex effective_susceptibility(double w, const CavityLoop& cl);

// Frequency-dependent effective parameters
// kappa_eff(w) = kappa - Re[e^{-i theta_bar} mu_fb(w)],
// Delta_eff(w) = Delta - Im[e^{-i theta_bar} mu_fb(w)].
double kappa_eff_freq(double w, const CavityLoop& cl);
double delta_eff_freq(double w, const CavityLoop& cl);

struct EffectiveCavity {
    double kappa_eff;         // from the single pole nu = Delta_eff - i kappa_eff
    double delta_eff;
    Complex u;                // pole prefactor, 1 at zero gain
    double kappa_eff_simple;  // short-delay branch
    double delta_eff_simple;
    bool short_delay_warning;  // set when kappa*tau is not small
};

// Single-pole reduction of chi_c^eff near w ~ Delta.
EffectiveCavity effective_params(const CavityLoop& cl);

struct EffectiveNoise {
    double n_in;
    Complex m_in;
};

// Correlations of the effective input noise; requires kappa_eff(+-w) > 0.
EffectiveNoise effective_noise_stats(double w, const CavityLoop& cl);

// Photocurrent response to a classical probe seed of amplitude alpha_s at
// frequency nu (transmission-fed loop): 4 k1 k2 eta alpha_s^2 |chi_c^eff(nu)|^2.
double probe_seed_psd(double nu, double alpha_s, const CavityLoop& cl);

// Steady-state occupancy of the exact effective single-mode model driven by
// the effective noise statistics; equals steady_correlations().n_st up to
// quadrature tolerance. Test oracle for the effective-model route.
double effective_model_nst(const CavityLoop& cl, const QuadratureSpec& spec = {});

}  // namespace inloop

#endif  // INLOOP_CAVITY_LOOP_HPP_
