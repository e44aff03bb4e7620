#ifndef INLOOP_OPTOMECH_HPP_
#define INLOOP_OPTOMECH_HPP_

// Optomechanics inside the loop: modified mechanical/cavity responses,
// position spectra, Stokes/anti-Stokes scattering rates, anti-Stokes
// suppression and the steady-state phonon number in both cooling regimes.

#include <optional>

#include "inloop/cavity_loop.hpp"

namespace inloop {

struct OmLoop {
    CavityLoop cl;
    MechanicalParams mech;
};

// The five coupled response functions at theta_bar = theta_bar_fb - phi_c:
//   zeta_m_G   : mechanical response dressed by the bare optomechanical loop
//   zeta_om    : cavity response dressed by the mechanics (enters lambda_om_fb)
//   zeta_c_fb  : cavity response dressed by the feedback (enters zeta_m_fb_G)
//   zeta_m_fb_G: mechanical response dressed by interaction + feedback
//   lambda_om_fb: squashing factor of the full optomechanical loop
struct OmResponses {
    Complex zeta_m_G;
    Complex zeta_om;
    Complex zeta_c_fb;
    Complex zeta_m_fb_G;
    Complex lambda_om_fb;
};
OmResponses om_responses(double w, const OmLoop& om);

// Cavity response dressed by the mechanics at an arbitrary quadrature phase;
// zeta_om above is this at theta_bar_fb.
Complex zeta_om_phase(double w, double theta_bar, const OmLoop& om);

// Thermal force spectrum entering S_q. The exact form carries the chi_m
// filtering; the flat approximation gamma (2 n_th + 1) is the paper's
// high-Q shortcut used by the approximate spectra.
double thermal_force_psd(double w, const MechanicalParams& mech);
double thermal_force_psd_flat(const MechanicalParams& mech);

// Empty-cavity (G = 0) amplitude-quadrature spectrum S_F(w) of the in-loop
// field, from the closed-form spectral-density matrix. A_+- = G^2 S_F(-+w_m).
double sf_psd_closed(double w, const CavityLoop& cl);

// Radiation-pressure force spectrum 2 G^2 [S_F(w) + S_F(-w)]/2 decomposed the
// printed way (fb,0 / fb,I / fb,II) for diagnostics.
struct PositionPsdTerms {
    double s_th;     // exact thermal term
    double s_rp_0;   // effective-susceptibility term
    double s_rp_I;   // feedback-noise term, theta_bar independent part
    double s_rp_II;  // sin(theta_bar) part, zero at theta_bar = 0
    Complex zeta_m_fb_G;
};
PositionPsdTerms position_psd_terms(double w, const OmLoop& om);

// Symmetrized position spectrum S_q(w) =
//   |zeta_m_fb_G|^2 [S_th + S_rp^(fb,0) + S_rp^(fb,I) + S_rp^(fb,II)].
double position_psd(double w, const OmLoop& om);

// Z_I, Z_II coefficients of the single-pole approximation and the combined
// Z = kappa + Z_I(Delta) + Z_II(Delta).
double z_factor_I(double w, const OmLoop& om);
double z_factor_II(double w, const OmLoop& om);
double z_factor(const OmLoop& om);

// S_q approximated through the effective susceptibility:
//   |zeta_m_fb_G|^2 [S_th + 2 G^2 Z (|chi_eff(w)|^2 + |chi_eff(-w)|^2)].
double position_psd_approx(double w, const OmLoop& om);

// ---- Scattering rates and cooling -------------------------------------------

// Lambda(w) = mu_fb(w) lambda_c,fb(w) zeta_c^(phi_c)(w) / kappa
Complex lambda_coefficient(double w, const CavityLoop& cl);

struct ScatteringRates {
    double a_plus;    // Stokes (heating) rate
    double a_minus;   // anti-Stokes (cooling) rate
    double gamma_opt; // A_- - A_+
    std::optional<double> n_backaction;  // A_+/(A_- - A_+), only when positive damping
    bool strong_coupling_warning;        // kappa_eff <= G
};
ScatteringRates scattering_rates(const OmLoop& om);
// No-feedback reference rates A_+-^o = 2 G^2 kappa |chi_c(-+w_m)|^2.
ScatteringRates scattering_rates_nofb(const OmLoop& om);

// Feedback parameters that null the anti-Stokes interference term at +w_m,
// with theta_bar_fb picked to maximize A_-. Throws GainOutsideStabilityError
// when the required gain is unstable.
struct SuppressionResult {
    double theta_fb;       // detected-quadrature phase to configure
    double theta_bar_fb;   // including the output phase
    double gain;           // gbar_fb
    double phase_offset;   // phi_fb
    ScatteringRates rates; // optimized A_+-
};
SuppressionResult suppress_antistokes(const OmLoop& om);

enum class CoolingMode { generic, suppression_optimal, antisquash };

struct PhononSteady {
    double n_m;
    std::optional<double> kappa_eff_opt;  // antisquash minimizer
    std::optional<double> n_sc;           // standard sideband-cooling reference
    bool strong_coupling_warning;
};

// Steady-state phonon number. generic: rate equation from scattering_rates
// (throws HeatingError when Gamma <= 0); suppression_optimal: the optimized
// closed form; antisquash: minimum of the reduced-linewidth cooling curve.
PhononSteady phonon_steady(const OmLoop& om, CoolingMode mode);

// The antisquash cooling curve n_m(kappa_eff) itself.
double antisquash_nm_curve(const OmLoop& om, double kappa_eff);
// Standard sideband cooling result (gamma n_th + A_+^o)/(gamma + A_-^o - A_+^o).
double sideband_cooling_nm(const OmLoop& om);
// Deep resolved-sideband reference n_m^SC = gamma n_th kappa/(2 G^2) used by
// the antisquash branch.
double sideband_cooling_nm_resolved(const OmLoop& om);

struct AdiabaticParams {
    double gamma_opt;    // light-induced damping Gamma
    double delta_shift;  // mechanical frequency shift
};

// Gamma = 2 G^2 Re{(1,1) [M(w_m) - i w_m 1]^-1 (1,-1)^T} and the Im analogue
// for the shift, from the drift matrix of the effective cavity model.
AdiabaticParams adiabatic_mech_params(const OmLoop& om);

// ---- Static linearization ----------------------------------------------------

struct LinearizeResult {
    double alpha_c;    // steady intracavity amplitude
    double coupling;   // G = g0 alpha_c
    double detuning;   // light-shifted Delta
    int iterations;
};

// Self-consistent Delta = Delta0 - sqrt(2) g0 qbar with
// qbar = sqrt(2) g0 alpha_c^2/omega_m, alpha_c = sqrt(2 k1)|chi_c(0)| alpha_in.
// Throws MultistabilityError listing all branches when the fixed point is not
// unique (or iteration fails to settle).
LinearizeResult linearize_drive(double g0, double alpha_in, const CavityParams& cav,
                                double omega_m);

}  // namespace inloop

#endif  // INLOOP_OPTOMECH_HPP_
