#include "inloop/optomech.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inloop {

using std::numbers::pi;

namespace {

double phi_c_of(const CavityLoop& cl) { return cavity_phases_or(cl.cav, 0.0).phi_c; }

}  // namespace

Complex zeta_om_phase(double w, double theta_bar, const OmLoop& om) {
    const CavityParams& cav = om.cl.cav;
    const double G = om.mech.coupling;
    const double phic = phi_c_of(om.cl);
    const Complex zm = zeta_m(w, om.mech);
    const Complex zmG = 1.0 / (1.0 / zm - 4.0 * G * G * zeta_c(w, -0.5 * pi, cav));
    return zmG * (zeta_c(w, theta_bar, cav) / zm +
                  4.0 * G * G * std::cos(phic) * std::sin(theta_bar - phic) *
                      chi_c(w, cav) * std::conj(chi_c(-w, cav)));
}

OmResponses om_responses(double w, const OmLoop& om) {
    const CavityParams& cav = om.cl.cav;
    const double G = om.mech.coupling;
    const double phic = phi_c_of(om.cl);
    const double tbfb = om.cl.theta_bar_fb();
    const double tb = tbfb - phic;

    OmResponses r;
    const Complex zm = zeta_m(w, om.mech);
    r.zeta_m_G = 1.0 / (1.0 / zm - 4.0 * G * G * zeta_c(w, -0.5 * pi, cav));
    r.zeta_om = zeta_om_phase(w, tbfb, om);
    r.lambda_om_fb = 1.0 / (1.0 - 2.0 * mu_fb(w, om.cl) * r.zeta_om);
    r.zeta_c_fb = lambda_cfb(w, om.cl) * zeta_c(w, -0.5 * pi, cav) *
                  (1.0 + 2.0 * mu_fb(w, om.cl) * chi_c(w, cav) * std::conj(chi_c(-w, cav)) *
                             std::cos(phic) * std::sin(tb));
    r.zeta_m_fb_G = 1.0 / (1.0 / zm - 4.0 * G * G * r.zeta_c_fb);
    return r;
}

double thermal_force_psd(double w, const MechanicalParams& mech) {
    const double n2 = 2.0 * mech.n_th + 1.0;
    const double cp = std::norm(chi_m(w, mech));
    const double cm = std::norm(chi_m(-w, mech));
    return mech.gamma * n2 * (cp + cm) / (4.0 * std::norm(zeta_m(w, mech)));
}

double thermal_force_psd_flat(const MechanicalParams& mech) {
    return mech.gamma * (2.0 * mech.n_th + 1.0);
}

double sf_psd_closed(double w, const CavityLoop& cl) {
    const CavityParams& cav = cl.cav;
    const double phic = phi_c_of(cl);
    const double tbfb = cl.theta_bar_fb();
    const Complex chiw = chi_c(w, cav);
    const Complex hl = h_fb(w, cl) * lambda_cfb(w, cl);
    const Complex mul = mu_fb(w, cl) * lambda_cfb(w, cl);
    const Complex zphic = zeta_c(w, phic, cav);
    // Element sum of the spectral-density matrix S_a(w): vacuum leak, feedback
    // noise fed through both quadratures, and the interference terms.
    return 2.0 * cav.kappa() * std::norm(chiw) +
           8.0 * cav.kappa1 * std::norm(hl * zphic) +
           4.0 * (std::exp(-kI * (tbfb - phic)) * mul * chiw * zphic).real();
}

PositionPsdTerms position_psd_terms(double w, const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const CavityParams& cav = cl.cav;
    const double G = om.mech.coupling;
    const double G2 = G * G;
    const double K = cav.kappa();
    const double phic = phi_c_of(cl);
    const double tbfb = cl.theta_bar_fb();
    const double tb = tbfb - phic;
    const double kfb = cl.kappa_fb();
    const double eta = cl.loop.detector.eta;

    const Complex mu = mu_fb(w, cl);
    const Complex lam = lambda_cfb(w, cl);
    const Complex chieff_p = chi_c(w, cav) * lam;
    const Complex chieff_m = chi_c(-w, cav) * lambda_cfb(-w, cl);
    const Complex cc = chi_c(w, cav) * std::conj(chi_c(-w, cav));
    const Complex zphic = zeta_c(w, phic, cav);

    PositionPsdTerms t;
    t.s_th = thermal_force_psd(w, om.mech);
    t.s_rp_0 = 2.0 * G2 * K * (std::norm(chieff_p) + std::norm(chieff_m));
    t.s_rp_I = 4.0 * G2 * std::norm(mu) / (kfb * eta) * std::norm(lam * zphic) -
               4.0 * G2 * std::norm(lam) * 2.0 *
                   (mu * zphic * std::conj(zeta_c(w, -tb, cav))).real();
    t.s_rp_II =
        16.0 * K * G2 * std::norm(mu * lam * cc) * std::sin(tb) * std::sin(tb) +
        16.0 * K * G2 * std::norm(lam) *
            (mu * cc * std::conj(zeta_c(w, phic - 0.5 * pi, cav))).real() * std::sin(tb) -
        16.0 * G2 * std::norm(mu * lam) * (cc * std::conj(zphic)).real() *
            std::sin(tbfb) * std::sin(tb);
    t.zeta_m_fb_G = om_responses(w, om).zeta_m_fb_G;
    return t;
}

double position_psd(double w, const OmLoop& om) {
    const PositionPsdTerms t = position_psd_terms(w, om);
    return std::norm(t.zeta_m_fb_G) * (t.s_th + t.s_rp_0 + t.s_rp_I + t.s_rp_II);
}

double z_factor_I(double w, const OmLoop& om) {
    const Complex mu = mu_fb(w, om.cl);
    return std::norm(mu) / (2.0 * om.cl.kappa_fb() * om.cl.loop.detector.eta) -
           (mu * std::exp(-kI * om.cl.theta_bar_fb())).real();
}

double z_factor_II(double w, const OmLoop& om) {
    const CavityParams& cav = om.cl.cav;
    const double K = cav.kappa(), D = cav.detuning;
    const double phic = phi_c_of(om.cl);
    const double tbfb = om.cl.theta_bar_fb();
    const double tb = tbfb - phic;
    const Complex mu = mu_fb(w, om.cl);
    const Complex km2id = Complex(K, -2.0 * D);
    return 8.0 * K * std::norm(mu) * std::sin(tb) * std::sin(tb) / (K * K + 4.0 * D * D) +
           4.0 * K * std::sin(tb) * (-kI * mu * std::exp(kI * phic) / km2id).real() -
           4.0 * std::norm(mu) * std::sin(tbfb) * std::sin(tb) *
               (std::exp(kI * phic) / km2id).real();
}

double z_factor(const OmLoop& om) {
    const double D = om.cl.cav.detuning;
    return om.cl.cav.kappa() + z_factor_I(D, om) + z_factor_II(D, om);
}

double position_psd_approx(double w, const OmLoop& om) {
    const double G2 = om.mech.coupling * om.mech.coupling;
    const Complex chieff_p = effective_susceptibility(w, om.cl);
    const Complex chieff_m = effective_susceptibility(-w, om.cl);
    const Complex zmfbG = om_responses(w, om).zeta_m_fb_G;
    return std::norm(zmfbG) *
           (thermal_force_psd_flat(om.mech) +
            2.0 * G2 * z_factor(om) * (std::norm(chieff_p) + std::norm(chieff_m)));
}

Complex lambda_coefficient(double w, const CavityLoop& cl) {
    return mu_fb(w, cl) * lambda_cfb(w, cl) * zeta_c(w, phi_c_of(cl), cl.cav) /
           cl.cav.kappa();
}

namespace {

bool strong_coupling(const OmLoop& om) {
    const double keff = effective_params(om.cl).kappa_eff_simple;
    return keff <= om.mech.coupling;
}

}  // namespace

ScatteringRates scattering_rates(const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const double wm = om.mech.omega_m;
    const double G2 = om.mech.coupling * om.mech.coupling;
    const double K = cl.cav.kappa();
    const double excess = K / (cl.kappa_fb() * cl.loop.detector.eta) - 1.0;
    const Complex phase = std::exp(kI * (cl.theta_bar_fb() - phi_c_of(cl)));
    const double lam2 = std::norm(lambda_coefficient(wm, cl));

    auto rate = [&](double sign) {
        const Complex interf =
            chi_c(-sign * wm, cl.cav) + lambda_coefficient(sign * wm, cl) * phase;
        return 2.0 * G2 * K * (std::norm(interf) + excess * lam2);
    };

    ScatteringRates r;
    r.a_plus = rate(+1.0);
    r.a_minus = rate(-1.0);
    r.gamma_opt = r.a_minus - r.a_plus;
    if (r.gamma_opt > 0.0) r.n_backaction = r.a_plus / r.gamma_opt;
    r.strong_coupling_warning = strong_coupling(om);
    return r;
}

ScatteringRates scattering_rates_nofb(const OmLoop& om) {
    const double wm = om.mech.omega_m;
    const double G2 = om.mech.coupling * om.mech.coupling;
    const double K = om.cl.cav.kappa();
    ScatteringRates r;
    r.a_plus = 2.0 * G2 * K * std::norm(chi_c(-wm, om.cl.cav));
    r.a_minus = 2.0 * G2 * K * std::norm(chi_c(wm, om.cl.cav));
    r.gamma_opt = r.a_minus - r.a_plus;
    if (r.gamma_opt > 0.0) r.n_backaction = r.a_plus / r.gamma_opt;
    r.strong_coupling_warning = false;
    return r;
}

SuppressionResult suppress_antistokes(const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const CavityParams& cav = cl.cav;
    const FlatFilter& f = cl.loop.filter.require_flat("suppress_antistokes");
    const double wm = om.mech.omega_m;
    const double K = cav.kappa(), D = cav.detuning;
    const double eta = cl.loop.detector.eta;
    const double kfb = cl.kappa_fb();
    const double phic = phi_c_of(cl);

    // Optimal detected phase: e^{2 i theta_bar} =
    //   -e^{2 i phi_c} (k - i(D - wm))(k - i(D + wm)) / |...|.
    const Complex zp = Complex(K, -(D - wm));
    const Complex zm = Complex(K, -(D + wm));
    const Complex rhs = -std::exp(2.0 * kI * phic) * (zp / std::abs(zp)) * (zm / std::abs(zm));
    const double theta_bar = 0.5 * std::arg(rhs);

    // Rebuild the loop with the target theta_fb so all phase-dependent
    // transfer functions see the optimal quadrature.
    CavityLoop tuned = cl;
    tuned.loop.detector.theta_fb = theta_bar - cl.phi_out_fb();

    // Lambda(wm) e^{i(theta_bar - phi_c)} = -chi_c(-wm) pins the complex filter
    // value through two Moebius inversions: Lambda <- h <- g.
    const Complex target = -chi_c(-wm, cav) * std::exp(-kI * (theta_bar - phic));
    const double c1 = 2.0 * std::sqrt(kfb * cav.kappa1 * eta);
    const Complex zeta1 = zeta_c(wm, theta_bar, cav);
    const Complex zeta2 = zeta_c(wm, phic, cav);
    const Complex s = target * K / (c1 * zeta2);
    const Complex h = s / (1.0 + 2.0 * c1 * zeta1 * s);
    const double rdir =
        (cl.port == Port::reflection) ? 2.0 * std::sqrt(eta) * std::cos(theta_bar) : 0.0;
    const Complex g_val = h / (1.0 - rdir * h);

    const double gain = std::abs(g_val);
    double phase_offset = std::remainder(std::arg(g_val) - wm * f.delay, 2.0 * pi);

    tuned.loop.filter =
        FilterFunction::from_flat(FlatFilter{gain, f.delay, phase_offset});
    const StabilityWindow win = loop_gain_and_stability(tuned);
    if (!win.stable_at_current_gain)
        throw GainOutsideStabilityError(
            "suppress_antistokes: required gain " + std::to_string(gain) +
                " outside stable window (" + std::to_string(win.gain_min) + ", " +
                std::to_string(win.gain_max) + ")",
            gain, win.gain_min, win.gain_max);

    SuppressionResult out;
    out.theta_fb = tuned.loop.detector.theta_fb;
    out.theta_bar_fb = theta_bar;
    out.gain = gain;
    out.phase_offset = phase_offset;

    // Optimized rates in terms of the no-feedback ones.
    const double G2 = om.mech.coupling * om.mech.coupling;
    const double ap0 = 2.0 * G2 * K * std::norm(chi_c(-wm, cav));
    const double am0 = 2.0 * G2 * K * std::norm(chi_c(wm, cav));
    out.rates.a_plus = (K / (eta * kfb) - 1.0) * ap0;
    out.rates.a_minus = (std::sqrt(am0) + std::sqrt(ap0)) * (std::sqrt(am0) + std::sqrt(ap0)) +
                        out.rates.a_plus;
    out.rates.gamma_opt = out.rates.a_minus - out.rates.a_plus;
    if (out.rates.gamma_opt > 0.0)
        out.rates.n_backaction = out.rates.a_plus / out.rates.gamma_opt;
    out.rates.strong_coupling_warning =
        strong_coupling({tuned, om.mech});
    return out;
}

double antisquash_nm_curve(const OmLoop& om, double kappa_eff) {
    if (kappa_eff <= 0.0)
        throw std::invalid_argument("antisquash_nm_curve: kappa_eff must be > 0");
    const double K = om.cl.cav.kappa();
    const double n_sc = sideband_cooling_nm_resolved(om);
    const double eta = om.cl.loop.detector.eta;
    const double kfb = om.cl.kappa_fb();
    return n_sc * kappa_eff / K +
           (K - kappa_eff) * (K - kappa_eff) / (4.0 * eta * kfb * kappa_eff);
}

double sideband_cooling_nm(const OmLoop& om) {
    const ScatteringRates r0 = scattering_rates_nofb(om);
    const double g = om.mech.gamma;
    return (g * om.mech.n_th + r0.a_plus) / (g + r0.gamma_opt);
}

// n_m^SC = gamma n_th kappa / (2 G^2): the deep-resolved-sideband limit used
// by the antisquash branch.
double sideband_cooling_nm_resolved(const OmLoop& om) {
    const double G2 = om.mech.coupling * om.mech.coupling;
    return om.mech.gamma * om.mech.n_th * om.cl.cav.kappa() / (2.0 * G2);
}

PhononSteady phonon_steady(const OmLoop& om, CoolingMode mode) {
    PhononSteady out;
    out.strong_coupling_warning = false;
    const double g = om.mech.gamma;
    switch (mode) {
        case CoolingMode::generic: {
            const ScatteringRates r = scattering_rates(om);
            if (r.gamma_opt <= 0.0)
                throw HeatingError("phonon_steady: Gamma <= 0, feedback heats the mode");
            out.n_m = (g * om.mech.n_th + r.a_plus) / (g + r.gamma_opt);
            out.strong_coupling_warning = r.strong_coupling_warning;
            break;
        }
        case CoolingMode::suppression_optimal: {
            const double K = om.cl.cav.kappa();
            const double eta = om.cl.loop.detector.eta;
            const double kfb = om.cl.kappa_fb();
            const double G2 = om.mech.coupling * om.mech.coupling;
            const double ap0 = 2.0 * G2 * K * std::norm(chi_c(-om.mech.omega_m, om.cl.cav));
            const double am0 = 2.0 * G2 * K * std::norm(chi_c(om.mech.omega_m, om.cl.cav));
            const double s = std::sqrt(am0) + std::sqrt(ap0);
            out.n_m = (g * om.mech.n_th + (K / (eta * kfb) - 1.0) * ap0) / (g + s * s);
            break;
        }
        case CoolingMode::antisquash: {
            const double K = om.cl.cav.kappa();
            const double eta = om.cl.loop.detector.eta;
            const double kfb = om.cl.kappa_fb();
            const double n_sc = sideband_cooling_nm_resolved(om);
            const double root = std::sqrt(1.0 + 4.0 * eta * kfb * n_sc / K);
            out.n_m = 2.0 * n_sc / (1.0 + root);
            out.kappa_eff_opt = K / root;
            out.n_sc = n_sc;
            out.strong_coupling_warning = *out.kappa_eff_opt <= om.mech.coupling;
            break;
        }
    }
    return out;
}

AdiabaticParams adiabatic_mech_params(const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const double wm = om.mech.omega_m;
    const double phic = phi_c_of(cl);
    const Complex psi = std::exp(kI * (cl.theta_bar_fb() - 2.0 * phic));
    const Complex mu = mu_fb(wm, cl);

    // [M(wm) - i wm 1] with the frequency-dependent effective parameters.
    const Complex A = Complex(kappa_eff_freq(wm, cl), delta_eff_freq(wm, cl) - wm);
    const Complex Dd = Complex(kappa_eff_freq(-wm, cl), -(delta_eff_freq(-wm, cl) + wm));
    const Complex B = -mu * psi;
    const Complex C = -mu * std::conj(psi);
    const Complex det = A * Dd - B * C;
    if (std::abs(det) < 1e-300)
        throw EffectiveModelError("adiabatic_mech_params: singular drift matrix");
    // (1,1) M^-1 (1,-1)^T = (D + B - C - A)/det
    const Complex sigma = (Dd + B - C - A) / det;

    const double G2 = om.mech.coupling * om.mech.coupling;
    return {2.0 * G2 * sigma.real(), G2 * sigma.imag()};
}

LinearizeResult linearize_drive(double g0, double alpha_in, const CavityParams& cav,
                                double omega_m) {
    if (omega_m <= 0.0) throw std::invalid_argument("linearize_drive: omega_m must be > 0");
    const double K = cav.kappa();
    const double d0 = cav.detuning;
    // alpha_c^2 = 2 k1 alpha_in^2 / (k^2 + D^2); D = D0 - 2 g0^2 alpha_c^2/wm.
    const double c = 4.0 * g0 * g0 * cav.kappa1 * alpha_in * alpha_in / omega_m;

    auto step = [&](double d) { return d0 - c / (K * K + d * d); };

    double d = d0;
    int it = 0;
    bool converged = false;
    for (; it < 1000; ++it) {
        const double dn = step(d);
        if (std::abs(dn - d) <= 1e-14 * std::max(1.0, std::abs(dn))) {
            d = dn;
            converged = true;
            break;
        }
        d = dn;
    }
    if (!converged) {
        // Enumerate all real fixed points: d(K^2 + d^2) - D0(K^2 + d^2) + c = 0.
        auto resid = [&](double x) { return (x - d0) * (K * K + x * x) + c; };
        const double span = std::abs(d0) + std::sqrt(std::abs(c)) / K + 10.0 * K;
        std::vector<double> branches = find_roots_bracketed(resid, -span, span, 4096);
        throw MultistabilityError(
            "linearize_drive: no unique fixed point after 1000 iterations (" +
                std::to_string(branches.size()) + " branches found)",
            branches);
    }

    LinearizeResult out;
    out.detuning = d;
    CavityParams shifted(cav.kappa1, cav.kappa2, cav.kappa_loss, d);
    out.alpha_c = std::sqrt(2.0 * cav.kappa1) * std::abs(chi_c(0.0, shifted)) * alpha_in;
    out.coupling = g0 * out.alpha_c;
    out.iterations = it;
    return out;
}

}  // namespace inloop
