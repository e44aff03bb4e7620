#include "inloop/squeeze.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inloop {

using std::numbers::pi;

namespace {

OmLoop zero_gain_copy(const OmLoop& om) {
    OmLoop out = om;
    FlatFilter f{0.0, 0.0, 0.0};
    if (om.cl.loop.filter.flat) f = om.cl.loop.filter.flat->with_gain(0.0);
    out.cl.loop.filter = FilterFunction::from_flat(f);
    return out;
}

// Reconstruct S(theta) = A + Re[B e^{2 i theta}] from three samples and
// return the minimum A - |B|.
double min_over_theta(double s0, double s45, double s90) {
    const double a = 0.5 * (s0 + s90);
    const double re_b = 0.5 * (s0 - s90);
    const double im_b = a - s45;
    return a - std::hypot(re_b, im_b);
}

}  // namespace

NoFeedbackSpectra no_feedback_spectra(double w, double theta_fb, double theta_un,
                                      const OmLoop& om) {
    const LinearResponseOracle oracle(zero_gain_copy(om));
    NoFeedbackSpectra s;
    s.s_un = oracle.output_psd(OutputSide::un, theta_un, w);
    s.s_fb = oracle.output_psd(OutputSide::fb, theta_fb, w);
    s.s_cross = oracle.output_cross_psd(theta_fb, theta_un, w);
    return s;
}

Complex squeeze_admixture(double w, double theta_un, const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const double tb_un = theta_un + cl.phi_out_un();
    Complex z = 2.0 * std::sqrt(cl.kappa_un() * cl.cav.kappa1) *
                zeta_om_phase(w, tb_un, om);
    if (cl.port == Port::transmission) z -= std::cos(tb_un);
    return 2.0 * std::sqrt(cl.loop.detector.eta) * z * h_fb(w, cl) *
           om_responses(w, om).lambda_om_fb;
}

double squeeze_psd_from_K(double K, double phi_K, const NoFeedbackSpectra& s, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("squeeze_psd_from_K: eta must be > 0");
    return s.s_un + K * K * (s.s_fb + (1.0 - eta) / eta) +
           2.0 * K * (std::exp(kI * phi_K) * s.s_cross).real();
}

double optimized_psd_from_s(double s_single, double eta, double kappa_fb,
                            double kappa_un, double kappa) {
    const double s_un = s_single * kappa_un / kappa;
    return 1.0 - s_un / (1.0 - eta * (kappa_fb / kappa_un) * s_un);
}

SqueezeResult squeeze_spectrum(double w, double theta_un, const OmLoop& om,
                               SqueezeOptimize opt) {
    const double eta = om.cl.loop.detector.eta;
    const double theta_fb = om.cl.loop.detector.theta_fb;
    const NoFeedbackSpectra s = no_feedback_spectra(w, theta_fb, theta_un, om);

    SqueezeResult r;
    r.theta_un = theta_un;
    r.theta_fb = theta_fb;
    r.baseline_psd = s.s_un;
    r.single_sided_psd = single_sided_min_psd(w, om);

    switch (opt) {
        case SqueezeOptimize::none: {
            const Complex kk = squeeze_admixture(w, theta_un, om);
            r.K = std::abs(kk);
            r.phi_K = std::arg(kk);
            break;
        }
        case SqueezeOptimize::phase_only: {
            const Complex kk = squeeze_admixture(w, theta_un, om);
            r.K = std::abs(kk);
            r.phi_K = pi - std::arg(s.s_cross);
            break;
        }
        case SqueezeOptimize::phase_and_gain: {
            r.phi_K = pi - std::arg(s.s_cross);
            r.K = std::abs(s.s_cross) / (s.s_fb + (1.0 - eta) / eta);
            break;
        }
    }
    r.psd = squeeze_psd_from_K(r.K, r.phi_K, s, eta);
    return r;
}

SqueezeResult squeeze_optimize_full(double w, const OmLoop& om, const OptimizerSpec& spec) {
    const double eta = om.cl.loop.detector.eta;
    // Quadrature spectra are pi-periodic in both phases.
    auto objective = [&](const std::vector<double>& x) {
        const NoFeedbackSpectra s = no_feedback_spectra(w, x[1], x[0], om);
        return s.s_un - std::norm(s.s_cross) / (s.s_fb + (1.0 - eta) / eta);
    };
    const MinimizeResult best =
        minimize(objective, {-0.5 * pi, -0.5 * pi}, {0.5 * pi, 0.5 * pi}, spec);

    const double theta_un = best.argmin[0], theta_fb = best.argmin[1];
    const NoFeedbackSpectra s = no_feedback_spectra(w, theta_fb, theta_un, om);
    SqueezeResult r;
    r.theta_un = theta_un;
    r.theta_fb = theta_fb;
    r.phi_K = pi - std::arg(s.s_cross);
    r.K = std::abs(s.s_cross) / (s.s_fb + (1.0 - eta) / eta);
    r.psd = squeeze_psd_from_K(r.K, r.phi_K, s, eta);
    r.baseline_psd = s.s_un;
    r.single_sided_psd = single_sided_min_psd(w, om);
    return r;
}

double single_sided_min_psd(double w, const OmLoop& om) {
    // Same total decay, all of it through the measured mirror, no feedback.
    const CavityParams& cav = om.cl.cav;
    CavityParams single(cav.kappa(), 0.0, 0.0, cav.detuning);
    LaserLoop quiet{FilterFunction::from_flat(FlatFilter{0.0, 0.0, 0.0}),
                    om.cl.loop.detector};
    OmLoop sysm{CavityLoop(single, quiet, Port::reflection), om.mech};
    const LinearResponseOracle oracle(sysm);
    const double s0 = oracle.output_psd(OutputSide::fb, 0.0, w);
    const double s45 = oracle.output_psd(OutputSide::fb, 0.25 * pi, w);
    const double s90 = oracle.output_psd(OutputSide::fb, 0.5 * pi, w);
    return min_over_theta(s0, s45, s90);
}

double baseline_min_psd(double w, const OmLoop& om) {
    const LinearResponseOracle oracle(zero_gain_copy(om));
    const double s0 = oracle.output_psd(OutputSide::un, 0.0, w);
    const double s45 = oracle.output_psd(OutputSide::un, 0.25 * pi, w);
    const double s90 = oracle.output_psd(OutputSide::un, 0.5 * pi, w);
    return min_over_theta(s0, s45, s90);
}

OutputRelResiduals output_relations_check(double w, double theta, double theta_prime,
                                          const OmLoop& om) {
    const OmLoop quiet = zero_gain_copy(om);
    const LinearResponseOracle oracle(quiet);
    const double ratio = quiet.cl.kappa_fb() / quiet.cl.kappa_un();

    const double s_fb = oracle.output_psd(OutputSide::fb, theta, w);
    const double s_un = oracle.output_psd(OutputSide::un, theta, w);
    const Complex cross = oracle.output_cross_psd(theta, theta_prime, w);
    const Complex unun = oracle.output_cross_psd_unun(theta, theta_prime, w);

    OutputRelResiduals res;
    res.port_residual = std::abs(s_fb - 1.0 - ratio * (s_un - 1.0));
    res.cross_residual = std::abs(
        cross - std::sqrt(ratio) * (unun - std::exp(-kI * (theta - theta_prime))));
    return res;
}

}  // namespace inloop
