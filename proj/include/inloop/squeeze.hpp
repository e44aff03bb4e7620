#ifndef INLOOP_SQUEEZE_HPP_
#define INLOOP_SQUEEZE_HPP_

// Feedback-enhanced ponderomotive squeezing of the unused cavity output. The
// feedback admixes the detected-port record into the unused-port quadrature
// with weight K e^{i phi_K}; the optimal phase and gain follow from the
// no-feedback spectra of the two ports and their cross spectrum.

#include "inloop/numerics.hpp"
#include "inloop/optomech.hpp"
#include "inloop/oracle.hpp"

namespace inloop {

// No-feedback (gain = 0) spectra entering the squeezing formulas, all from
// the linear-response engine.
struct NoFeedbackSpectra {
    double s_un;       // S^o_out,un^(theta_un)
    double s_fb;       // S^o_out,fb^(theta_fb)
    Complex s_cross;   // S^o_out,fb-un^(theta_fb, theta_un)
};
NoFeedbackSpectra no_feedback_spectra(double w, double theta_fb, double theta_un,
                                      const OmLoop& om);

// K(w) e^{i phi_K(w)} = 2 sqrt(eta) zeta_om,un^(theta_un) h_fb lambda_om,fb
// for the loop as configured.
Complex squeeze_admixture(double w, double theta_un, const OmLoop& om);

// S_out,un for a given admixture: S^o_un + K^2 [S^o_fb + (1-eta)/eta]
//                                 + 2 K Re[e^{i phi_K} S^o_cross].
double squeeze_psd_from_K(double K, double phi_K, const NoFeedbackSpectra& s, double eta);

// theta_fb = theta_un reduction: optimized PSD = 1 - s/(1 - eta (kfb/kun) s)
// written in terms of the single-sided squeezing parameter s_sing
// (s = s_sing * kun/kappa).
double optimized_psd_from_s(double s_single, double eta, double kappa_fb,
                            double kappa_un, double kappa);

enum class SqueezeOptimize { none, phase_only, phase_and_gain };

struct SqueezeResult {
    double theta_un;
    double theta_fb;
    double K;
    double phi_K;
    double psd;               // with feedback
    double baseline_psd;      // no feedback, same theta_un
    double single_sided_psd;  // single-sided cavity, no feedback (bound)
};

// Squeezing spectrum at one frequency. none: evaluate the loop as configured;
// phase_only: optimal phi_K at the configured K; phase_and_gain: optimal
// (K, phi_K) closed form.
SqueezeResult squeeze_spectrum(double w, double theta_un, const OmLoop& om,
                               SqueezeOptimize opt);

// Full figure-style optimization over (theta_un, theta_fb) with the closed
// form (K, phi_K) optimum inside.
SqueezeResult squeeze_optimize_full(double w, const OmLoop& om,
                                    const OptimizerSpec& spec = {});

// Quadrature spectrum minimized over theta for the same system rebuilt as a
// single-sided cavity (all decay through the measured port), no feedback.
double single_sided_min_psd(double w, const OmLoop& om);
// Same minimization for the unused port of the actual cavity (no feedback).
double baseline_min_psd(double w, const OmLoop& om);

struct OutputRelResiduals {
    double port_residual;   // S_fb = 1 + (kfb/kun)(S_un - 1)
    double cross_residual;  // cross-port relation
};
// Residuals of the two input-output consistency relations at (theta, theta').
OutputRelResiduals output_relations_check(double w, double theta, double theta_prime,
                                          const OmLoop& om);

}  // namespace inloop

#endif  // INLOOP_SQUEEZE_HPP_
