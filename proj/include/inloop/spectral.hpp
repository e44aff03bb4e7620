#ifndef INLOOP_SPECTRAL_HPP_
#define INLOOP_SPECTRAL_HPP_

// Frequency-domain primitives shared by every higher layer: cavity and
// mechanical susceptibilities, input/output phases, quadrature transfer
// functions and the electronic filter model.
//
// Conventions: all rates and frequencies are angular (rad/s); every response
// obeys conjugate symmetry f(-w) = conj(f(w)); power spectra are normalized
// so the shot-noise level of a coherent beam is 1.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "inloop/types.hpp"

namespace inloop {

// Two-mirror Fabry-Perot mode with internal loss. kappa() = k1 + k2 + k' is
// the total amplitude decay rate.
struct CavityParams {
    double kappa1 = 0.0;      // drive-side mirror [rad/s]
    double kappa2 = 0.0;      // back mirror [rad/s]
    double kappa_loss = 0.0;  // internal loss kappa' [rad/s]
    double detuning = 0.0;    // Delta = omega_c - omega_L [rad/s]

    CavityParams(double k1, double k2, double kloss, double delta);
    double kappa() const { return kappa1 + kappa2 + kappa_loss; }
};

// Mechanical mode; gamma is the full energy decay rate of the amplitude
// equation (chi_m uses gamma/2), n_th the bath occupancy, G = g0*alpha_c the
// linearized coupling.
struct MechanicalParams {
    double omega_m = 0.0;
    double gamma = 0.0;
    double n_th = 0.0;
    double g0 = 0.0;
    double coupling = 0.0;  // G [rad/s]

    MechanicalParams(double wm, double g, double nth, double G, double g0_ = 0.0);
    // Non-fatal validity notes (e.g. gamma not << omega_m).
    std::vector<std::string> warnings() const;
};

// Flat electronic filter: constant magnitude with a linear delay phase and a
// sign-symmetric phase offset,
//   g(w) = gain * exp(i(w*delay + sgn(w)*phase_offset)),  sgn(0) = 0,
// which keeps g(-w) = conj(g(w)) and is exactly `gain` at w = 0.
struct FlatFilter {
    double gain = 0.0;          // gbar_fb
    double delay = 0.0;         // tau_fb [s]
    double phase_offset = 0.0;  // phi_fb [rad]

    Complex value(double w) const;
    FlatFilter with_gain(double g) const { return {g, delay, phase_offset}; }
};

// Type-erased filter. Built from a FlatFilter it keeps the structured
// parameters around so flat-only operations (extrema, stability windows,
// gain scaling) can recover them.
struct FilterFunction {
    std::function<Complex(double)> fn;
    bool causal = true;
    bool conjugate_symmetric = true;
    std::optional<FlatFilter> flat;

    Complex operator()(double w) const { return fn(w); }
    static FilterFunction from_flat(const FlatFilter& f);
    const FlatFilter& require_flat(const char* who) const;
};

// Frequency grid with complex samples; `strictly increasing` is enforced.
struct ComplexSpectrum {
    std::vector<double> frequencies;
    std::vector<Complex> values;

    ComplexSpectrum() = default;
    ComplexSpectrum(std::vector<double> f, std::vector<Complex> v);
    size_t size() const { return frequencies.size(); }
    // True if every value is real and nonnegative within `tol` on the
    // imaginary part (PSD-typed spectra).
    bool is_nonnegative_real(double tol = 1e-12) const;
};

// chi_c(w) = 1 / (kappa + i(Delta - w))
Complex chi_c(double w, const CavityParams& cav);

struct CavityPhases {
    double phi_c;        // input->cavity phase
    double phi_c_prime;  // extra phase of the directly reflected field
};

// exp(i phi_c) = (kappa - i Delta)/sqrt(kappa^2 + Delta^2),
// exp(i phi_c') = (2 kappa1 - kappa - i Delta)/sqrt((2 kappa1 - kappa)^2 + Delta^2).
// Throws DegeneratePhaseError when 2 kappa1 = kappa and Delta = 0 (phi_c'
// has no limit there).
CavityPhases cavity_phases(const CavityParams& cav);
// Same, but substitutes `fallback_phi_prime` at the degenerate point instead
// of throwing. Used by sweeps that cross the critical-coupling point.
CavityPhases cavity_phases_or(const CavityParams& cav, double fallback_phi_prime);

// zeta_c^(theta)(w) = (e^{-i theta} chi_c(w) + e^{i theta} chi_c(-w)^*)/2
Complex zeta_c(double w, double theta, const CavityParams& cav);

// chi_m(w) = 1 / (gamma/2 + i(omega_m - w))
Complex chi_m(double w, const MechanicalParams& mech);
// zeta_m(w) = i (chi_m(w) - chi_m(-w)^*)/2
Complex zeta_m(double w, const MechanicalParams& mech);
// gamma << omega_m approximant omega_m / (omega_m^2 - w^2 - i w gamma)
Complex zeta_m_approx(double w, const MechanicalParams& mech);

}  // namespace inloop

#endif  // INLOOP_SPECTRAL_HPP_
