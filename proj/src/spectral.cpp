#include "inloop/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace inloop {

CavityParams::CavityParams(double k1, double k2, double kloss, double delta)
    : kappa1(k1), kappa2(k2), kappa_loss(kloss), detuning(delta) {
    if (k1 < 0.0 || k2 < 0.0 || kloss < 0.0)
        throw std::invalid_argument("CavityParams: mirror/loss rates must be >= 0");
    if (kappa() <= 0.0)
        throw std::invalid_argument("CavityParams: total decay rate must be > 0");
}

MechanicalParams::MechanicalParams(double wm, double g, double nth, double G, double g0_)
    : omega_m(wm), gamma(g), n_th(nth), g0(g0_), coupling(G) {
    if (wm <= 0.0) throw std::invalid_argument("MechanicalParams: omega_m must be > 0");
    if (g <= 0.0) throw std::invalid_argument("MechanicalParams: gamma must be > 0");
    if (nth < 0.0) throw std::invalid_argument("MechanicalParams: n_th must be >= 0");
}

std::vector<std::string> MechanicalParams::warnings() const {
    std::vector<std::string> w;
    if (gamma >= 0.01 * omega_m)
        w.push_back("gamma is not << omega_m (gamma >= 0.01 omega_m); "
                    "high-Q approximations may degrade");
    return w;
}

Complex FlatFilter::value(double w) const {
    const double sgn = (w > 0.0) ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
    return gain * std::exp(kI * (w * delay + sgn * phase_offset));
}

FilterFunction FilterFunction::from_flat(const FlatFilter& f) {
    FilterFunction ff;
    ff.fn = [f](double w) { return f.value(w); };
    ff.causal = true;
    ff.conjugate_symmetric = true;
    ff.flat = f;
    return ff;
}

const FlatFilter& FilterFunction::require_flat(const char* who) const {
    if (!flat)
        throw std::invalid_argument(std::string(who) +
                                    ": requires a flat (gain/delay/phase) filter");
    return *flat;
}

ComplexSpectrum::ComplexSpectrum(std::vector<double> f, std::vector<Complex> v)
    : frequencies(std::move(f)), values(std::move(v)) {
    if (frequencies.size() != values.size())
        throw std::invalid_argument("ComplexSpectrum: size mismatch");
    for (size_t i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1]))
            throw std::invalid_argument("ComplexSpectrum: frequencies must be strictly increasing");
}

bool ComplexSpectrum::is_nonnegative_real(double tol) const {
    for (const Complex& v : values)
        if (std::abs(v.imag()) > tol || v.real() < -tol) return false;
    return true;
}

Complex chi_c(double w, const CavityParams& cav) {
    return 1.0 / Complex(cav.kappa(), cav.detuning - w);
}

CavityPhases cavity_phases(const CavityParams& cav) {
    const double x = 2.0 * cav.kappa1 - cav.kappa();
    if (x == 0.0 && cav.detuning == 0.0)
        throw DegeneratePhaseError(
            "cavity_phases: phi_c' undefined at 2 kappa1 = kappa, Delta = 0 "
            "(critically coupled on resonance)");
    return {std::atan2(-cav.detuning, cav.kappa()), std::atan2(-cav.detuning, x)};
}

CavityPhases cavity_phases_or(const CavityParams& cav, double fallback_phi_prime) {
    const double x = 2.0 * cav.kappa1 - cav.kappa();
    if (x == 0.0 && cav.detuning == 0.0)
        return {std::atan2(-cav.detuning, cav.kappa()), fallback_phi_prime};
    return {std::atan2(-cav.detuning, cav.kappa()), std::atan2(-cav.detuning, x)};
}

Complex zeta_c(double w, double theta, const CavityParams& cav) {
    return 0.5 * (std::exp(-kI * theta) * chi_c(w, cav) +
                  std::exp(kI * theta) * std::conj(chi_c(-w, cav)));
}

Complex chi_m(double w, const MechanicalParams& mech) {
    return 1.0 / Complex(0.5 * mech.gamma, mech.omega_m - w);
}

Complex zeta_m(double w, const MechanicalParams& mech) {
    return 0.5 * kI * (chi_m(w, mech) - std::conj(chi_m(-w, mech)));
}

Complex zeta_m_approx(double w, const MechanicalParams& mech) {
    const double wm = mech.omega_m;
    return wm / Complex(wm * wm - w * w, -w * mech.gamma);
}

}  // namespace inloop
