#include "inloop/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inloop {

using std::numbers::pi;

EffectivePulseParams pulse_effective_params(const OmLoop& om) {
    const CavityLoop& cl = om.cl;
    const FlatFilter& f = cl.loop.filter.require_flat("pulse_effective_params");
    const double mu_bar =
        2.0 * std::sqrt(cl.kappa_fb() * cl.cav.kappa1 * cl.loop.detector.eta) * f.gain;
    const double arg = om.mech.omega_m * f.delay - cl.theta_bar_fb();
    EffectivePulseParams p;
    p.mu_bar = mu_bar;
    p.kappa_eff = cl.cav.kappa() - mu_bar * std::cos(arg);
    p.delta_eff = (cl.cav.detuning - om.mech.omega_m) - mu_bar * std::sin(arg);
    return p;
}

PulseTrace pulse_response(const OmLoop& om, Complex alpha_p, double horizon,
                          PulseMode mode, double step) {
    const CavityLoop& cl = om.cl;
    const FlatFilter& f = cl.loop.filter.require_flat("pulse_response");
    const MechanicalParams& mech = om.mech;
    const double wm = mech.omega_m;
    const double K = cl.cav.kappa();
    const double gamma = mech.gamma;
    const double G = mech.coupling;
    const double tau = f.delay;
    const double phic = cavity_phases_or(cl.cav, 0.0).phi_c;
    const double tbfb = cl.theta_bar_fb();
    const EffectivePulseParams eff = pulse_effective_params(om);

    // Exact impulse initial condition (no numeric delta).
    const Complex A = 2.0 * std::sqrt(pi * cl.cav.kappa1) * alpha_p * std::exp(-kI * phic);

    double h = step;
    if (h <= 0.0) {
        h = 1.0 / (50.0 * wm);
        if (tau > 0.0) h = std::min(h, tau / 10.0);
    } else {
        h = std::min(h, 1.0 / (50.0 * wm));
    }

    PulseTrace out;
    out.alpha_p = alpha_p;
    out.mode = mode;
    out.effective = (mode != PulseMode::full_dde);
    out.kappa_eff = eff.kappa_eff;
    out.delta_eff = eff.delta_eff;

    if (mode == PulseMode::closed_form) {
        const long n = std::lround(std::ceil(horizon / h));
        out.times.reserve(n + 1);
        out.alpha_bar.reserve(n + 1);
        out.beta_bar.reserve(n + 1);
        for (long i = 0; i <= n; ++i) {
            const double t = i * h;
            const double env = std::exp(-0.5 * eff.kappa_eff * t);
            out.times.push_back(t);
            out.alpha_bar.push_back(A * std::cos(G * t) * env);
            out.beta_bar.push_back(kI * A * std::sin(G * t) * env);
        }
        return out;
    }

    DdeRhs rhs;
    DDESpec spec;
    spec.horizon = horizon;
    spec.step = h;
    if (mode == PulseMode::effective) {
        spec.delay = 0.0;
        rhs = [&, eff](double, const DdeState& y, const DdeState&) -> DdeState {
            return {-(Complex(eff.kappa_eff, eff.delta_eff)) * y[0] + kI * G * y[1],
                    -0.5 * gamma * y[1] + kI * G * y[0]};
        };
    } else {
        // Rotating frame at omega_m with the non-resonant e^{2 i wm t} terms
        // retained; the delayed feedback term keeps its exact phases.
        spec.delay = tau;
        const double delta = cl.cav.detuning - wm;
        const Complex ph_res = std::exp(-kI * tbfb) * std::exp(kI * wm * tau);
        const Complex ph_non = std::exp(-kI * (tbfb - 2.0 * phic)) * std::exp(-kI * wm * tau);
        const double mu_bar = eff.mu_bar;
        rhs = [=](double t, const DdeState& y, const DdeState& yd) -> DdeState {
            const Complex rot = std::exp(2.0 * kI * wm * t);
            const Complex dalpha =
                -(Complex(K, delta)) * y[0] + kI * G * (y[1] + std::conj(y[1]) * rot) +
                mu_bar * (yd[0] * ph_res + std::conj(yd[0]) * ph_non * rot);
            const Complex dbeta =
                -0.5 * gamma * y[1] + kI * G * (y[0] + std::conj(y[0]) * rot);
            return {dalpha, dbeta};
        };
    }

    const DdeTrajectory traj = integrate_dde(rhs, {A, Complex{0.0, 0.0}}, spec);
    out.times = traj.times;
    out.alpha_bar.reserve(traj.states.size());
    out.beta_bar.reserve(traj.states.size());
    for (const DdeState& s : traj.states) {
        out.alpha_bar.push_back(s[0]);
        out.beta_bar.push_back(s[1]);
    }
    return out;
}

OscillationFit fit_oscillation(const PulseTrace& trace) {
    const size_t n = trace.beta_bar.size();
    std::vector<double> tp, vp;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double a = std::abs(trace.beta_bar[i - 1]);
        const double b = std::abs(trace.beta_bar[i]);
        const double c = std::abs(trace.beta_bar[i + 1]);
        if (b > a && b >= c) {
            tp.push_back(trace.times[i]);
            vp.push_back(b);
        }
    }
    OscillationFit fit{0.0, 0.0, static_cast<int>(tp.size())};
    if (tp.size() < 2) return fit;
    // |sin| peaks twice per period.
    fit.frequency = pi * (tp.size() - 1) / (tp.back() - tp.front());
    // Least-squares slope of ln(peak) vs t.
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (size_t i = 0; i < tp.size(); ++i) {
        const double lv = std::log(vp[i]);
        st += tp[i];
        sv += lv;
        stt += tp[i] * tp[i];
        stv += tp[i] * lv;
    }
    const double m = tp.size();
    fit.envelope_rate = -(m * stv - st * sv) / (m * stt - st * st);
    return fit;
}

}  // namespace inloop
