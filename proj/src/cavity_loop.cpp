#include "inloop/cavity_loop.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace inloop {

using std::numbers::pi;

namespace {

double phi_out_port1(const CavityParams& cav) {
    // phi_out,1 = phi_c + phi_c'; continuous fallback phi_c' = 0 at the
    // critical-coupling degeneracy.
    const CavityPhases ph = cavity_phases_or(cav, 0.0);
    return ph.phi_c + ph.phi_c_prime;
}

double phi_out_port2(const CavityParams& cav) { return cavity_phases_or(cav, 0.0).phi_c; }

}  // namespace

double CavityLoop::phi_out_fb() const {
    return port == Port::reflection ? phi_out_port1(cav) : phi_out_port2(cav);
}

double CavityLoop::phi_out_un() const {
    return port == Port::reflection ? phi_out_port2(cav) : phi_out_port1(cav);
}

CavityLoop CavityLoop::with_gain(double g) const {
    const FlatFilter& f = loop.filter.require_flat("CavityLoop::with_gain");
    CavityLoop out = *this;
    out.loop.filter = FilterFunction::from_flat(f.with_gain(g));
    return out;
}

Complex zeta_fb(double w, const CavityLoop& cl) {
    const double tb = cl.theta_bar_fb();
    Complex z = 2.0 * std::sqrt(cl.kappa_fb() * cl.cav.kappa1) * zeta_c(w, tb, cl.cav);
    if (cl.port == Port::reflection) z -= std::cos(tb);
    return z;
}

Complex zeta_un(double w, double theta_un, const CavityLoop& cl) {
    const double tb = theta_un + cl.phi_out_un();
    Complex z = 2.0 * std::sqrt(cl.kappa_un() * cl.cav.kappa1) * zeta_c(w, tb, cl.cav);
    // The unused port carries the direct input reflection when the loop is
    // closed in transmission (drive and unused output share mirror 1).
    if (cl.port == Port::transmission) z -= std::cos(tb);
    return z;
}

Complex h_fb(double w, const CavityLoop& cl) {
    const Complex g = cl.loop.filter(w);
    if (cl.port == Port::transmission) return g;
    const Complex den =
        1.0 + 2.0 * std::sqrt(cl.loop.detector.eta) * g * std::cos(cl.theta_bar_fb());
    if (std::abs(den) < 1e-12)
        throw SingularConfigError("h_fb: reflection loop denominator ~ 0");
    return g / den;
}

Complex h_over_g(double w, const CavityLoop& cl) {
    if (cl.port == Port::transmission) return 1.0;
    const Complex den = 1.0 + 2.0 * std::sqrt(cl.loop.detector.eta) * cl.loop.filter(w) *
                                  std::cos(cl.theta_bar_fb());
    if (std::abs(den) < 1e-12)
        throw SingularConfigError("h_over_g: reflection loop denominator ~ 0");
    return 1.0 / den;
}

Complex mu_fb(double w, const CavityLoop& cl) {
    return 2.0 * std::sqrt(cl.kappa_fb() * cl.cav.kappa1 * cl.loop.detector.eta) *
           h_fb(w, cl);
}

Complex lambda_cfb(double w, const CavityLoop& cl) {
    return 1.0 / (1.0 - 2.0 * mu_fb(w, cl) * zeta_c(w, cl.theta_bar_fb(), cl.cav));
}

double photocurrent_psd_cavity(double w, const CavityLoop& cl) {
    return std::norm(h_over_g(w, cl) * lambda_cfb(w, cl));
}

Complex loop_gain(double w, const CavityLoop& cl) {
    return 2.0 * std::sqrt(cl.loop.detector.eta) * cl.loop.filter(w) * zeta_fb(w, cl);
}

Complex loop_gain_unit(double w, const CavityLoop& cl) {
    const FlatFilter& f = cl.loop.filter.require_flat("loop_gain_unit");
    return 2.0 * std::sqrt(cl.loop.detector.eta) * f.with_gain(1.0).value(w) *
           zeta_fb(w, cl);
}

namespace {

double scan_range(const CavityLoop& cl, double omega_max) {
    if (omega_max > 0.0) return omega_max;
    double w = 20.0 * cl.cav.kappa() + std::abs(cl.cav.detuning);
    if (cl.loop.filter.flat && cl.loop.filter.flat->delay > 0.0)
        w = std::max(w, 4.0 * pi / cl.loop.filter.flat->delay);
    return w;
}

}  // namespace

StabilityWindow loop_gain_and_stability(const CavityLoop& cl, double omega_max, int grid) {
    const FlatFilter& f = cl.loop.filter.require_flat("loop_gain_and_stability");
    const double W = scan_range(cl, omega_max);
    auto im_part = [&](double w) { return loop_gain_unit(w, cl).imag(); };
    std::vector<double> zeros = find_roots_bracketed(im_part, -W, W, grid);
    if (zeros.empty())
        throw NumericsError("loop_gain_and_stability: no Im-zero of G_fb found in "
                            "|w| <= " + std::to_string(W) + "; widen the range");

    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (double z : zeros) {
        const double re = loop_gain_unit(z, cl).real();
        gmax = std::max(gmax, re);
        gmin = std::min(gmin, re);
    }
    StabilityWindow win;
    win.g_upper_ref = gmax;
    win.g_lower_ref = gmin;
    win.gain_max = gmax > 0.0 ? 1.0 / gmax : std::numeric_limits<double>::infinity();
    win.gain_min = gmin < 0.0 ? 1.0 / gmin : -std::numeric_limits<double>::infinity();
    win.im_zeros = std::move(zeros);
    win.stable_at_current_gain = f.gain > win.gain_min && f.gain < win.gain_max;
    return win;
}

bool loop_stable(const CavityLoop& cl, double omega_max, int grid) {
    const double W = scan_range(cl, omega_max);
    auto im_part = [&](double w) { return loop_gain(w, cl).imag(); };
    for (double z : find_roots_bracketed(im_part, -W, W, grid))
        if (loop_gain(z, cl).real() >= 1.0) return false;
    return true;
}

double outofloop_psd(double w, double theta_un, const CavityLoop& cl) {
    return 1.0 + std::norm(2.0 * zeta_un(w, theta_un, cl) * h_fb(w, cl) * lambda_cfb(w, cl));
}

CorrelationMatrix steady_correlations(const CavityLoop& cl, const QuadratureSpec& spec) {
    if (cl.loop.filter.flat) {
        if (!loop_gain_and_stability(cl).stable_at_current_gain)
            throw UnstableLoopError("steady_correlations: loop is not stable");
    } else if (!loop_stable(cl)) {
        throw UnstableLoopError("steady_correlations: loop is not stable");
    }

    const double k1 = cl.cav.kappa1;
    const double phic = cavity_phases_or(cl.cav, 0.0).phi_c;

    QuadratureSpec qs = spec;
    qs.scale = std::max({cl.cav.kappa(), std::abs(cl.cav.detuning), qs.scale});
    const double D = cl.cav.detuning, K = cl.cav.kappa();
    for (double b : {0.0, D, -D, D + K, D - K, -D + K, -D - K}) qs.breakpoints.push_back(b);

    auto hl = [&](double w) { return h_fb(w, cl) * lambda_cfb(w, cl); };
    const auto nres = integrate_line(
        [&](double w) { return std::norm(hl(w) * chi_c(w, cl.cav)); }, qs);
    const auto mres = integrate_line_complex(
        [&](double w) { return std::norm(hl(w)) * chi_c(w, cl.cav) * chi_c(-w, cl.cav); },
        qs);

    CorrelationMatrix out;
    const double pref = 2.0 * k1 / (2.0 * pi);
    out.n_st = pref * nres.value;
    out.m_st = pref * std::exp(-2.0 * kI * phic) * mres.value;
    out.n_error = pref * nres.achieved_error;
    out.m_error = pref * mres.achieved_error;
    return out;
}

Complex effective_susceptibility(double w, const CavityLoop& cl) {
    return chi_c(w, cl.cav) * lambda_cfb(w, cl);
}

double kappa_eff_freq(double w, const CavityLoop& cl) {
    return cl.cav.kappa() -
           (std::exp(-kI * cl.theta_bar_fb()) * mu_fb(w, cl)).real();
}

double delta_eff_freq(double w, const CavityLoop& cl) {
    return cl.cav.detuning -
           (std::exp(-kI * cl.theta_bar_fb()) * mu_fb(w, cl)).imag();
}

EffectiveCavity effective_params(const CavityLoop& cl) {
    const double K = cl.cav.kappa(), D = cl.cav.detuning;
    const double tb = cl.theta_bar_fb();
    const Complex etb = std::exp(kI * tb), metb = std::exp(-kI * tb);
    const Complex muD = mu_fb(D, cl);

    Complex dmu;
    if (cl.loop.filter.flat) {
        // d(mu)/dw = 2 i tau sqrt(kfb k1 eta) h^2/g, written via h = g q to
        // stay finite at zero gain.
        const FlatFilter& f = *cl.loop.filter.flat;
        const Complex q = h_over_g(D, cl);
        dmu = 2.0 * kI * f.delay *
              std::sqrt(cl.kappa_fb() * cl.cav.kappa1 * cl.loop.detector.eta) *
              cl.loop.filter(D) * q * q;
    } else {
        const double h = 1e-6 * std::max({K, std::abs(D), 1.0});
        dmu = (mu_fb(D + h, cl) - mu_fb(D - h, cl)) / (2.0 * h);
    }

    const Complex km2id = Complex(K, -2.0 * D);
    const Complex bracket = metb + K * etb / km2id;
    const Complex u =
        1.0 + 2.0 * kI * D * etb / (km2id * km2id) * muD - kI * bracket * dmu;
    const Complex nu = D - kI / u * (K - bracket * muD);

    EffectiveCavity out;
    out.delta_eff = nu.real();
    out.kappa_eff = -nu.imag();
    out.u = u;
    out.kappa_eff_simple = K - (metb * muD).real();
    out.delta_eff_simple = D - (metb * muD).imag();
    out.short_delay_warning =
        cl.loop.filter.flat && cl.loop.filter.flat->delay * K >= 0.5;
    return out;
}

EffectiveNoise effective_noise_stats(double w, const CavityLoop& cl) {
    const double eta = cl.loop.detector.eta;
    if (eta <= 0.0)
        throw std::invalid_argument("effective_noise_stats: eta must be > 0");
    const double kp = kappa_eff_freq(w, cl);
    const double km = kappa_eff_freq(-w, cl);
    if (kp <= 0.0 || km <= 0.0)
        throw EffectiveModelError("effective_noise_stats: kappa_eff(w) <= 0, "
                                  "effective model breaks down at this frequency");
    const Complex mu = mu_fb(w, cl);
    const double kfb = cl.kappa_fb();
    EffectiveNoise out;
    out.n_in = std::norm(mu) / (4.0 * kp * kfb * eta);
    out.m_in = (std::norm(mu) / (2.0 * kfb * eta) -
                std::conj(mu) * std::exp(kI * cl.theta_bar_fb())) /
               (2.0 * std::sqrt(kp * km));
    return out;
}

double probe_seed_psd(double nu, double alpha_s, const CavityLoop& cl) {
    if (cl.port != Port::transmission)
        throw std::invalid_argument("probe_seed_psd: derived for transmission-fed loops");
    return 4.0 * cl.cav.kappa1 * cl.cav.kappa2 * cl.loop.detector.eta * alpha_s * alpha_s *
           std::norm(effective_susceptibility(nu, cl));
}

double effective_model_nst(const CavityLoop& cl, const QuadratureSpec& spec) {
    const double phic = cavity_phases_or(cl.cav, 0.0).phi_c;
    const Complex psi = std::exp(kI * (cl.theta_bar_fb() - 2.0 * phic));

    // <a^dag(w) a(w')> coefficient of the exact frequency-dependent effective
    // model, contracted with the effective-noise correlations.
    auto s_adag_a = [&](double w) -> Complex {
        auto rows_at = [&](double x) {
            const double kp = kappa_eff_freq(x, cl), km = kappa_eff_freq(-x, cl);
            if (kp <= 0.0 || km <= 0.0)
                throw EffectiveModelError("effective_model_nst: kappa_eff <= 0 in range");
            const Complex mu = mu_fb(x, cl);
            Eigen::Matrix2cd M;
            M << Complex(kp, delta_eff_freq(x, cl) - x), -mu * psi, -mu * std::conj(psi),
                Complex(km, -(delta_eff_freq(-x, cl) + x));
            Eigen::Matrix2cd N = Eigen::Matrix2cd::Zero();
            N(0, 0) = std::sqrt(2.0 * kp) * std::exp(-kI * phic);
            N(1, 1) = std::sqrt(2.0 * km) * std::exp(kI * phic);
            return Eigen::Matrix2cd(M.partialPivLu().solve(N));
        };
        const Eigen::Matrix2cd Rp = rows_at(w);   // rows of (a, a^dag) at +w
        const Eigen::Matrix2cd Rm = rows_at(-w);  // rows at -w
        const EffectiveNoise np = effective_noise_stats(w, cl);
        const EffectiveNoise nm = effective_noise_stats(-w, cl);
        // C_ij(w) = <v_i(w) v_j(-w)> with v = (a_in_eff, a_in_eff^dag)
        Eigen::Matrix2cd C;
        C << np.m_in, np.n_in + 1.0, nm.n_in, std::conj(np.m_in);
        Complex s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += Rp(1, i) * C(i, j) * Rm(0, j);
        return s;
    };

    QuadratureSpec qs = spec;
    qs.scale = std::max({cl.cav.kappa(), std::abs(cl.cav.detuning), qs.scale});
    const double D = cl.cav.detuning, K = cl.cav.kappa();
    for (double b : {0.0, D, -D, D + K, D - K, -D + K, -D - K}) qs.breakpoints.push_back(b);
    const auto res = integrate_line([&](double w) { return s_adag_a(w).real(); }, qs);
    return res.value / (2.0 * pi);
}

}  // namespace inloop
