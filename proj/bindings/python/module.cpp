#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "inloop/cavity_loop.hpp"
#include "inloop/laser_loop.hpp"
#include "inloop/optomech.hpp"
#include "inloop/oracle.hpp"
#include "inloop/pulse.hpp"
#include "inloop/spectral.hpp"
#include "inloop/squeeze.hpp"

namespace py = pybind11;
using namespace inloop;

PYBIND11_MODULE(_inloop, m) {
    m.doc() = "Feedback-controlled in-loop light: cavity and optomechanical spectra";

    py::register_exception<UnstableLoopError>(m, "UnstableLoopError");
    py::register_exception<SingularConfigError>(m, "SingularConfigError");
    py::register_exception<DegeneratePhaseError>(m, "DegeneratePhaseError");
    py::register_exception<HeatingError>(m, "HeatingError");
    py::register_exception<EffectiveModelError>(m, "EffectiveModelError");
    py::register_exception<NumericsError>(m, "NumericsError");

    py::class_<CavityParams>(m, "CavityParams")
        .def(py::init<double, double, double, double>(), py::arg("kappa1"),
             py::arg("kappa2"), py::arg("kappa_loss"), py::arg("detuning"))
        .def_readonly("kappa1", &CavityParams::kappa1)
        .def_readonly("kappa2", &CavityParams::kappa2)
        .def_readonly("kappa_loss", &CavityParams::kappa_loss)
        .def_readonly("detuning", &CavityParams::detuning)
        .def_property_readonly("kappa", &CavityParams::kappa);

    py::class_<MechanicalParams>(m, "MechanicalParams")
        .def(py::init<double, double, double, double, double>(), py::arg("omega_m"),
             py::arg("gamma"), py::arg("n_th"), py::arg("coupling"), py::arg("g0") = 0.0)
        .def_readonly("omega_m", &MechanicalParams::omega_m)
        .def_readonly("gamma", &MechanicalParams::gamma)
        .def_readonly("n_th", &MechanicalParams::n_th)
        .def_readonly("coupling", &MechanicalParams::coupling)
        .def("warnings", &MechanicalParams::warnings);

    py::class_<FlatFilter>(m, "FlatFilter")
        .def(py::init([](double gain, double delay, double phase_offset) {
                 return FlatFilter{gain, delay, phase_offset};
             }),
             py::arg("gain"), py::arg("delay"), py::arg("phase_offset") = 0.0)
        .def_readonly("gain", &FlatFilter::gain)
        .def_readonly("delay", &FlatFilter::delay)
        .def_readonly("phase_offset", &FlatFilter::phase_offset)
        .def("value", &FlatFilter::value);

    py::class_<DetectorParams>(m, "DetectorParams")
        .def(py::init<double, double, std::optional<double>, std::optional<double>>(),
             py::arg("eta"), py::arg("theta_fb"), py::arg("eta_d") = std::nullopt,
             py::arg("noise_ratio") = std::nullopt)
        .def_readonly("eta", &DetectorParams::eta)
        .def_readonly("theta_fb", &DetectorParams::theta_fb);

    py::class_<LaserLoop>(m, "LaserLoop")
        .def(py::init([](const FlatFilter& f, const DetectorParams& d) {
                 return make_flat_loop(f, d);
             }),
             py::arg("filter"), py::arg("detector"));

    py::enum_<Port>(m, "Port")
        .value("transmission", Port::transmission)
        .value("reflection", Port::reflection);

    py::class_<CavityLoop>(m, "CavityLoop")
        .def(py::init<CavityParams, LaserLoop, Port>(), py::arg("cavity"),
             py::arg("loop"), py::arg("port"))
        .def_property_readonly("kappa_fb", &CavityLoop::kappa_fb)
        .def_property_readonly("kappa_un", &CavityLoop::kappa_un)
        .def_property_readonly("theta_bar_fb", &CavityLoop::theta_bar_fb)
        .def("with_gain", &CavityLoop::with_gain);

    py::class_<OmLoop>(m, "OmLoop")
        .def(py::init([](const CavityLoop& cl, const MechanicalParams& mech) {
                 return OmLoop{cl, mech};
             }),
             py::arg("cavity_loop"), py::arg("mechanics"));

    // spectral core
    m.def("chi_c", &chi_c, py::arg("omega"), py::arg("cavity"));
    m.def("cavity_phases", [](const CavityParams& c) {
        const CavityPhases p = cavity_phases(c);
        return std::make_pair(p.phi_c, p.phi_c_prime);
    });
    m.def("zeta_c", &zeta_c, py::arg("omega"), py::arg("theta"), py::arg("cavity"));
    m.def("chi_m", &chi_m, py::arg("omega"), py::arg("mechanics"));
    m.def("zeta_m", &zeta_m, py::arg("omega"), py::arg("mechanics"));

    // laser loop
    m.def("squash_factor", &squash_factor, py::arg("omega"), py::arg("loop"));
    m.def("photocurrent_psd", &photocurrent_psd, py::arg("omega"), py::arg("loop"));
    m.def("inloop_quadrature_psd", &inloop_quadrature_psd, py::arg("omega"),
          py::arg("phi"), py::arg("loop"));
    m.def("laser_stability", [](const LaserLoop& l) {
        const LaserStability s = laser_stability(l);
        return std::make_pair(s.stable, s.margin);
    });
    m.def("extrema_frequencies", [](const LaserLoop& l, int n_max) {
        std::vector<std::pair<double, std::string>> out;
        for (const Extremum& e : extrema_frequencies(l, n_max))
            out.emplace_back(e.omega,
                             e.kind == ExtremumKind::maximum ? "max" : "min");
        return out;
    });

    // cavity loop
    m.def("h_fb", &h_fb, py::arg("omega"), py::arg("cavity_loop"));
    m.def("mu_fb", &mu_fb, py::arg("omega"), py::arg("cavity_loop"));
    m.def("lambda_cfb", &lambda_cfb, py::arg("omega"), py::arg("cavity_loop"));
    m.def("photocurrent_psd_cavity", &photocurrent_psd_cavity, py::arg("omega"),
          py::arg("cavity_loop"));
    m.def("loop_gain", &loop_gain, py::arg("omega"), py::arg("cavity_loop"));
    m.def("outofloop_psd", &outofloop_psd, py::arg("omega"), py::arg("theta_un"),
          py::arg("cavity_loop"));
    m.def("effective_susceptibility", &effective_susceptibility, py::arg("omega"),
          py::arg("cavity_loop"));
    m.def("stability_window", [](const CavityLoop& cl) {
        const StabilityWindow w = loop_gain_and_stability(cl);
        py::dict d;
        d["gain_min"] = w.gain_min;
        d["gain_max"] = w.gain_max;
        d["g_upper_ref"] = w.g_upper_ref;
        d["g_lower_ref"] = w.g_lower_ref;
        d["stable"] = w.stable_at_current_gain;
        return d;
    });
    m.def("steady_correlations", [](const CavityLoop& cl) {
        const CorrelationMatrix c = steady_correlations(cl);
        return std::make_pair(c.n_st, c.m_st);
    });
    m.def("effective_params", [](const CavityLoop& cl) {
        const EffectiveCavity e = effective_params(cl);
        py::dict d;
        d["kappa_eff"] = e.kappa_eff;
        d["delta_eff"] = e.delta_eff;
        d["u"] = e.u;
        d["kappa_eff_simple"] = e.kappa_eff_simple;
        d["delta_eff_simple"] = e.delta_eff_simple;
        d["short_delay_warning"] = e.short_delay_warning;
        return d;
    });
    m.def("effective_noise_stats", [](double w, const CavityLoop& cl) {
        const EffectiveNoise n = effective_noise_stats(w, cl);
        return std::make_pair(n.n_in, n.m_in);
    });

    // optomechanics
    m.def("position_psd", &position_psd, py::arg("omega"), py::arg("om"));
    m.def("position_psd_approx", &position_psd_approx, py::arg("omega"), py::arg("om"));
    m.def("scattering_rates", [](const OmLoop& om) {
        const ScatteringRates r = scattering_rates(om);
        py::dict d;
        d["a_plus"] = r.a_plus;
        d["a_minus"] = r.a_minus;
        d["gamma_opt"] = r.gamma_opt;
        d["n_backaction"] = r.n_backaction;
        d["strong_coupling_warning"] = r.strong_coupling_warning;
        return d;
    });
    m.def("suppress_antistokes", [](const OmLoop& om) {
        const SuppressionResult s = suppress_antistokes(om);
        py::dict d;
        d["theta_fb"] = s.theta_fb;
        d["theta_bar_fb"] = s.theta_bar_fb;
        d["gain"] = s.gain;
        d["phase_offset"] = s.phase_offset;
        d["a_plus"] = s.rates.a_plus;
        d["a_minus"] = s.rates.a_minus;
        return d;
    });
    py::enum_<CoolingMode>(m, "CoolingMode")
        .value("generic", CoolingMode::generic)
        .value("suppression_optimal", CoolingMode::suppression_optimal)
        .value("antisquash", CoolingMode::antisquash);
    m.def("phonon_steady", [](const OmLoop& om, CoolingMode mode) {
        const PhononSteady p = phonon_steady(om, mode);
        py::dict d;
        d["n_m"] = p.n_m;
        d["kappa_eff_opt"] = p.kappa_eff_opt;
        d["n_sc"] = p.n_sc;
        d["strong_coupling_warning"] = p.strong_coupling_warning;
        return d;
    });
    m.def("sideband_cooling_nm", &sideband_cooling_nm, py::arg("om"));
    m.def("adiabatic_mech_params", [](const OmLoop& om) {
        const AdiabaticParams a = adiabatic_mech_params(om);
        return std::make_pair(a.gamma_opt, a.delta_shift);
    });
    m.def("linearize_drive", [](double g0, double alpha_in, const CavityParams& cav,
                                double omega_m) {
        const LinearizeResult r = linearize_drive(g0, alpha_in, cav, omega_m);
        py::dict d;
        d["alpha_c"] = r.alpha_c;
        d["coupling"] = r.coupling;
        d["detuning"] = r.detuning;
        return d;
    });

    // pulses
    py::enum_<PulseMode>(m, "PulseMode")
        .value("full_dde", PulseMode::full_dde)
        .value("effective", PulseMode::effective)
        .value("closed_form", PulseMode::closed_form);
    m.def(
        "pulse_response",
        [](const OmLoop& om, Complex alpha_p, double horizon, PulseMode mode,
           double step) {
            const PulseTrace t = pulse_response(om, alpha_p, horizon, mode, step);
            py::dict d;
            d["times"] = t.times;
            d["alpha_bar"] = t.alpha_bar;
            d["beta_bar"] = t.beta_bar;
            d["kappa_eff"] = t.kappa_eff;
            d["delta_eff"] = t.delta_eff;
            return d;
        },
        py::arg("om"), py::arg("alpha_p"), py::arg("horizon"), py::arg("mode"),
        py::arg("step") = 0.0);

    // squeezing
    py::enum_<SqueezeOptimize>(m, "SqueezeOptimize")
        .value("none", SqueezeOptimize::none)
        .value("phase_only", SqueezeOptimize::phase_only)
        .value("phase_and_gain", SqueezeOptimize::phase_and_gain);
    auto squeeze_dict = [](const SqueezeResult& r) {
        py::dict d;
        d["theta_un"] = r.theta_un;
        d["theta_fb"] = r.theta_fb;
        d["K"] = r.K;
        d["phi_K"] = r.phi_K;
        d["psd"] = r.psd;
        d["baseline_psd"] = r.baseline_psd;
        d["single_sided_psd"] = r.single_sided_psd;
        return d;
    };
    m.def("squeeze_spectrum",
          [squeeze_dict](double w, double theta_un, const OmLoop& om,
                         SqueezeOptimize opt) {
              return squeeze_dict(squeeze_spectrum(w, theta_un, om, opt));
          },
          py::arg("omega"), py::arg("theta_un"), py::arg("om"), py::arg("optimize"));
    m.def("squeeze_optimize_full",
          [squeeze_dict](double w, const OmLoop& om) {
              return squeeze_dict(squeeze_optimize_full(w, om));
          },
          py::arg("omega"), py::arg("om"));
    m.def("output_relations_check", [](double w, double theta, double theta_prime,
                                       const OmLoop& om) {
        const OutputRelResiduals r = output_relations_check(w, theta, theta_prime, om);
        return std::make_pair(r.port_residual, r.cross_residual);
    });

    // oracle
    py::enum_<OutputSide>(m, "OutputSide")
        .value("fb", OutputSide::fb)
        .value("un", OutputSide::un);
    py::class_<LinearResponseOracle>(m, "LinearResponseOracle")
        .def(py::init<OmLoop>(), py::arg("om"))
        .def("photocurrent_psd", &LinearResponseOracle::photocurrent_psd)
        .def("position_psd", &LinearResponseOracle::position_psd)
        .def("cavity_amp_psd", &LinearResponseOracle::cavity_amp_psd)
        .def("output_psd", &LinearResponseOracle::output_psd, py::arg("side"),
             py::arg("theta"), py::arg("omega"))
        .def("output_cross_psd", &LinearResponseOracle::output_cross_psd,
             py::arg("theta_fb"), py::arg("theta_un"), py::arg("omega"));
}
