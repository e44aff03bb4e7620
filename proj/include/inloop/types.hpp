#ifndef INLOOP_TYPES_HPP_
#define INLOOP_TYPES_HPP_

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace inloop {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

// Feedback loop is unstable (or a steady-state quantity was requested for an
// unstable configuration).
struct UnstableLoopError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reflection-port feedback with 1 + 2 sqrt(eta) g cos(theta_bar) ~ 0: the
// direct-reflection loop has no solution.
struct SingularConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// phi_c' is undefined at 2 kappa1 = kappa, Delta = 0.
struct DegeneratePhaseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Static drive equation has multiple fixed points; `branches` lists the
// detunings of all of them.
struct MultistabilityError : std::runtime_error {
    std::vector<double> branches;
    MultistabilityError(const std::string& msg, std::vector<double> b)
        : std::runtime_error(msg), branches(std::move(b)) {}
};

// Optical damping is not positive: the rate equation heats instead of cooling.
struct HeatingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Effective single-pole cavity model broke down (kappa_eff <= 0 or singular
// drift matrix).
struct EffectiveModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Anti-Stokes suppression demands a gain outside the stable window.
struct GainOutsideStabilityError : std::runtime_error {
    double required_gain;
    double window_min;
    double window_max;
    GainOutsideStabilityError(const std::string& msg, double g, double lo, double hi)
        : std::runtime_error(msg), required_gain(g), window_min(lo), window_max(hi) {}
};

// Quadrature/root-scan/DDE machinery failed to reach its tolerance.
struct NumericsError : std::runtime_error {
    double achieved = 0.0;
    explicit NumericsError(const std::string& msg, double got = 0.0)
        : std::runtime_error(msg), achieved(got) {}
};

}  // namespace inloop

#endif  // INLOOP_TYPES_HPP_
