#ifndef INLOOP_NUMERICS_HPP_
#define INLOOP_NUMERICS_HPP_

// Shared numerical machinery: adaptive quadrature on the real line (compactified
// or truncated), bracketed root finding, a delay ODE integrator with cubic
// interpolated history, and a deterministic derivative-free box minimizer.

#include <functional>
#include <vector>

#include "inloop/types.hpp"

namespace inloop {

struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    int max_subdivisions = 4000;
    enum class Compactification { tangent_map, truncate_at };
    Compactification compactification = Compactification::tangent_map;
    double truncate_radius = 0.0;  // used by truncate_at
    double scale = 1.0;            // characteristic width of the tangent map
    // Abscissae where the integrand has known structure (peaks); the initial
    // partition is split there.
    std::vector<double> breakpoints;
};

struct QuadratureResult {
    double value = 0.0;
    double achieved_error = 0.0;
    int subdivisions = 0;
};

struct ComplexQuadratureResult {
    Complex value{0.0, 0.0};
    double achieved_error = 0.0;
    int subdivisions = 0;
};

// Integrate f over the whole real line. Throws NumericsError (carrying the
// achieved error estimate) if the subdivision budget is exhausted before the
// tolerance max(abs_tol, rel_tol*|value|) is met.
QuadratureResult integrate_line(const std::function<double(double)>& f,
                                const QuadratureSpec& spec = {});
ComplexQuadratureResult integrate_line_complex(const std::function<Complex(double)>& f,
                                               const QuadratureSpec& spec = {});

// All sign-change roots of f on [lo, hi], scanned on `grid_points` panels and
// refined by bisection to 1e-10 relative; sorted, de-duplicated.
std::vector<double> find_roots_bracketed(const std::function<double(double)>& f,
                                         double lo, double hi, int grid_points);

// ---- Delay ODE integration -------------------------------------------------

struct DDESpec {
    double step = 0.0;     // requested step [s]; snapped to delay/m
    double horizon = 0.0;  // integrate t in [0, horizon]
    double delay = 0.0;    // lag tau [s]
    enum class Interp { cubic };
    Interp interpolation = Interp::cubic;
};

using DdeState = std::vector<Complex>;
// rhs(t, y(t), y(t - delay)) -> dy/dt
using DdeRhs = std::function<DdeState(double, const DdeState&, const DdeState&)>;

struct DdeTrajectory {
    std::vector<double> times;
    std::vector<DdeState> states;
};

// Classical RK4 with cubic-Hermite interpolation of the delayed state. The
// history for t <= 0 is identically zero; `y0` is the state just after t = 0
// (impulse initial conditions enter here). Requires step <= delay/10 when
// delay > 0; the step is snapped so the delay is an integer number of steps.
DdeTrajectory integrate_dde(const DdeRhs& rhs, const DdeState& y0, const DDESpec& spec);

// ---- Derivative-free minimization -------------------------------------------

struct OptimizerSpec {
    int grid_points = 32;  // per dimension, >= 8
    enum class Refinement { golden_section, coordinate_descent };
    Refinement refinement = Refinement::golden_section;
    int iters = 60;
    double tol = 1e-10;
};

struct MinimizeResult {
    std::vector<double> argmin;
    double value = 0.0;
};

// Deterministic grid seed + per-coordinate refinement over the box
// [lo[i], hi[i]]. The result never exceeds the best grid value.
MinimizeResult minimize(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& lo, const std::vector<double>& hi,
                        const OptimizerSpec& spec = {});

// Scalar golden-section search on [a, b].
double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          int iters = 80, double tol = 1e-12);

}  // namespace inloop

#endif  // INLOOP_NUMERICS_HPP_
