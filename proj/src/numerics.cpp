#include "inloop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace inloop {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T>
struct GkEval {
    T value;
    double error;
};

template <typename T, typename F>
GkEval<T> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const T fc = f(c);
    T resk = kWgk[7] * fc;
    T resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const T f1 = f(c - x), f2 = f(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const T ik = resk * h;
    const T ig = resg * h;
    return {ik, std::abs(ik - ig)};
}

template <typename T>
struct LineResult {
    T value;
    double error;
    int panels;
};

// Adaptive worst-first refinement of the compactified integral.
template <typename T, typename F>
LineResult<T> integrate_line_impl(const F& f, const QuadratureSpec& spec) {
    using std::numbers::pi;
    if (spec.abs_tol <= 0.0 || spec.rel_tol < 0.0)
        throw std::invalid_argument("integrate_line: tolerances must be > 0");

    double ulo, uhi;
    std::function<T(double)> g;
    const double s = (spec.scale > 0.0) ? spec.scale : 1.0;
    if (spec.compactification == QuadratureSpec::Compactification::tangent_map) {
        // w = s tan(u), dw = s/cos^2(u) du
        ulo = -0.5 * pi;
        uhi = 0.5 * pi;
        g = [&f, s](double u) -> T {
            const double cu = std::cos(u);
            if (cu == 0.0) return T{};
            const double w = s * std::tan(u);
            return f(w) * (s / (cu * cu));
        };
    } else {
        if (spec.truncate_radius <= 0.0)
            throw std::invalid_argument("integrate_line: truncate_at needs truncate_radius > 0");
        ulo = -spec.truncate_radius;
        uhi = spec.truncate_radius;
        g = [&f](double u) -> T { return f(u); };
    }

    // Initial partition: a few uniform panels, split at the breakpoints.
    std::vector<double> cuts{ulo, uhi};
    for (int i = 1; i < 8; ++i) cuts.push_back(ulo + (uhi - ulo) * i / 8.0);
    for (double w : spec.breakpoints) {
        double u = w;
        if (spec.compactification == QuadratureSpec::Compactification::tangent_map)
            u = std::atan(w / s);
        if (u > ulo && u < uhi) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    struct TPanel {
        double a, b, error;
        T value;
        bool operator<(const TPanel& o) const { return error < o.error; }
    };
    std::priority_queue<TPanel> heap;
    T total{};
    double toterr = 0.0;
    int panels = 0;
    auto push = [&](double a, double b) {
        const GkEval<T> e = gk15<T>(g, a, b);
        heap.push({a, b, e.error, e.value});
        total += e.value;
        toterr += e.error;
        ++panels;
    };
    for (size_t i = 0; i + 1 < cuts.size(); ++i) push(cuts[i], cuts[i + 1]);

    auto tol = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (toterr > tol() && panels < spec.max_subdivisions) {
        const TPanel p = heap.top();
        heap.pop();
        total -= p.value;
        toterr -= p.error;
        --panels;
        const double m = 0.5 * (p.a + p.b);
        push(p.a, m);
        push(m, p.b);
    }
    if (toterr > tol())
        throw NumericsError("integrate_line: subdivision budget exhausted "
                            "(achieved error " + std::to_string(toterr) + ")",
                            toterr);
    return {total, toterr, panels};
}

}  // namespace

QuadratureResult integrate_line(const std::function<double(double)>& f,
                                const QuadratureSpec& spec) {
    const auto r = integrate_line_impl<double>(f, spec);
    return {r.value, r.error, r.panels};
}

ComplexQuadratureResult integrate_line_complex(const std::function<Complex(double)>& f,
                                               const QuadratureSpec& spec) {
    const auto r = integrate_line_impl<Complex>(f, spec);
    return {r.value, r.error, r.panels};
}

std::vector<double> find_roots_bracketed(const std::function<double(double)>& f,
                                         double lo, double hi, int grid_points) {
    if (!(hi > lo)) throw std::invalid_argument("find_roots_bracketed: need hi > lo");
    if (grid_points < 2) throw std::invalid_argument("find_roots_bracketed: grid too small");

    std::vector<double> roots;
    const double h = (hi - lo) / grid_points;
    double xa = lo, fa = f(xa);
    for (int i = 1; i <= grid_points; ++i) {
        const double xb = (i == grid_points) ? hi : lo + i * h;
        const double fb = f(xb);
        if (fa == 0.0) roots.push_back(xa);
        if (fa * fb < 0.0) {
            double a = xa, b = xb, va = fa;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (b - a <= 1e-10 * std::max(1.0, std::abs(m))) break;
                const double vm = f(m);
                if (vm == 0.0) {
                    a = b = m;
                    break;
                }
                if (va * vm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    va = vm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(xa);

    std::sort(roots.begin(), roots.end());
    std::vector<double> dedup;
    for (double r : roots) {
        if (dedup.empty() || r - dedup.back() > 1e-9 * std::max(1.0, std::abs(r)))
            dedup.push_back(r);
    }
    return dedup;
}

namespace {

DdeState axpy(const DdeState& y, const DdeState& dy, double h) {
    DdeState out(y.size());
    for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * dy[i];
    return out;
}

}  // namespace

DdeTrajectory integrate_dde(const DdeRhs& rhs, const DdeState& y0, const DDESpec& spec) {
    if (spec.horizon <= 0.0) throw std::invalid_argument("integrate_dde: horizon must be > 0");
    if (spec.step <= 0.0) throw std::invalid_argument("integrate_dde: step must be > 0");
    if (spec.delay < 0.0) throw std::invalid_argument("integrate_dde: delay must be >= 0");
    if (spec.delay > 0.0 && spec.step > spec.delay / 10.0)
        throw std::invalid_argument("integrate_dde: step must be <= delay/10");

    // Snap the step so the delay is an integer number of steps; derivative
    // discontinuities then stay on grid nodes.
    double h = spec.step;
    long lag_steps = 0;
    if (spec.delay > 0.0) {
        lag_steps = std::lround(std::ceil(spec.delay / h));
        h = spec.delay / static_cast<double>(lag_steps);
    }
    const long n_steps = std::lround(std::ceil(spec.horizon / h - 1e-12));

    const size_t dim = y0.size();
    const DdeState zero(dim, Complex{0.0, 0.0});

    DdeTrajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(y0);

    std::vector<DdeState> derivs;  // f at grid nodes, same indexing as states
    derivs.reserve(n_steps + 1);

    // Delayed-state lookup: zero history before t=0, cubic Hermite between
    // stored nodes afterwards.
    auto delayed = [&](double t) -> DdeState {
        if (spec.delay == 0.0 || t <= 0.0) return (t == 0.0) ? traj.states.front() : zero;
        const double x = t / h;
        size_t i = static_cast<size_t>(std::floor(x + 1e-9));
        if (i >= traj.states.size() - 1) return traj.states.back();
        const double th = x - static_cast<double>(i);
        if (th < 1e-12) return traj.states[i];
        const DdeState &ya = traj.states[i], &yb = traj.states[i + 1];
        const DdeState &fa = derivs[i], &fb = derivs[i + 1];
        const double t2 = th * th, t3 = t2 * th;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        DdeState out(dim);
        for (size_t k = 0; k < dim; ++k)
            out[k] = h00 * ya[k] + h * h10 * fa[k] + h01 * yb[k] + h * h11 * fb[k];
        return out;
    };

    auto deriv_at = [&](double t, const DdeState& y) {
        return rhs(t, y, delayed(t - spec.delay));
    };

    derivs.push_back(deriv_at(0.0, y0));
    for (long n = 0; n < n_steps; ++n) {
        const double t = traj.times.back();
        const DdeState& y = traj.states.back();
        const DdeState k1 = derivs.back();
        const DdeState k2 = deriv_at(t + 0.5 * h, axpy(y, k1, 0.5 * h));
        const DdeState k3 = deriv_at(t + 0.5 * h, axpy(y, k2, 0.5 * h));
        const DdeState k4 = deriv_at(t + h, axpy(y, k3, h));
        DdeState ynext(dim);
        for (size_t i = 0; i < dim; ++i)
            ynext[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        traj.times.push_back(t + h);
        traj.states.push_back(std::move(ynext));
        derivs.push_back(deriv_at(traj.times.back(), traj.states.back()));
    }
    return traj;
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          int iters, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b));
         ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return (f1 < f2) ? x1 : x2;
}

MinimizeResult minimize(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& lo, const std::vector<double>& hi,
                        const OptimizerSpec& spec) {
    const size_t d = lo.size();
    if (hi.size() != d || d == 0) throw std::invalid_argument("minimize: bad box");
    if (spec.grid_points < 8) throw std::invalid_argument("minimize: grid_points >= 8");

    // Deterministic full-grid seed.
    const int n = spec.grid_points;
    std::vector<double> best(d);
    double fbest = std::numeric_limits<double>::infinity();
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    while (true) {
        for (size_t k = 0; k < d; ++k)
            x[k] = lo[k] + (hi[k] - lo[k]) * (idx[k] + 0.5) / n;
        const double v = f(x);
        if (v < fbest) {
            fbest = v;
            best = x;
        }
        size_t k = 0;
        while (k < d && ++idx[k] == n) idx[k++] = 0;
        if (k == d) break;
    }

    // Per-coordinate refinement around the best grid cell.
    std::vector<double> cur = best;
    for (int it = 0; it < spec.iters; ++it) {
        const double before = fbest;
        for (size_t k = 0; k < d; ++k) {
            const double cell = (hi[k] - lo[k]) / n;
            const double a = std::max(lo[k], cur[k] - cell);
            const double b = std::min(hi[k], cur[k] + cell);
            auto f1 = [&](double t) {
                std::vector<double> y = cur;
                y[k] = t;
                return f(y);
            };
            double t;
            if (spec.refinement == OptimizerSpec::Refinement::golden_section) {
                t = golden_section_min(f1, a, b, 64, spec.tol);
            } else {
                // coordinate descent by shrinking 9-point grids
                double aa = a, bb = b;
                t = cur[k];
                double ft = f1(t);
                for (int s = 0; s < 24; ++s) {
                    for (int j = 0; j <= 8; ++j) {
                        const double u = aa + (bb - aa) * j / 8.0;
                        const double fu = f1(u);
                        if (fu < ft) {
                            ft = fu;
                            t = u;
                        }
                    }
                    const double w = (bb - aa) / 4.0;
                    aa = std::max(a, t - w);
                    bb = std::min(b, t + w);
                }
            }
            const double fv = f1(t);
            if (fv < fbest) {
                fbest = fv;
                cur[k] = t;
            }
        }
        if (before - fbest < spec.tol * std::max(1.0, std::abs(fbest))) break;
    }
    return {cur, fbest};
}

}  // namespace inloop
