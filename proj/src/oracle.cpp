#include "inloop/oracle.hpp"

#include <cmath>

namespace inloop {

namespace {
// Input channel indices.
constexpr int kA1 = 0, kA1d = 1, kA2 = 2, kA2d = 3, kAl = 4, kAld = 5;
constexpr int kB = 6, kBd = 7, kXv = 8;
}  // namespace

LinearResponseOracle::LinearResponseOracle(OmLoop om) : om_(std::move(om)) {
    const CavityPhases ph = cavity_phases_or(om_.cl.cav, 0.0);
    phi_c_ = ph.phi_c;
    phi_out_[0] = ph.phi_c + ph.phi_c_prime;  // mirror 1 (reflection)
    phi_out_[1] = ph.phi_c;                   // mirror 2 (transmission)

    corr_.setZero();
    corr_(kA1, kA1d) = 1.0;
    corr_(kA2, kA2d) = 1.0;
    corr_(kAl, kAld) = 1.0;
    corr_(kB, kBd) = om_.mech.n_th + 1.0;
    corr_(kBd, kB) = om_.mech.n_th;
    corr_(kXv, kXv) = 1.0;
}

int LinearResponseOracle::fb_port_index() const {
    return om_.cl.port == Port::reflection ? 0 : 1;
}

int LinearResponseOracle::un_port_index() const { return 1 - fb_port_index(); }

LinearResponseOracle::Rows LinearResponseOracle::solve(double w) const {
    const CavityLoop& cl = om_.cl;
    const CavityParams& cav = cl.cav;
    const MechanicalParams& mech = om_.mech;
    const double eta = cl.loop.detector.eta;
    const double sq_eta = std::sqrt(eta);
    const double tbfb = cl.theta_bar_fb();
    const double G = mech.coupling;
    const Complex g = cl.loop.filter(w);
    const Complex epc = std::exp(-kI * phi_c_);

    // Photocurrent closure: i = (CA a + CAd a^dag + CU.u)/d, where d absorbs
    // the direct reflection of the modulated input when the loop is closed on
    // mirror 1.
    const bool refl = (cl.port == Port::reflection);
    const Complex d = refl ? 1.0 + 2.0 * sq_eta * g * std::cos(tbfb) : 1.0;
    if (std::abs(d) < 1e-12)
        throw SingularConfigError("oracle: reflection loop denominator ~ 0");
    const Complex CA = sq_eta * std::sqrt(2.0 * cl.kappa_fb()) *
                       std::exp(-kI * (tbfb - phi_c_)) / d;
    const Complex CAd = sq_eta * std::sqrt(2.0 * cl.kappa_fb()) *
                        std::exp(kI * (tbfb - phi_c_)) / d;
    Row CU = Row::Zero();
    CU(refl ? kA1 : kA2) = -sq_eta * std::exp(-kI * tbfb) / d;
    CU(refl ? kA1d : kA2d) = -sq_eta * std::exp(kI * tbfb) / d;
    CU(kXv) = std::sqrt(1.0 - eta) / d;

    const double r1 = std::sqrt(2.0 * cav.kappa1);
    const double r2 = std::sqrt(2.0 * cav.kappa2);
    const double rl = std::sqrt(2.0 * cav.kappa_loss);
    const Complex fb0 = r1 * epc * g;             // feedback drive in row 0
    const Complex fb1 = r1 * std::conj(epc) * g;  // and its conjugate row

    Eigen::Matrix4cd M;
    M.setZero();
    M(0, 0) = Complex(cav.kappa(), cav.detuning - w) - fb0 * CA;
    M(0, 1) = -fb0 * CAd;
    M(0, 2) = -kI * G;
    M(0, 3) = -kI * G;
    M(1, 0) = -fb1 * CA;
    M(1, 1) = Complex(cav.kappa(), -(cav.detuning + w)) - fb1 * CAd;
    M(1, 2) = kI * G;
    M(1, 3) = kI * G;
    M(2, 0) = -kI * G;
    M(2, 1) = -kI * G;
    M(2, 2) = Complex(0.5 * mech.gamma, mech.omega_m - w);
    M(3, 0) = kI * G;
    M(3, 1) = kI * G;
    M(3, 3) = Complex(0.5 * mech.gamma, -(mech.omega_m + w));

    Eigen::Matrix<Complex, 4, kInputs> N;
    N.setZero();
    N(0, kA1) = r1 * epc;
    N(0, kA2) = r2 * epc;
    N(0, kAl) = rl * epc;
    N(1, kA1d) = r1 * std::conj(epc);
    N(1, kA2d) = r2 * std::conj(epc);
    N(1, kAld) = rl * std::conj(epc);
    N(2, kB) = std::sqrt(mech.gamma);
    N(3, kBd) = std::sqrt(mech.gamma);
    N.row(0) += fb0 * CU;
    N.row(1) += fb1 * CU;

    const Eigen::FullPivLU<Eigen::Matrix4cd> lu(M);
    if (!lu.isInvertible())
        throw UnstableLoopError("oracle: singular linear system at w = " +
                                std::to_string(w));
    const Eigen::Matrix<Complex, 4, kInputs> R = lu.solve(N);

    Rows rows;
    rows.a = R.row(0);
    rows.adag = R.row(1);
    rows.b = R.row(2);
    rows.bdag = R.row(3);
    rows.photocurrent = CA * R.row(0) + CAd * R.row(1) + CU;
    return rows;
}

LinearResponseOracle::Row LinearResponseOracle::output_row(OutputSide side, double theta,
                                                           double w) const {
    const Rows rows = solve(w);
    const int port = (side == OutputSide::fb) ? fb_port_index() : un_port_index();
    const double kj = (port == 0) ? om_.cl.cav.kappa1 : om_.cl.cav.kappa2;
    const Complex g = om_.cl.loop.filter(w);

    Row ain = Row::Zero(), aind = Row::Zero();
    if (port == 0) {
        ain(kA1) = 1.0;
        aind(kA1d) = 1.0;
        ain += g * rows.photocurrent;  // modulated drive-side input
        aind += g * rows.photocurrent;
    } else {
        ain(kA2) = 1.0;
        aind(kA2d) = 1.0;
    }

    const double tb = theta + phi_out_[port];
    const Row aout = std::sqrt(2.0 * kj) * std::exp(kI * phi_c_) * rows.a - ain;
    const Row aoutd = std::sqrt(2.0 * kj) * std::exp(-kI * phi_c_) * rows.adag - aind;
    return std::exp(-kI * tb) * aout + std::exp(kI * tb) * aoutd;
}

LinearResponseOracle::Row LinearResponseOracle::position_row(double w) const {
    const Rows rows = solve(w);
    return (rows.b + rows.bdag) / std::sqrt(2.0);
}

LinearResponseOracle::Row LinearResponseOracle::cavity_amp_row(double w) const {
    const Rows rows = solve(w);
    return rows.a + rows.adag;
}

Complex LinearResponseOracle::contract(const Row& row_at_w, const Row& row_at_minus_w) const {
    return row_at_w * corr_ * row_at_minus_w.transpose();
}

double LinearResponseOracle::photocurrent_psd(double w) const {
    return contract(solve(w).photocurrent, solve(-w).photocurrent).real();
}

double LinearResponseOracle::position_psd(double w) const {
    const Complex sp = contract(position_row(w), position_row(-w));
    const Complex sm = contract(position_row(-w), position_row(w));
    return 0.5 * (sp + sm).real();
}

double LinearResponseOracle::cavity_amp_psd(double w) const {
    return contract(cavity_amp_row(w), cavity_amp_row(-w)).real();
}

double LinearResponseOracle::output_psd(OutputSide side, double theta, double w) const {
    return contract(output_row(side, theta, w), output_row(side, theta, -w)).real();
}

Complex LinearResponseOracle::output_cross_psd(double theta_fb, double theta_un,
                                               double w) const {
    return contract(output_row(OutputSide::fb, theta_fb, w),
                    output_row(OutputSide::un, theta_un, -w));
}

Complex LinearResponseOracle::output_cross_psd_unun(double theta, double theta_prime,
                                                    double w) const {
    return contract(output_row(OutputSide::un, theta, w),
                    output_row(OutputSide::un, theta_prime, -w));
}

Eigen::Matrix2cd LinearResponseOracle::cavity_spectral_matrix(double w) const {
    const Rows rp = solve(w);
    const Rows rm = solve(-w);
    Eigen::Matrix2cd S;
    S(0, 0) = contract(rp.a, rm.a);
    S(0, 1) = contract(rp.a, rm.adag);
    S(1, 0) = contract(rp.adag, rm.a);
    S(1, 1) = contract(rp.adag, rm.adag);
    return S;
}

}  // namespace inloop
