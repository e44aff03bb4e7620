#ifndef INLOOP_ORACLE_HPP_
#define INLOOP_ORACLE_HPP_

// Independent numerical linear-response engine. Assembles the four-unknown
// frequency-domain system for (a, a^dag, b, b^dag) from the linearized
// Langevin equations, closes the feedback row algebraically through the
// measured-output definition, and solves per frequency. Any spectrum is then
// a bilinear contraction of solution rows with the input-noise correlations.
// Every closed-form spectrum in the library is validated against this path.

#include <Eigen/Dense>

#include "inloop/optomech.hpp"

namespace inloop {

enum class OutputSide { fb, un };

class LinearResponseOracle {
  public:
    // Input channels: a_in,1 / a_in,1^dag / a_in,2 / a_in,2^dag /
    // a'_in / a'_in^dag / b_in / b_in^dag / X_v.
    static constexpr int kInputs = 9;
    using Row = Eigen::Matrix<Complex, 1, kInputs>;

    explicit LinearResponseOracle(OmLoop om);

    struct Rows {
        Row a, adag, b, bdag, photocurrent;
    };
    // Throws UnstableLoopError if the system matrix is singular at w.
    Rows solve(double w) const;

    Row output_row(OutputSide side, double theta, double w) const;
    Row position_row(double w) const;       // q = (b + b^dag)/sqrt(2)
    Row cavity_amp_row(double w) const;     // a + a^dag

    // <A(w) B(w')> = S delta(w + w'): contract rowA(w) with rowB(-w).
    Complex contract(const Row& row_at_w, const Row& row_at_minus_w) const;

    double photocurrent_psd(double w) const;
    // Symmetrized position spectrum.
    double position_psd(double w) const;
    // Unsymmetrized cavity amplitude-quadrature spectrum; with G = 0 this is
    // S_F(w) of the cooling theory.
    double cavity_amp_psd(double w) const;
    double output_psd(OutputSide side, double theta, double w) const;
    Complex output_cross_psd(double theta_fb, double theta_un, double w) const;
    // Cross spectrum of the unused port with itself at two phases.
    Complex output_cross_psd_unun(double theta, double theta_prime, double w) const;
    // Elements of the 2x2 cavity spectral-density matrix S_a(w).
    Eigen::Matrix2cd cavity_spectral_matrix(double w) const;

    const OmLoop& om() const { return om_; }

  private:
    OmLoop om_;
    double phi_c_;
    double phi_out_[2];  // [port1, port2]
    Eigen::Matrix<Complex, kInputs, kInputs> corr_;

    int fb_port_index() const;  // 0 -> mirror 1, 1 -> mirror 2
    int un_port_index() const;
};

}  // namespace inloop

#endif  // INLOOP_ORACLE_HPP_
