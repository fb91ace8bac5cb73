#pragma once

#include <array>

#include "iqm/hilbert.hpp"

namespace iqm {

// Two spin-1/2 systems with H = mu sigma.sigma, initial spins in the x-z
// plane at half-angle theta, initial polar amplitudes q+ >= q- > 0.
struct HyperfineParams {
    double mu = 1.0;
    double theta = 0.0;
    double q_plus0 = 1.0;

    HyperfineParams() = default;
    HyperfineParams(double mu_, double theta_, double q_plus0_);

    double q_minus0() const;
    double C() const;
    double S() const;
    double k() const;
    double l() const;
    double omega() const { return 4.0 * mu; }
    double e() const;
    double m() const;  // S^2 e^2, the parameter of Pi
    double delta(double t) const;
};

Mat hyperfine_hamiltonian(double mu);

StateVector hyperfine_gamma(const HyperfineParams& p, double t);

// Continuous branch of arctan(a tan x) that vanishes at x = 0 (a != 0 fixed).
double continuous_arctan(double a, double x);

struct HyperfineClosedForm {
    double delta = 0.0;
    double tau_plus = 0.0, tau_minus = 0.0;       // A0 phases of phi+/-
    double energy_integral = 0.0;                   // int_0^t H_{kk,kk} ds (same for both k)
    cplx alpha;
    double beta_plus = 0.0, beta_minus = 0.0;
    double norm2_plus = 0.0, norm2_minus = 0.0;   // |(alpha, beta)|^2 = 2 sqrt(Delta)(sqrt(Delta) -+ Ckl)
    PolarFrame horizontal0;  // A0-horizontal frame with amplitudes q0
    PolarFrame frame;        // A^H amplitudes q^H; the A^H phase rides on phi
};

// Frame order is (+, -).
HyperfineClosedForm hyperfine_closed_form(const HyperfineParams& p, double t);
PolarFrame closed_form_frame(const HyperfineParams& p, double t);

struct BlochPair {
    std::array<double, 3> electron;
    std::array<double, 3> proton;
    std::array<double, 3> center;
    double E = 0.0, G = 0.0, z = 0.0;
};

// Spin expectation vectors (half the polarization vectors) on the ellipse
// x = E cos wt, y = G sin wt at height z.
BlochPair bloch_trajectory(const HyperfineParams& p, double t);

struct SignResult {
    int sign = +1;          // +1 for '+', -1 for '-'
    bool on_boundary = false;
    double S_plus = 0.0, S_minus = 0.0;  // arc coordinates reduced into the box
};

// Closed-form n = 2 membership rule from the amplitudes (q+, q-).
SignResult label_sign_amplitudes(cplx q_plus, cplx q_minus, double boundary_tol = 1e-12);
SignResult label_sign(const HyperfineParams& p, double t);

} // namespace iqm
