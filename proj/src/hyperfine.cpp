#include "iqm/hyperfine.hpp"

#include <cmath>
#include <numbers>

#include "iqm/elliptic.hpp"

namespace iqm {

namespace {

constexpr double kPi = std::numbers::pi;

// Continuous arg of z(w) = d(w) cos w + i n sin w relative to z(0) = d0,
// valid while n keeps its sign (d may change sign). Odd in w.
double continuous_arg(double n, double d, double d0, double w) {
    if (w < 0.0) return -continuous_arg(n, d, d0, -w);
    const double j = std::floor(w / kPi);
    const double s = (n * d0 > 0.0) ? 1.0 : -1.0;
    const double sign_j = std::fmod(j, 2.0) == 0.0 ? 1.0 : -1.0;
    // z / (d0 (-1)^j) has imaginary part of sign s on this half period
    const cplx z = cplx(d * std::cos(w), n * std::sin(w)) / (d0 * sign_j);
    double rel = std::arg(z);
    // rel lies in [0, pi] (s > 0) or [-pi, 0]; only rounding can push it across -pi/pi
    if (s > 0.0 && rel < -0.5 * kPi) rel += 2.0 * kPi;
    if (s < 0.0 && rel > 0.5 * kPi) rel -= 2.0 * kPi;
    return s * j * kPi + rel;
}

} // namespace

HyperfineParams::HyperfineParams(double mu_, double theta_, double q_plus0_)
    : mu(mu_), theta(theta_), q_plus0(q_plus0_) {
    if (!(mu > 0.0)) throw ValidationError("hyperfine: mu must be positive");
    if (!(q_plus0 >= std::sqrt(0.5) && q_plus0 < 1.0))
        throw ValidationError("hyperfine: q+(0) must lie in [1/sqrt2, 1)");
    if (k() * k() < C() * C() * l() * l())
        throw ValidationError("hyperfine: k^2 >= C^2 l^2 violated (axis convention)");
}

double HyperfineParams::q_minus0() const { return std::sqrt(1.0 - q_plus0 * q_plus0); }
double HyperfineParams::C() const { return std::cos(theta); }
double HyperfineParams::S() const { return std::sin(theta); }
double HyperfineParams::k() const { return q_plus0 - q_minus0(); }
double HyperfineParams::l() const { return q_plus0 + q_minus0(); }
double HyperfineParams::e() const {
    return std::sqrt(std::max(0.0, k() * k() - C() * C() * l() * l())) / k();
}
double HyperfineParams::m() const { return S() * S() * e() * e(); }
double HyperfineParams::delta(double t) const {
    const double s = std::sin(omega() * t);
    return l() * l() * k() * k() * (1.0 - m() * s * s);
}

Mat hyperfine_hamiltonian(double mu) {
    Mat h = Mat::Zero(4, 4);
    h(0, 0) = h(3, 3) = mu;
    h(1, 1) = h(2, 2) = -mu;
    h(1, 2) = h(2, 1) = 2.0 * mu;
    return h;
}

StateVector hyperfine_gamma(const HyperfineParams& p, double t) {
    const double C = p.C(), S = p.S(), k = p.k(), l = p.l();
    const cplx slow = std::exp(cplx(0.0, -p.mu * t));
    const cplx fast = std::exp(cplx(0.0, 3.0 * p.mu * t));
    Vec g(4);
    g << 0.5 * (C * l + k) * slow, -0.5 * S * l * fast, 0.5 * S * l * fast, 0.5 * (C * l - k) * slow;
    return StateVector(BipartiteSpace(2, 2), g, 1e-12);
}

double continuous_arctan(double a, double x) {
    if (a == 0.0) return 0.0;
    return continuous_arg(a, 1.0, 1.0, x);
}

HyperfineClosedForm hyperfine_closed_form(const HyperfineParams& p, double t) {
    const double C = p.C(), S = p.S(), k = p.k(), l = p.l();
    const double m = p.m();
    const double e2 = p.e() * p.e();
    if (S == 0.0 || C == 0.0) throw DegenerateError("hyperfine: theta in {0, pi/2} is degenerate");
    if (!(p.e() < 1.0) || k <= 0.0) throw DegenerateError("hyperfine: e < 1 and q+ > q- required");
    const double w = p.omega() * t;
    const double sw = std::sin(w);

    HyperfineClosedForm out;
    out.delta = p.delta(t);
    const double sd = std::sqrt(out.delta);
    out.alpha = S * l * cplx(k * std::cos(w), -C * l * sw);
    out.beta_plus = -C * k * l + sd;
    out.beta_minus = -C * k * l - sd;
    out.norm2_plus = std::norm(out.alpha) + out.beta_plus * out.beta_plus;
    out.norm2_minus = std::norm(out.alpha) + out.beta_minus * out.beta_minus;

    const double pi_term = legendre_pi(e2, w, m);
    const double lin = 0.5 * continuous_arctan(C * l / k, w);
    out.tau_plus = lin + C * C * l / (2.0 * k) * pi_term;
    out.tau_minus = lin - C * C * l / (2.0 * k) * pi_term;

    const double nu = C * C / std::sqrt(1.0 - m) * continuous_arctan(std::sqrt(1.0 - m), w);
    // int_0^t H_{kk,kk} ds, equal for both k: H_{kk,kk} = mu (2 C^2 / (1 - m sin^2 wt) - 1)
    out.energy_integral = 0.5 * nu - p.mu * t;

    // sigma_pm = arctan((C^2 l^2 +- sqrt Delta) / (k^2 +- sqrt Delta) tan wt), continued
    const double sd0 = l * k;
    const double lo = l * k * std::sqrt(1.0 - m);
    const double num_minus_lo = C * C * l * l - sd0, num_minus_hi = C * C * l * l - lo;
    if (num_minus_lo * num_minus_hi <= 0.0)
        throw DegenerateError("hyperfine: sigma- numerator changes sign; closed-form branch undefined");
    const double sigma_plus = continuous_arg(C * C * l * l + sd, k * k + sd, k * k + sd0, w);
    const double sigma_minus = continuous_arg(C * C * l * l - sd, k * k - sd, k * k - sd0, w);

    const double rp = std::sqrt(0.5 * (1.0 + sd));
    const double rm = std::sqrt(std::max(0.0, 0.5 * (1.0 - sd)));
    // A0 amplitudes; the A^H ones carry the extra exp(i int H_kk,kk)
    const double base = -0.25 * w;
    const double cpi = C * C * l / k * pi_term;
    const cplx q0_plus = std::polar(rp, base + sigma_plus - cpi);
    const cplx q0_minus = std::polar(rm, base + sigma_minus + cpi);
    const cplx zeta = std::exp(cplx(0.0, out.energy_integral));

    PolarFrame f0;
    f0.phi.resize(2, 2);
    f0.psi.resize(2, 2);
    const double np = std::sqrt(out.norm2_plus), nm = std::sqrt(out.norm2_minus);
    const cplx up = std::exp(cplx(0.0, out.tau_plus)), um = std::exp(cplx(0.0, out.tau_minus));
    f0.phi.col(0) << up * out.alpha / np, up * out.beta_plus / np;
    f0.psi.col(0) << up * out.alpha / np, -up * out.beta_plus / np;
    f0.phi.col(1) << -um * out.alpha / nm, -um * out.beta_minus / nm;
    f0.psi.col(1) << um * out.alpha / nm, -um * out.beta_minus / nm;
    f0.q.resize(2);
    f0.q << q0_plus, q0_minus;

    PolarFrame fh = f0;
    fh.q << q0_plus * zeta, q0_minus * zeta;
    fh.phi *= std::conj(zeta);
    fh.degenerate_pairs = f0.degenerate_pairs = find_degenerate_pairs(fh.radii());
    out.horizontal0 = std::move(f0);
    out.frame = std::move(fh);
    return out;
}

PolarFrame closed_form_frame(const HyperfineParams& p, double t) {
    return hyperfine_closed_form(p, t).frame;
}

BlochPair bloch_trajectory(const HyperfineParams& p, double t) {
    const double C = p.C(), S = p.S(), k = p.k(), l = p.l();
    BlochPair b;
    b.E = S * k * l;  // S (q+^2 - q-^2)
    b.G = S * C * l * l;
    b.z = C * k * l;
    if (b.E * b.G == 0.0) throw DegenerateError("hyperfine: degenerate ellipse (GE = 0)");
    const double w = p.omega() * t;
    const double x = b.E * std::cos(w), y = b.G * std::sin(w);
    b.electron = {0.5 * x, 0.5 * y, 0.5 * b.z};
    b.center = {0.0, 0.0, 0.5 * b.z};
    for (int i = 0; i < 3; ++i) b.proton[i] = 2.0 * b.center[i] - b.electron[i];
    return b;
}

SignResult label_sign_amplitudes(cplx q_plus, cplx q_minus, double tol) {
    const double rp = std::abs(q_plus), rm = std::abs(q_minus);
    if (!(rp > 0.0 && rm > 0.0) || std::abs(rp - rm) < kDegenerateRadii)
        throw DegenerateError("label_sign: radii must be positive and distinct");
    auto reduce = [](double a) {
        double r = std::fmod(a, 2.0 * kPi);
        if (r < 0.0) r += 2.0 * kPi;
        if (r >= 2.0 * kPi) r = 0.0;
        return r;
    };
    SignResult out;
    out.S_plus = rp * reduce(std::arg(q_plus));
    out.S_minus = rm * reduce(std::arg(q_minus));
    const double sp = out.S_plus, sm = out.S_minus;
    const double c1 = rm * sp / rp;
    const double c2 = 2.0 * kPi * rp * rp / rm - sp * rp / rm;
    const double c3 = 2.0 * kPi * rm - sp * rp / rm;
    const bool below = sm < c1;
    out.sign = ((below && sm < c2) || (!below && sm > c3)) ? +1 : -1;
    out.on_boundary = std::abs(sm - c1) < tol || (below ? std::abs(sm - c2) < tol : std::abs(sm - c3) < tol);
    return out;
}

SignResult label_sign(const HyperfineParams& p, double t) {
    const PolarFrame f = closed_form_frame(p, t);
    return label_sign_amplitudes(f.q(0), f.q(1));
}

} // namespace iqm
