#include "iqm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iqm {

namespace {

// integral over [x0, x1] of the quadratic through (x0,f0), (x1,f1), (x2,f2)
double quad_piece(double x0, double x1, double x2, double f0, double f1, double f2) {
    const double h = x1 - x0;
    const double d = x2 - x1;
    // Lagrange weights integrated over [x0, x1]
    const double w0 = h * (2.0 * h + 3.0 * d) / (6.0 * (h + d));
    const double w1 = h * (h + 3.0 * d) / (6.0 * d);
    const double w2 = -h * h * h / (6.0 * d * (h + d));
    return w0 * f0 + w1 * f1 + w2 * f2;
}

} // namespace

std::vector<double> cumulative_simpson(const std::vector<double>& t, const std::vector<double>& f) {
    const size_t n = t.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
        return out;
    }
    // Even nodes accumulate whole Simpson pairs; an odd node adds the first
    // half of its pair's quadratic, so errors do not build up interval by interval.
    for (size_t i = 2; i < n; i += 2) {
        const double first = quad_piece(t[i - 2], t[i - 1], t[i], f[i - 2], f[i - 1], f[i]);
        const double second = -quad_piece(t[i], t[i - 1], t[i - 2], f[i], f[i - 1], f[i - 2]);
        out[i - 1] = out[i - 2] + first;
        out[i] = out[i - 2] + first + second;
    }
    if (n % 2 == 0) {
        const size_t i = n - 1;
        out[i] = out[i - 1] - quad_piece(t[i], t[i - 1], t[i - 2], f[i], f[i - 1], f[i - 2]);
    }
    return out;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& kron, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kWgk[7];
    double g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double s = f(c - x) + f(c + x);
        k += kWgk[j] * s;
        if (j % 2 == 1) g += kWg[j / 2] * s;
    }
    kron = k * h;
    err = std::abs((k - g) * h);
}

double gk_adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    double k, e;
    gk15(f, a, b, k, e);
    if (e <= tol || depth <= 0 || std::abs(b - a) < 1e-15 * (1.0 + std::abs(a))) return k;
    const double m = 0.5 * (a + b);
    return gk_adapt(f, a, m, 0.5 * tol, depth - 1) + gk_adapt(f, m, b, 0.5 * tol, depth - 1);
}

} // namespace

double gauss_kronrod(const std::function<double(double)>& f, double a, double b, double tol,
                     int max_depth) {
    if (a == b) return 0.0;
    return gk_adapt(f, a, b, tol, max_depth);
}

std::vector<Vec> integrate_dopri5(const OdeRhs& f, double t0, const Vec& y0,
                                  const std::vector<double>& t_out, const OdeOptions& opt,
                                  OdeStats* stats) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats st;
    std::vector<Vec> out;
    out.reserve(t_out.size());
    double t = t0;
    Vec y = y0;
    Vec k1 = f(t, y);
    ++st.rhs_calls;
    double h = opt.h_init;
    if (h <= 0.0) {
        const double d0 = y.norm() + 1e-300;
        const double d1 = k1.norm();
        h = d1 > 1e-12 ? 0.01 * d0 / d1 : 1e-3;
    }

    for (double target : t_out) {
        if (target < t - 1e-15 * std::max(1.0, std::abs(t)))
            throw IntegrationError("output times must be non-decreasing", t);
        while (target - t > 1e-15 * std::max(1.0, std::abs(target))) {
            if (st.accepted + st.rejected > opt.max_steps)
                throw IntegrationError("step budget exhausted", t);
            const bool last = h >= target - t;
            const double hs = last ? target - t : h;
            const Vec k2 = f(t + c2 * hs, y + hs * (a21 * k1));
            const Vec k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
            const Vec k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = f(t + hs, yn);
            st.rhs_calls += 6;
            const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double en = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(yn(i)));
                en += std::norm(err(i)) / (sc * sc);
            }
            en = std::sqrt(en / static_cast<double>(y.size()));

            if (en <= 1.0) {
                t = last ? target : t + hs;
                y = yn;
                k1 = k7;
                ++st.accepted;
                const double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
                // keep the pre-clip step length when the clip shortened it
                h = std::max(h, hs) * std::clamp(fac, 0.2, 5.0);
                if (last) h = std::max(h, hs);
            } else {
                ++st.rejected;
                h = hs * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
                if (h < opt.h_floor * std::max(1.0, std::abs(t)))
                    throw IntegrationError("tolerance unachievable at step-size floor", t);
            }
        }
        out.push_back(y);
    }
    if (stats) *stats = st;
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t z = splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

Vec random_unit_vector(int dim, Rng& rng) {
    std::normal_distribution<double> g;
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
    return v / v.norm();
}

Mat random_hermitian(int dim, Rng& rng, double scale) {
    std::normal_distribution<double> g;
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    return scale * 0.5 * (a + a.adjoint());
}

Mat random_unitary(int dim, Rng& rng) {
    std::normal_distribution<double> g;
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
    out[n - 1] = b;
    return out;
}

std::vector<double> unwrap_phase(const std::vector<cplx>& z) {
    std::vector<double> out(z.size());
    if (z.empty()) return out;
    out[0] = std::arg(z[0]);
    for (size_t i = 1; i < z.size(); ++i) {
        double d = std::arg(z[i]) - std::arg(z[i - 1]);
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        out[i] = out[i - 1] + d;
    }
    return out;
}

} // namespace iqm
