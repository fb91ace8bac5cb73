#include "iqm/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "iqm/numerics.hpp"
#include "iqm/types.hpp"

namespace iqm {

namespace {
constexpr double kTiny = 1e-300;
constexpr double kR = 1e-16;
} // namespace

double carlson_rc(double x, double y) {
    if (x < 0.0 || y == 0.0) throw ValidationError("carlson_rc: x >= 0, y != 0 required");
    if (y < 0.0) return std::sqrt(x / (x - y)) * carlson_rc(x - y, -y);
    if (x == 0.0) return std::numbers::pi / (2.0 * std::sqrt(y));
    const double u = y / x - 1.0;  // y = x (1 + u)
    if (std::abs(u) < 1e-4) {
        // arctan(sqrt u)/sqrt u = 1 - u/3 + u^2/5 - u^3/7 ...
        return (1.0 - u / 3.0 + u * u / 5.0 - u * u * u / 7.0 + u * u * u * u / 9.0) / std::sqrt(x);
    }
    if (u > 0.0) return std::atan(std::sqrt(u)) / std::sqrt(u * x);
    const double v = std::sqrt(-u);
    return std::atanh(v) / (v * std::sqrt(x));
}

double carlson_rf(double x, double y, double z) {
    if (x < 0.0 || y < 0.0 || z < 0.0 || (x + y < kTiny) || (x + z < kTiny) || (y + z < kTiny))
        throw ValidationError("carlson_rf: arguments must be non-negative, at most one zero");
    const double a0 = (x + y + z) / 3.0;
    double q = std::pow(3.0 * kR, -1.0 / 6.0) *
               std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
    double a = a0, xm = x, ym = y, zm = z, scale = 1.0;
    while (q * scale >= std::abs(a)) {
        const double sx = std::sqrt(xm), sy = std::sqrt(ym), sz = std::sqrt(zm);
        const double lam = sx * sy + sy * sz + sz * sx;
        xm = 0.25 * (xm + lam);
        ym = 0.25 * (ym + lam);
        zm = 0.25 * (zm + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    const double X = (a0 - x) * scale / a;
    const double Y = (a0 - y) * scale / a;
    const double Z = -X - Y;
    const double e2 = X * Y - Z * Z;
    const double e3 = X * Y * Z;
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(a);
}

double carlson_rj(double x, double y, double z, double p) {
    if (x < 0.0 || y < 0.0 || z < 0.0 || p <= 0.0 || (x + y < kTiny) || (x + z < kTiny) ||
        (y + z < kTiny))
        throw ValidationError("carlson_rj: x, y, z >= 0 (at most one zero) and p > 0 required");
    const double a0 = (x + y + z + 2.0 * p) / 5.0;
    const double delta = (p - x) * (p - y) * (p - z);
    double q = std::pow(0.25 * kR, -1.0 / 6.0) *
               std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z), std::abs(a0 - p)});
    double a = a0, xm = x, ym = y, zm = z, pm = p;
    double scale = 1.0;  // 4^-m
    double sum = 0.0;
    while (q * scale >= std::abs(a)) {
        const double sx = std::sqrt(xm), sy = std::sqrt(ym), sz = std::sqrt(zm), sp = std::sqrt(pm);
        const double lam = sx * sy + sy * sz + sz * sx;
        const double d = (sp + sx) * (sp + sy) * (sp + sz);
        const double e = scale * scale * scale * delta / (d * d);
        sum += scale / d * carlson_rc(1.0, 1.0 + e);
        xm = 0.25 * (xm + lam);
        ym = 0.25 * (ym + lam);
        zm = 0.25 * (zm + lam);
        pm = 0.25 * (pm + lam);
        a = 0.25 * (a + lam);
        scale *= 0.25;
    }
    const double X = (a0 - x) * scale / a;
    const double Y = (a0 - y) * scale / a;
    const double Z = (a0 - z) * scale / a;
    const double P = -(X + Y + Z) / 2.0;
    const double e2 = X * Y + X * Z + Y * Z - 3.0 * P * P;
    const double e3 = X * Y * Z + 2.0 * e2 * P + 4.0 * P * P * P;
    const double e4 = (2.0 * X * Y * Z + e2 * P + 3.0 * P * P * P) * P;
    const double e5 = X * Y * Z * P * P;
    const double series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 -
                          9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0;
    return scale * series / (a * std::sqrt(a)) + 6.0 * sum;
}

namespace {

double pi_principal(double n, double phi, double m) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double s2 = s * s;
    const double y = 1.0 - m * s2;
    const double p = 1.0 - n * s2;
    if (y <= 0.0 || p <= 0.0) throw ValidationError("legendre_pi: integrand singular on [0, phi]");
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, y, 1.0) + n / 3.0 * s2 * s * carlson_rj(c * c, y, 1.0, p);
}

} // namespace

double legendre_pi(double n, double phi, double m) {
    if (!std::isfinite(n) || !std::isfinite(phi) || !std::isfinite(m))
        throw ValidationError("legendre_pi: non-finite argument");
    const double half = 0.5 * std::numbers::pi;
    if (std::abs(phi) <= half) return pi_principal(n, phi, m);
    if (n >= 1.0 || m >= 1.0)
        throw ValidationError("legendre_pi: |phi| > pi/2 needs n < 1 and m < 1");
    // phi = j pi + phi', |phi'| <= pi/2; the integrand has period pi and is even.
    const double j = std::round(phi / std::numbers::pi);
    const double rest = phi - j * std::numbers::pi;
    const double complete = carlson_rf(0.0, 1.0 - m, 1.0) + n / 3.0 * carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - n);
    return 2.0 * j * complete + pi_principal(n, rest, m);
}

double legendre_pi_quadrature(double n, double phi, double m, double tol) {
    auto f = [n, m](double r) {
        const double s2 = std::sin(r) * std::sin(r);
        const double p = 1.0 - n * s2;
        const double y = 1.0 - m * s2;
        if (p <= 0.0 || y <= 0.0) throw ValidationError("legendre_pi: integrand singular on [0, phi]");
        return 1.0 / (p * std::sqrt(y));
    };
    // split at multiples of pi/2 so every piece is monotone in sin^2
    const double half = 0.5 * std::numbers::pi;
    const double sgn = phi < 0.0 ? -1.0 : 1.0;
    const double a = std::abs(phi);
    double total = 0.0;
    double lo = 0.0;
    while (lo < a) {
        const double hi = std::min(a, lo + half);
        total += gauss_kronrod(f, lo, hi, tol);
        lo = hi;
    }
    return sgn * total;
}

} // namespace iqm
