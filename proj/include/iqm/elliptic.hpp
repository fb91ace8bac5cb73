#pragma once

namespace iqm {

// Carlson symmetric integrals (duplication algorithm, Carlson 1995).
double carlson_rf(double x, double y, double z);
double carlson_rj(double x, double y, double z, double p);
double carlson_rc(double x, double y);

// Legendre incomplete integral of the third kind,
//   Pi(n; phi | m) = int_0^phi d rho / ((1 - n sin^2 rho) sqrt(1 - m sin^2 rho)),
// for any real phi when n < 1 and m < 1; |phi| <= pi/2 also admits larger
// n, m as long as the integrand stays finite on [0, phi].
double legendre_pi(double n, double phi, double m);

// Same integral by adaptive Gauss-Kronrod; the independent verification path.
double legendre_pi_quadrature(double n, double phi, double m, double tol = 1e-14);

} // namespace iqm
