#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "iqm/types.hpp"

namespace iqm {

// ---- quadrature ----------------------------------------------------------

// Running integral of samples f(t_i) on a possibly nonuniform grid. Each
// interval is integrated exactly for the quadratic through three adjacent
// samples (composite Simpson when the grid is uniform and the count odd).
std::vector<double> cumulative_simpson(const std::vector<double>& t, const std::vector<double>& f);

// Adaptive Gauss-Kronrod (7/15) on [a, b].
double gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-13, int max_depth = 60);

// ---- ODE -----------------------------------------------------------------

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  // 0: pick from the first derivative
    double h_floor = 1e-13;  // relative to max(1, |t|)
    long max_steps = 50'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

using OdeRhs = std::function<Vec(double, const Vec&)>;

// Dormand-Prince 5(4) with local error control. Steps are clipped so the
// integrator lands exactly on every requested output time.
std::vector<Vec> integrate_dopri5(const OdeRhs& f, double t0, const Vec& y0,
                                  const std::vector<double>& t_out, const OdeOptions& opt = {},
                                  OdeStats* stats = nullptr);

// ---- randomness ----------------------------------------------------------

// Stateless counter-based uniform in [0, 1): the same (seed, index) gives the
// same number whichever thread asks.
std::uint64_t splitmix64(std::uint64_t x);
double counter_uniform(std::uint64_t seed, std::uint64_t index);

using Rng = std::mt19937_64;

Vec random_unit_vector(int dim, Rng& rng);
Mat random_hermitian(int dim, Rng& rng, double scale = 1.0);
Mat random_unitary(int dim, Rng& rng);

// ---- misc ----------------------------------------------------------------

std::vector<double> linspace(double a, double b, int n);

// Continuous branch of arg along a sequence of complex samples, starting in (-pi, pi].
std::vector<double> unwrap_phase(const std::vector<cplx>& z);

} // namespace iqm
