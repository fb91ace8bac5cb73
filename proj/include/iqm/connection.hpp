#pragma once

#include <optional>
#include <vector>

#include "iqm/hilbert.hpp"

namespace iqm {

// H = h0 + h1 (x) I + I (x) h2 on C^n1 (x) C^n2.
struct HamiltonianSplit {
    int n1 = 1;
    int n2 = 1;
    Mat h0, h1, h2;

    Mat assemble() const;
};

class HamiltonianSpec {
public:
    static HamiltonianSpec constant(Mat h, std::optional<HamiltonianSplit> split = std::nullopt);
    static HamiltonianSpec from_split(const HamiltonianSplit& split);
    // H(t) = h_static + sin(omega t + phase) h_drive
    static HamiltonianSpec sinusoidal(Mat h_static, Mat h_drive, double omega, double phase);

    int dim() const { return static_cast<int>(static_.rows()); }
    bool time_dependent() const { return drive_.has_value(); }
    Mat value_at(double t) const;
    Vec apply(double t, const Vec& v) const;
    const Mat& static_part() const { return static_; }
    const std::optional<HamiltonianSplit>& split() const { return split_; }
    // upper bound on the operator norm over all t
    double norm_bound() const;

    struct Drive {
        Mat h;
        double omega = 0.0;
        double phase = 0.0;
    };
    const std::optional<Drive>& drive() const { return drive_; }

private:
    Mat static_;
    std::optional<Drive> drive_;
    std::optional<HamiltonianSplit> split_;
};

void require_hermitian(const Mat& h, const char* what, double tol = 1e-12);

struct StatePath {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<Vec> amplitudes() const;
};

struct PhasePath {
    std::vector<double> times;
    std::vector<cplx> zeta;
};

// hbar = 1. Constant H propagates through its eigendecomposition; driven H
// uses the adaptive Dormand-Prince pair with local error tol.
StatePath schrodinger_evolve(const StateVector& gamma0, const HamiltonianSpec& h,
                             const std::vector<double>& times, double tol = 1e-10);

// |<G, dG/dt> + i <G, H G>| at interior samples (three-point derivative).
std::vector<double> horizontality_residual(const std::vector<double>& times,
                                           const std::vector<Vec>& path, const HamiltonianSpec& h);

// zeta(t) = exp(-i int_0^t <W, H'' W> ds) for a path W horizontal w.r.t. A^{H'}.
PhasePath horizontalizing_phase(const std::vector<double>& times, const std::vector<Vec>& omega,
                                const HamiltonianSpec& h_prime, const HamiltonianSpec& h_extra,
                                double residual_tol = 1e-6);

// Phase making an arbitrary path A^0-horizontal: zeta(t) v(t) has
// <w, dw/dt> = 0. Discrete parallel transport with one Richardson step when
// the grid is uniform.
PhasePath canonical_lift_phase(const std::vector<double>& times, const std::vector<Vec>& path);

// Accumulated transport angle Theta_i with exp(-i Theta_i) v_i horizontal.
std::vector<double> transport_angle(const std::vector<double>& times, const std::vector<Vec>& v);

std::vector<Vec> apply_phase(const std::vector<Vec>& path, const PhasePath& zeta);

} // namespace iqm
