#pragma once

#include <utility>
#include <vector>

#include "iqm/connection.hpp"

namespace iqm {

constexpr double kFlowDegeneracyFloor = 1e-6;

// H_{jk,mn} = <phi_j (x) psi_k, H phi_m (x) psi_n>, stored with row j*m+k
// and column m*m+n over the frame indices.
struct CouplingMatrix {
    int m = 0;
    Mat entries;

    cplx operator()(int j, int k, int a, int b) const { return entries(j * m + k, a * m + b); }
};

CouplingMatrix coupling_elements(const Mat& h, const PolarFrame& frame);

// beta_ab  = -i (conj(q_b) sum_k q_k H_{ab,kk} - q_a sum_k conj(q_k) H_{kk,ba})
// beta'_ab = -i (conj(q_b) sum_k q_k H_{ba,kk} - q_a sum_k conj(q_k) H_{kk,ab})
// These are the matrices of d rho_1/dt and d rho_2/dt in the frame bases.
std::pair<Mat, Mat> beta_matrices(const CouplingMatrix& c, const Vec& q);
std::pair<Mat, Mat> beta_matrices(const PolarFrame& frame, const Mat& h, const Vec& q);

struct FrameDerivative {
    Vec q_dot;
    Mat phi_dot;
    Mat psi_dot;
};

// Right-hand side of the autonomous polar flow for an A0-horizontal frame.
// When n1 != n2 the larger factor carries zero-radius complement vectors;
// their contribution is summed in closed form through the complement
// projector. Throws DegenerateError below the degeneracy floor.
FrameDerivative flow_rhs(const PolarFrame& frame, const Mat& h,
                         double floor = kFlowDegeneracyFloor, double t = 0.0);

// Smallest | r_j^2 - r_k^2 | over frame pairs, including the zero radii of
// the complement when n1 != n2.
double radii_gap(const PolarFrame& frame);

enum class FlowMode { ode, svd_transport };

const char* to_string(FlowMode mode);
FlowMode flow_mode_from_string(const std::string& s);

struct EvolveOptions {
    FlowMode mode = FlowMode::svd_transport;
    double tol = 1e-10;
    double degeneracy_floor = kFlowDegeneracyFloor;
    int substeps = 0;  // svd_transport fine steps per output interval; 0 = from tol
};

struct PolarTrajectory {
    FlowMode mode = FlowMode::svd_transport;
    BipartiteSpace space;
    std::vector<double> times;
    std::vector<PolarFrame> frames;   // A^H amplitudes q^H; the A^H phase rides on phi
    std::vector<PolarFrame> frames0;  // A0-horizontal frames with amplitudes q^0
    std::vector<RVec> energy_phase;   // int_0^t H_{kk,kk} ds per k
    std::vector<StateVector> gammas;
    double max_reconstruct_residual = 0.0;
};

// frame0 must decompose gamma0; its phases are the caller's initial gauge.
PolarTrajectory evolve_polar(const StateVector& gamma0, const PolarFrame& frame0,
                             const HamiltonianSpec& h, const std::vector<double>& times,
                             const EvolveOptions& opt = {});

struct InteractionPhases {
    std::vector<double> times;
    std::vector<RVec> upsilon;  // Upsilon_k = <G, H0 G> - <G_k, H0 G_k>
    std::vector<RVec> r_dot;    // sum_k Im(H0'_{jj,kk}) r_k in the real-q gauge
};

InteractionPhases interaction_phases(const PolarTrajectory& traj, const HamiltonianSpec& h);

// H1 = (1/n2) Tred_1 H (keeps the scalar part), H2 = traceless part of
// (1/n1) Tred_2 H, H0 = the rest.
HamiltonianSplit split_hamiltonian(const Mat& h, int n1, int n2);

// Eigenvectors of a Hermitian rho (descending eigenvalues) and their
// A0-horizontal derivatives sum_{k != j} <phi_k, rho' phi_j> / (l_j - l_k) phi_k.
struct EigenDerivative {
    RVec values;
    Mat vectors;
    Mat derivatives;
};
EigenDerivative eigenvector_derivatives(const Mat& rho, const Mat& rho_dot);

} // namespace iqm
