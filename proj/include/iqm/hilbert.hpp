#pragma once

#include <utility>
#include <vector>

#include "iqm/types.hpp"

namespace iqm {

constexpr double kNormTol = 1e-12;
constexpr double kRankCutoff = 1e-12;
constexpr double kDegenerateRadii = 1e-8;

struct BipartiteSpace {
    int n1 = 1;
    int n2 = 1;

    BipartiteSpace() = default;
    BipartiteSpace(int a, int b);
    int dim() const { return n1 * n2; }
    bool operator==(const BipartiteSpace&) const = default;
};

// Amplitudes are stored factor-1-major: index i*n2 + j for e_i (x) e_j.
class StateVector {
public:
    StateVector(BipartiteSpace space, Vec amplitudes, double norm_tol = kNormTol);

    static StateVector normalized(BipartiteSpace space, Vec amplitudes);

    const BipartiteSpace& space() const { return space_; }
    const Vec& amplitudes() const { return amp_; }
    int dim() const { return space_.dim(); }

    // M(i, j) = <e_i (x) e_j, Gamma>, the n1 x n2 matricization.
    Mat matricize() const;

private:
    BipartiteSpace space_;
    Vec amp_;
};

// Gamma = sum_k q_k phi_k (x) psi_k. Columns of phi/psi are the frame vectors.
struct PolarFrame {
    Vec q;
    Mat phi;
    Mat psi;
    std::vector<std::pair<int, int>> degenerate_pairs;

    int size() const { return static_cast<int>(q.size()); }
    RVec radii() const { return q.cwiseAbs(); }
    bool degenerate() const { return !degenerate_pairs.empty(); }
};

// Throws ValidationError when the frame is not bi-orthonormal or not normalized.
void validate_frame(const PolarFrame& frame, double tol = 1e-10);

std::vector<std::pair<int, int>> find_degenerate_pairs(const RVec& radii,
                                                       double tol = kDegenerateRadii);

class DensityOperator {
public:
    // unit_trace = false admits the sub-normalized output of an incomplete
    // Luders measurement; Hermiticity and positivity are always checked.
    explicit DensityOperator(Mat m, bool unit_trace = true, double tol = 1e-12);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& matrix() const { return m_; }
    double trace() const { return m_.trace().real(); }
    RVec eigenvalues() const;

private:
    Mat m_;
};

PolarFrame polar_decompose(const StateVector& gamma);

Vec reconstruct_amplitudes(const PolarFrame& frame);
StateVector reconstruct(const PolarFrame& frame, const BipartiteSpace& space,
                        double norm_tol = 1e-10);

DensityOperator reduced_trace(const StateVector& gamma, int side);

// (-i/2) Tred_1(<X,.>X), (-i/2) Tred_2(<X,.>X)
std::pair<Mat, Mat> moment_map(const StateVector& gamma);

DensityOperator luders_update(const DensityOperator& rho0, const std::vector<Mat>& projectors,
                              double tol = 1e-10);

// factor indices in left_set are 0-based; the left factors keep their
// relative order, as do the right ones.
StateVector rebipartition(const StateVector& gamma, const std::vector<int>& factor_dims,
                          const std::vector<int>& left_set);

// Partial traces of operators on H1 (x) H2; partial_trace_1 keeps factor 1.
Mat partial_trace_1(const Mat& a, int n1, int n2);
Mat partial_trace_2(const Mat& a, int n1, int n2);

Mat kron(const Mat& a, const Mat& b);

Vec product_vector(const Vec& phi, const Vec& psi);

} // namespace iqm
