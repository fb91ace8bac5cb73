#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iqm/types.hpp"

namespace iqm {

constexpr double kBoundaryTol = 1e-12;

// T(r) = prod S^1(r_k). Labels and axes are 0-based. Radii must be positive
// and pairwise distinct; their order is free (state-derived toroids keep the
// frame order so that labels are frame indices).
class RightToroid {
public:
    explicit RightToroid(std::vector<double> radii, double distinct_tol = 1e-8);

    // radii |q_k|; throws DegenerateError for (near-)equal radii
    static RightToroid from_amplitudes(const Vec& q);

    int n() const { return static_cast<int>(r_.size()); }
    double radius(int k) const { return r_[k]; }
    double side(int k) const;  // s_k = 2 pi r_k
    const std::vector<double>& radii() const { return r_; }
    // w_k = r_k^2 / sum r^2, the Pythagorean weights (= r_k^2 for states)
    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<double> r_;
    std::vector<double> w_;
};

// Arc coordinates S_k reduced into [0, s_k).
struct ToroidPoint {
    RVec arc;
};

ToroidPoint make_point(const RightToroid& t, const RVec& arc);
// S_k = r_k theta_k with q_k = r_k exp(i theta_k)
ToroidPoint point_from_amplitudes(const RightToroid& t, const Vec& q);

struct PartitionLabel {
    int k = 0;
    bool on_boundary = false;
};

struct LocateDetail {
    PartitionLabel label;
    std::vector<int> sigma;  // axes by decreasing a_nu = S_nu / s_nu
    RVec a;
    double tau = 0.0;
    double slab_gap = 0.0;   // distance of tau to the nearest interior threshold
    double sort_gap = 0.0;   // smallest sorted a_nu gap whose swap would move the label
};

LocateDetail locate_detail(const ToroidPoint& p, const RightToroid& t, double tol = kBoundaryTol);
PartitionLabel locate(const ToroidPoint& p, const RightToroid& t, double tol = kBoundaryTol);

// Batch location over the columns of `arc` (n x N). The OpenMP kernel and its
// serial reference return identical results.
std::vector<PartitionLabel> locate_batch(const RightToroid& t, const RMat& arc);
std::vector<PartitionLabel> locate_batch_serial(const RightToroid& t, const RMat& arc);

// ---- diagonals -------------------------------------------------------------

// A piece of the diagonal walk base + c s, c in [lo, hi) subset of [0, 1).
struct ArcPiece {
    double lo = 0.0;
    double hi = 0.0;
    int k = 0;
};

struct DiagonalArcs {
    std::vector<ArcPiece> pieces;
    RVec lengths;  // 2 pi * parameter measure per label
};

// Exact: between coordinate wraps tau = const + c, so every threshold
// crossing is solved in closed form.
DiagonalArcs diagonal_arcs(const RightToroid& t, const ToroidPoint& base);

// Sampled: locate at N midpoints, label changes refined by bisection.
RVec diagonal_arcs_sampled(const RightToroid& t, const ToroidPoint& base, int samples);
RVec diagonal_arcs_sampled_serial(const RightToroid& t, const ToroidPoint& base, int samples);

// ---- Monte Carlo -----------------------------------------------------------

struct MeasureEstimate {
    RVec fraction;   // per label
    RVec sigma;      // binomial standard error per label
    long samples = 0;
    long boundary_hits = 0;
};

// Uniform points on the toroid (counter-based RNG, seed-deterministic).
MeasureEstimate part_measures(const RightToroid& t, long samples, std::uint64_t seed);
MeasureEstimate part_measures_serial(const RightToroid& t, long samples, std::uint64_t seed);
double part_measure(const RightToroid& t, int k, long samples, std::uint64_t seed);

// Uniform random global phase alpha applied to the amplitudes of `base`:
// S_k -> S_k + r_k alpha. Label frequencies estimate r_k^2.
MeasureEstimate global_phase_frequencies(const RightToroid& t, const ToroidPoint& base, long samples,
                                         std::uint64_t seed);
MeasureEstimate global_phase_frequencies_serial(const RightToroid& t, const ToroidPoint& base,
                                                long samples, std::uint64_t seed);

// ---- cell geometry -----------------------------------------------------------

struct CellGeometry {
    int k = 0;
    std::vector<int> sigma;
    RVec offset;                     // v_{k sigma}
    std::vector<RVec> slab;          // vertices of Sl(k, sigma) (in the box)
    std::vector<RVec> slab_shifted;  // Sl(k, sigma) - v_{k sigma}
    std::vector<RVec> parallelotope; // 2^n vertices of A_k
};

// f_j = s_j e_j, s = sum f_j, g_j = w_j s - f_j
RVec diagonal_vector(const RightToroid& t);
std::vector<RVec> g_vectors(const RightToroid& t);
// columns: g_j for j != k (in order), then w_k s
RMat parallelotope_generators(const RightToroid& t, int k);

CellGeometry cell_geometry(const RightToroid& t, int k, const std::vector<int>& sigma);

// true when x lies in A_k + lattice translate (explicit parallelotope test)
bool in_lifted_part(const RightToroid& t, int k, const RVec& x, double tol = 1e-12);

// ---- naturality / convexity -------------------------------------------------

struct NaturalityReport {
    int axis = 0;
    long samples = 0;
    long violations = 0;
    long boundary_skipped = 0;
    // limit form: r_axis -> eps, random full points vs the (n-1)-toroid
    double limit_radius = 0.0;
    long limit_violations = 0;
    long limit_boundary_skipped = 0;
    bool ok() const { return violations == 0 && limit_violations == 0; }
};

NaturalityReport check_naturality(const RightToroid& t, int axis, long samples, std::uint64_t seed,
                                  double limit_radius = 1e-7);

struct ConvexityReport {
    int k = 0;
    bool facets_ok = false;   // every vertex on one side of every facet plane
    bool chords_ok = false;   // random chords between interior points stay inside
    long label_mismatches = 0; // points of A_k whose quotient label differs from k
    long samples = 0;
    bool ok() const { return facets_ok && chords_ok && label_mismatches == 0; }
};

ConvexityReport check_convexity(const RightToroid& t, int k, long samples, std::uint64_t seed);

// ---- convex hulls (n <= 3) -----------------------------------------------------

struct Hull {
    std::vector<RVec> vertices;
    std::vector<std::vector<int>> faces;  // ccw seen from outside (3D) / single polygon (2D)
    double volume = 0.0;
};

Hull convex_hull(const std::vector<RVec>& points, double tol = 1e-10);

// ---- export --------------------------------------------------------------------

std::string tiling_svg(const RightToroid& t);
std::string tiling_obj(const RightToroid& t);

} // namespace iqm
