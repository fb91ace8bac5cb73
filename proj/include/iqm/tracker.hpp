#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iqm/flow.hpp"
#include "iqm/toroid.hpp"

namespace iqm {

struct JumpEvent {
    double t = 0.0;
    int from_k = 0;
    int to_k = 0;
    std::string boundary_kind;  // "slab", "simplex" or "degeneracy"
};

struct TrackOptions {
    double boundary_tol = kBoundaryTol;
    double distinct_tol = kDegenerateRadii;
    int bridge_samples = 10;
    double bridge_time = 1e-3;
    double time_tol = 1e-9;  // relative to the sample step
    int probe_points = 16;   // sub-samples per step before bisection
};

struct LabelTimeline {
    std::vector<double> times;
    std::vector<int> labels;  // -1 on degenerate samples
    std::vector<bool> on_boundary;
    std::vector<bool> degenerate;
    std::vector<JumpEvent> jumps;
    // branch relabelling accumulated across bridged degeneracies: the frame
    // index at sample i is permutation[i][continued label]
    std::vector<std::vector<int>> permutation;
    std::vector<std::pair<double, double>> bridged;
    bool permanent_degeneracy = false;
    double permanent_from = 0.0;
};

// k(t) from the A^H amplitudes of each frame: locate on T(|q(t)|) at arc
// coordinates r_k arg q_k. Label changes are refined by bisection on the
// linear interpolation of (r, unwrapped arg q) between samples.
LabelTimeline track_labels(const std::vector<double>& times, const std::vector<PolarFrame>& frames,
                           const TrackOptions& opt = {});
LabelTimeline track_labels(const PolarTrajectory& traj, const TrackOptions& opt = {});

struct Continuation {
    std::vector<int> permutation;  // before-branch j continues as after-branch permutation[j]
    bool ambiguous = false;
};

// Maximal total overlap |<phi_j-, phi_m+>| + |<psi_j-, psi_m+>| assignment.
// Within 1e-3 of a competing assignment the identity is returned and flagged.
Continuation continue_through_degeneracy(const PolarFrame& before, const PolarFrame& after,
                                         double ambiguity_tol = 1e-3);

struct ConditioningStep {
    std::vector<int> system;     // factors of the conditioned composite
    std::vector<int> subsystem;  // factors kept
    int k = 0;
    bool on_boundary = false;
};

struct ConditionalState {
    std::vector<int> subsystem;  // original factor indices
    Vec ray;
    int k = 0;
    bool on_boundary = false;
    std::vector<ConditioningStep> provenance;
};

// side 1 returns phi_k, side 2 returns psi_k; k is shared by both sides.
ConditionalState conditional_state(const PolarFrame& frame, const ToroidPoint& point, int side);
ConditionalState conditional_state(const StateVector& gamma, const ToroidPoint& point, int side);
// point with arc coordinates r_k theta_k on the toroid of gamma's radii
ToroidPoint point_from_phases(const PolarFrame& frame, const RVec& theta);

// Each chain entry is the subset of original factors to condition on; it
// must lie inside the previous stage's subsystem. A stage without a point
// uses phase 0 (the base point of its toroid). From the second stage on,
// the incoming ray must be a product across the new cut within 1e-8.
ConditionalState iterate_conditional(const Vec& gamma, const std::vector<int>& factor_dims,
                                     const std::vector<std::vector<int>>& chain,
                                     const std::vector<std::optional<ToroidPoint>>& points = {},
                                     double product_tol = 1e-8);

} // namespace iqm
