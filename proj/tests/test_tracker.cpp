#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "iqm/flow.hpp"
#include "iqm/hyperfine.hpp"
#include "iqm/tracker.hpp"
#include "oracles.hpp"

using namespace iqm;

namespace {

constexpr double kPi = std::numbers::pi;

// frame with fixed spinors (standard basis) and amplitudes r_k exp(i theta_k)
PolarFrame synthetic_frame(const RVec& r, const RVec& theta) {
    const int m = static_cast<int>(r.size());
    PolarFrame f;
    f.q.resize(m);
    for (int k = 0; k < m; ++k) f.q(k) = std::polar(r(k), theta(k));
    f.phi = Mat::Identity(m, m);
    f.psi = Mat::Identity(m, m);
    return f;
}

Vec unit(Vec v) { return v / v.norm(); }

} // namespace

TEST_CASE("a straight path through one face gives one event at the known time") {
    // r = (0.8, 0.6), theta_0 = 0.4 pi fixed (a_0 = 0.2), a_1 = t: the slab face
    // tau = 0.64 * 0.2 + 0.36 a_1 = 0.36 is crossed at a_1 = 0.232 / 0.36
    const RVec r = (RVec(2) << 0.8, 0.6).finished();
    const double t_slab = 0.232 / 0.36;
    const auto ts = linspace(0.3, 0.9, 7);
    std::vector<PolarFrame> frames;
    for (double t : ts) frames.push_back(synthetic_frame(r, (RVec(2) << 0.4 * kPi, 2.0 * kPi * t).finished()));
    const LabelTimeline tl = track_labels(ts, frames);
    REQUIRE(tl.jumps.size() == 1);
    CHECK(std::abs(tl.jumps[0].t - t_slab) < 1e-9 * (ts[1] - ts[0]) + 1e-12);
    CHECK(tl.jumps[0].from_k == 1);
    CHECK(tl.jumps[0].to_k == 0);
    CHECK(tl.jumps[0].boundary_kind == "slab");
    CHECK(tl.labels.front() == 1);
    CHECK(tl.labels.back() == 0);

    // starting earlier also crosses the simplex face a_1 = a_0 at t = 0.2
    const auto ts2 = linspace(0.05, 0.9, 5);
    frames.clear();
    for (double t : ts2) frames.push_back(synthetic_frame(r, (RVec(2) << 0.4 * kPi, 2.0 * kPi * t).finished()));
    const LabelTimeline t2 = track_labels(ts2, frames);
    REQUIRE(t2.jumps.size() == 2);
    CHECK(std::abs(t2.jumps[0].t - 0.2) < 1e-9);
    CHECK(t2.jumps[0].boundary_kind == "simplex");
    CHECK(std::abs(t2.jumps[1].t - t_slab) < 1e-9);
    CHECK(t2.jumps[0].t < t2.jumps[1].t);
    for (const JumpEvent& j : t2.jumps) CHECK(j.from_k != j.to_k);
}

TEST_CASE("tracker input validation") {
    const RVec r = (RVec(2) << 0.8, 0.6).finished();
    const PolarFrame f = synthetic_frame(r, RVec::Zero(2));
    CHECK_THROWS_AS(track_labels({0.0, 1.0}, {f}), DimensionError);
    CHECK_THROWS_AS(track_labels(std::vector<double>{}, std::vector<PolarFrame>{}), ValidationError);
    CHECK_THROWS_AS(track_labels({1.0, 0.0}, {f, f}), ValidationError);
}

TEST_CASE("no interaction, no jumps") {
    Rng rng(51);
    const auto ts = linspace(0.0, 10.0, 201);
    for (int rep = 0; rep < 3; ++rep) {
        StateVector g = oracle::random_state(3, 3, rng);
        while (radii_gap(polar_decompose(g)) < 0.05) g = oracle::random_state(3, 3, rng);
        HamiltonianSplit sp;
        sp.n1 = sp.n2 = 3;
        sp.h0 = Mat::Zero(9, 9);
        sp.h1 = random_hermitian(3, rng);
        sp.h2 = random_hermitian(3, rng);
        sp.h2 -= (sp.h2.trace() / 3.0) * Mat::Identity(3, 3);
        // random hidden phases; q^H then stays put
        PolarFrame f = polar_decompose(g);
        for (int k = 0; k < 3; ++k) {
            const cplx z = std::exp(cplx(0.0, 2.0 * kPi * counter_uniform(rep, k)));
            f.q(k) *= z;
            f.phi.col(k) *= std::conj(z);
        }
        const PolarTrajectory tr = evolve_polar(g, f, HamiltonianSpec::from_split(sp), ts);
        for (const PolarFrame& fr : tr.frames) CHECK((fr.q - f.q).norm() < 1e-8);
        const LabelTimeline tl = track_labels(tr);
        CHECK(tl.jumps.empty());
        CHECK_FALSE(tl.permanent_degeneracy);
        for (size_t i = 1; i < ts.size(); ++i) CHECK(tl.labels[i] == tl.labels[0]);
    }
}

TEST_CASE("continuation through a crossing") {
    Rng rng(52);
    const PolarFrame a = polar_decompose(oracle::random_state(2, 2, rng));
    const Continuation id = continue_through_degeneracy(a, a);
    CHECK(id.permutation == std::vector<int>{0, 1});
    CHECK_FALSE(id.ambiguous);

    // exact swap of the branches
    PolarFrame b = a;
    b.phi.col(0) = a.phi.col(1);
    b.phi.col(1) = a.phi.col(0);
    b.psi.col(0) = a.psi.col(1);
    b.psi.col(1) = a.psi.col(0);
    b.q << a.q(1), a.q(0);
    const Continuation sw = continue_through_degeneracy(a, b);
    CHECK(sw.permutation == std::vector<int>{1, 0});
    CHECK_FALSE(sw.ambiguous);

    // equal overlaps with both candidates: flagged, identity kept
    PolarFrame c = a;
    c.phi.col(0) = (a.phi.col(0) + a.phi.col(1)) / std::sqrt(2.0);
    c.phi.col(1) = (a.phi.col(0) - a.phi.col(1)) / std::sqrt(2.0);
    c.psi.col(0) = (a.psi.col(0) + a.psi.col(1)) / std::sqrt(2.0);
    c.psi.col(1) = (a.psi.col(0) - a.psi.col(1)) / std::sqrt(2.0);
    const Continuation am = continue_through_degeneracy(a, c);
    CHECK(am.ambiguous);
    CHECK(am.permutation == std::vector<int>{0, 1});

    // a 3-cycle on a larger frame
    const PolarFrame d = polar_decompose(oracle::random_state(4, 4, rng));
    PolarFrame e = d;
    const std::vector<int> cyc{2, 0, 1, 3};
    for (int j = 0; j < 4; ++j) {
        e.phi.col(cyc[j]) = d.phi.col(j) * std::exp(cplx(0.0, 0.3 * j));
        e.psi.col(cyc[j]) = d.psi.col(j);
    }
    CHECK(continue_through_degeneracy(d, e).permutation == cyc);
    CHECK_THROWS_AS(continue_through_degeneracy(a, d), DimensionError);
}

TEST_CASE("bridged crossing keeps the branch label") {
    // radii (0.8, 0.6) -> (0.6, 0.8) through equality, frames relabelled by the SVD order
    const auto ts = linspace(0.0, 1.0, 101);
    std::vector<PolarFrame> frames;
    for (double t : ts) {
        const double x = 0.8 - 0.2 * t * 2.0;  // passes 0.6 at t = 0.5 ... below: r_0 = x, r_1 = sqrt(1 - x^2)
        RVec r(2);
        r << x, std::sqrt(1.0 - x * x);
        PolarFrame f = synthetic_frame(r, (RVec(2) << 0.1, 0.1).finished());
        if (r(0) < r(1)) {  // decomposition order: larger radius first
            std::swap(f.q(0), f.q(1));
            f.phi.col(0).swap(f.phi.col(1));
            f.psi.col(0).swap(f.psi.col(1));
        }
        frames.push_back(f);
    }
    TrackOptions o;
    o.distinct_tol = 0.02;
    const LabelTimeline tl = track_labels(ts, frames, o);
    CHECK_FALSE(tl.permanent_degeneracy);
    REQUIRE(tl.bridged.size() == 1);
    CHECK(tl.permutation.back() == std::vector<int>{1, 0});
    CHECK(tl.permutation.front() == std::vector<int>{0, 1});
    // the branch that started as index 0 is index 1 at the end
    CHECK(tl.labels.back() != -1);
}

TEST_CASE("the phase origin is one boundary point however it is approached") {
    const RVec r = (RVec(3) << 0.8, 0.5, std::sqrt(0.11)).finished();
    const auto ts = linspace(0.0, 1.0, 21);
    std::vector<PolarFrame> frames;
    for (size_t i = 0; i < ts.size(); ++i) {
        RVec th(3);
        for (int k = 0; k < 3; ++k) th(k) = 1e-16 * (counter_uniform(9, 3 * i + k) - 0.5);
        frames.push_back(synthetic_frame(r, th));
    }
    const LabelTimeline tl = track_labels(ts, frames);
    CHECK(tl.jumps.empty());
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(tl.labels[i] == 0);
        CHECK(tl.on_boundary[i]);
    }
}

TEST_CASE("permanent degeneracy is reported") {
    const auto ts = linspace(0.0, 1.0, 11);
    const RVec r = RVec::Constant(2, std::sqrt(0.5));
    std::vector<PolarFrame> frames(ts.size(), synthetic_frame(r, RVec::Zero(2)));
    const LabelTimeline tl = track_labels(ts, frames);
    CHECK(tl.permanent_degeneracy);
    CHECK(tl.jumps.empty());
}

TEST_CASE("hyperfine with k = Cl keeps its radii") {
    const double qp = 0.94, qm = std::sqrt(1.0 - qp * qp);
    const HyperfineParams p(1.0, std::acos((qp - qm) / (qp + qm)) + 1e-12, qp);
    const auto ts = linspace(0.0, 10.0 * kPi / p.omega(), 401);
    double drift = 0.0;
    const RVec r0 = polar_decompose(hyperfine_gamma(p, 0.0)).radii();
    for (double t : ts) drift = std::max(drift, (polar_decompose(hyperfine_gamma(p, t)).radii() - r0).cwiseAbs().maxCoeff());
    CHECK(drift < 1e-8);
    const StateVector g0 = hyperfine_gamma(p, 0.0);
    const PolarTrajectory tr =
        evolve_polar(g0, polar_decompose(g0), HamiltonianSpec::constant(hyperfine_hamiltonian(p.mu)), ts);
    const LabelTimeline tl = track_labels(tr);
    CHECK(tl.bridged.empty());
    CHECK_FALSE(tl.permanent_degeneracy);
    for (const JumpEvent& j : tl.jumps) CHECK(j.boundary_kind != "degeneracy");
}

TEST_CASE("conditional states") {
    // product state: the unique factor
    const Vec a = unit((Vec(2) << cplx(1, 1), 2.0).finished());
    const Vec b = unit((Vec(3) << 1.0, cplx(0, -1), 0.5).finished());
    const StateVector prod(BipartiteSpace(2, 3), product_vector(a, b));
    ToroidPoint pt;
    pt.arc = RVec::Zero(1);
    const ConditionalState c1 = conditional_state(prod, pt, 1), c2 = conditional_state(prod, pt, 2);
    CHECK(c1.k == 0);
    CHECK(std::abs(std::abs(c1.ray.dot(a)) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(c2.ray.dot(b)) - 1.0) < 1e-12);
    CHECK_THROWS_AS(conditional_state(prod, pt, 3), ValidationError);

    // both sides share the label; the reciprocal gauge does not move it
    Rng rng(53);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const StateVector g = oracle::random_state(3, 4, rng);
        PolarFrame f = polar_decompose(g);
        if (radii_gap(f) < 1e-6) continue;
        RVec th(3);
        for (int k = 0; k < 3; ++k) th(k) = u(rng);
        const ToroidPoint p = point_from_phases(f, th);
        const ConditionalState s1 = conditional_state(f, p, 1), s2 = conditional_state(f, p, 2);
        CHECK(s1.k == s2.k);
        CHECK(std::abs(s1.ray.norm() - 1.0) < 1e-12);
        for (int k = 0; k < 3; ++k) {
            const cplx z = std::exp(cplx(0.0, u(rng)));
            f.phi.col(k) *= z;
            f.psi.col(k) *= std::conj(z);
        }
        CHECK(conditional_state(f, p, 1).k == s1.k);
        ++checked;
    }
    CHECK(checked > 990);

    // the closed-form hyperfine frame: label '+' gives phi_+
    const HyperfineParams hp(1.0, 3.0 * kPi / 7.0, 0.94);
    for (double wt : {4.0 * kPi, 6.0 * kPi, 8.0 * kPi}) {
        const double t = wt / hp.omega();
        const PolarFrame f = closed_form_frame(hp, t);
        const RightToroid tor = RightToroid::from_amplitudes(f.q);
        const ConditionalState s = conditional_state(f, point_from_amplitudes(tor, f.q), 1);
        const SignResult sign = label_sign(hp, t);
        CHECK(s.k == (sign.sign > 0 ? 0 : 1));
        CHECK(std::abs(std::abs(s.ray.dot(f.phi.col(s.k))) - 1.0) < 1e-14);
    }
}

TEST_CASE("iterated conditioning: chain of length one") {
    Rng rng(54);
    const StateVector g = oracle::random_state(2, 3, rng);
    const PolarFrame f = polar_decompose(g);
    RVec th(2);
    th << 0.7, -1.9;
    const ToroidPoint p = point_from_phases(f, th);
    const ConditionalState a = iterate_conditional(g.amplitudes(), {2, 3}, {{0}}, {p});
    const ConditionalState b = conditional_state(f, p, 1);
    CHECK(a.k == b.k);
    CHECK(std::abs(std::abs(a.ray.dot(b.ray)) - 1.0) < 1e-12);
    CHECK(a.subsystem == std::vector<int>{0});
    REQUIRE(a.provenance.size() == 1);
    CHECK(a.provenance[0].system == std::vector<int>{0, 1});

    CHECK_THROWS_AS(iterate_conditional(g.amplitudes(), {2, 3}, {}), ValidationError);
    CHECK_THROWS_AS(iterate_conditional(g.amplitudes(), {2, 2}, {{0}}), DimensionError);
    CHECK_THROWS_AS(iterate_conditional(g.amplitudes(), {2, 3}, {{0, 1}}), ValidationError);
}

TEST_CASE("EPR and Fano: every convex decomposition term is a two-step iterate") {
    // Gamma = sum_i y_i alpha_i (x) beta_i (x) gamma_i on C^2 (x) C^3 (x) C^3 with
    // non-orthogonal alpha_i and orthonormal beta_i, gamma_i
    Rng rng(55);
    const Mat bu = random_unitary(3, rng), gu = random_unitary(3, rng);
    std::vector<Vec> alpha;
    for (int i = 0; i < 3; ++i) alpha.push_back(random_unit_vector(2, rng));
    const std::vector<double> y = {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
    Vec gamma = Vec::Zero(18);
    for (int i = 0; i < 3; ++i)
        gamma += y[i] * product_vector(product_vector(alpha[i], bu.col(i)), gu.col(i));

    // stage-1 frame on (S1 + S2 | S3): the radii are the y_i, so frame index i is term i
    const StateVector cut = rebipartition(StateVector(BipartiteSpace(1, 18), gamma), {2, 3, 3}, {0, 1});
    const PolarFrame f1 = polar_decompose(cut);
    REQUIRE(f1.size() == 3);
    const RightToroid t1 = RightToroid::from_amplitudes(f1.q);
    std::vector<bool> found(3, false);
    for (int k = 0; k < 3; ++k) {
        // a point on the generating circle C_k selects part k
        RVec arc = RVec::Zero(3);
        arc(k) = 0.05 * t1.side(k) * t1.weights()[k];
        const ConditionalState s = iterate_conditional(gamma, {2, 3, 3}, {{0, 1}, {0}},
                                                       {make_point(t1, arc), std::nullopt});
        CHECK(s.subsystem == std::vector<int>{0});
        REQUIRE(s.provenance.size() == 2);
        CHECK(s.provenance[0].k == k);
        CHECK(s.provenance[1].subsystem == std::vector<int>{0});
        for (int i = 0; i < 3; ++i)
            if (std::abs(std::abs(s.ray.dot(alpha[i])) - 1.0) < 1e-10) found[i] = true;
    }
    CHECK(found[0]);
    CHECK(found[1]);
    CHECK(found[2]);

    // the photon's density is the non-spectral mixture of the alpha_i
    Mat rho = Mat::Zero(2, 2);
    for (int i = 0; i < 3; ++i) rho += y[i] * y[i] * oracle::projector(alpha[i]);
    const Mat red = reduced_trace(rebipartition(StateVector(BipartiteSpace(1, 18), gamma), {2, 3, 3}, {0}), 1).matrix();
    CHECK((red - rho).norm() < 1e-12);

    // an entangled stage-1 ray is refused at the second cut
    Vec ent = Vec::Zero(18);
    for (int i = 0; i < 3; ++i) {
        const Vec chi = unit(product_vector(alpha[i], bu.col(i)) + 0.5 * product_vector(alpha[(i + 1) % 3], bu.col((i + 1) % 3)));
        ent += y[i] * product_vector(chi, gu.col(i));
    }
    ent /= ent.norm();
    try {
        iterate_conditional(ent, {2, 3, 3}, {{0, 1}, {0}});
        FAIL("expected a non-product error");
    } catch (const Error& e) {
        CHECK(e.kind() == "non_product");
    }
    CHECK_THROWS_AS(iterate_conditional(gamma, {2, 3, 3}, {{0, 1}, {2}}), ValidationError);
}
