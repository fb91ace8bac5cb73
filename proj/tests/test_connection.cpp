#include "doctest.h"

#include <cmath>

#include "iqm/connection.hpp"
#include "iqm/flow.hpp"
#include "iqm/hyperfine.hpp"
#include "oracles.hpp"

using namespace iqm;

namespace {

Mat expm_hermitian(const Mat& h, double t) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec ph(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j) ph(j) = std::exp(cplx(0.0, -es.eigenvalues()(j) * t));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

TEST_CASE("Hamiltonian specs") {
    Rng rng(2);
    const Mat h = random_hermitian(6, rng);
    const HamiltonianSplit sp = split_hamiltonian(h, 2, 3);
    const HamiltonianSpec a = HamiltonianSpec::constant(h, sp);
    CHECK((a.value_at(3.0) - h).norm() < 1e-12);
    CHECK((sp.assemble() - h).norm() < 1e-10);
    HamiltonianSplit bad = sp;
    bad.h1(0, 0) += 0.1;
    CHECK_THROWS_AS(HamiltonianSpec::constant(h, bad), ValidationError);
    Mat nh = h;
    nh(0, 1) += 0.5;
    CHECK_THROWS_AS(HamiltonianSpec::constant(nh), ValidationError);

    const Mat d = random_hermitian(6, rng);
    const HamiltonianSpec s = HamiltonianSpec::sinusoidal(h, d, 2.0, 0.3);
    CHECK(s.time_dependent());
    for (double t : {0.0, 0.4, 1.7}) {
        const Mat v = s.value_at(t);
        CHECK((v - v.adjoint()).norm() < 1e-12);
        CHECK((v - h - std::sin(2.0 * t + 0.3) * d).norm() < 1e-12);
        CHECK(v.norm() <= s.norm_bound() * std::sqrt(6.0) + 1e-12);
    }
}

TEST_CASE("eigenstate acquires exp(-iEt)") {
    Rng rng(4);
    const Mat h = random_hermitian(4, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const StateVector g(BipartiteSpace(2, 2), es.eigenvectors().col(1));
    const double e = es.eigenvalues()(1);
    const auto ts = linspace(0.0, 3.0, 7);
    const StatePath p = schrodinger_evolve(g, HamiltonianSpec::constant(h), ts);
    for (size_t i = 0; i < ts.size(); ++i)
        CHECK((p.states[i].amplitudes() - std::exp(cplx(0.0, -e * ts[i])) * g.amplitudes()).norm() < 1e-10);

    const StatePath z = schrodinger_evolve(g, HamiltonianSpec::constant(Mat::Zero(4, 4)), ts);
    for (const auto& s : z.states) CHECK((s.amplitudes() - g.amplitudes()).norm() == 0.0);
}

TEST_CASE("hyperfine Schrodinger path matches the closed form") {
    const HyperfineParams p(0.7, 3.0 * std::numbers::pi / 7.0, 0.94);
    const auto ts = linspace(0.0, 5.0, 26);
    const StatePath path =
        schrodinger_evolve(hyperfine_gamma(p, 0.0), HamiltonianSpec::constant(hyperfine_hamiltonian(p.mu)), ts);
    double worst = 0.0;
    for (size_t i = 0; i < ts.size(); ++i)
        worst = std::max(worst, (path.states[i].amplitudes() - hyperfine_gamma(p, ts[i]).amplitudes()).norm());
    CHECK(worst < 1e-10);
}

TEST_CASE("driven evolution against a commuting-drive closed form") {
    // H(t) = sin(w t + ph) D: propagator exp(-i D (cos ph - cos(w t + ph)) / w)
    Rng rng(6);
    const Mat d = random_hermitian(4, rng);
    const double w = 3.0, ph = 0.4;
    const HamiltonianSpec h = HamiltonianSpec::sinusoidal(Mat::Zero(4, 4), d, w, ph);
    const StateVector g(BipartiteSpace(2, 2), random_unit_vector(4, rng));
    const auto ts = linspace(0.0, 4.0, 9);
    const StatePath p = schrodinger_evolve(g, h, ts, 1e-11);
    for (size_t i = 0; i < ts.size(); ++i) {
        const double integral = (std::cos(ph) - std::cos(w * ts[i] + ph)) / w;
        const Vec exact = expm_hermitian(d, integral) * g.amplitudes();
        CHECK((p.states[i].amplitudes() - exact).norm() < 1e-8);
        CHECK(std::abs(p.states[i].amplitudes().norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("horizontality residual") {
    Rng rng(8);
    Mat hm = random_hermitian(4, rng);
    hm /= Eigen::SelfAdjointEigenSolver<Mat>(hm).eigenvalues().cwiseAbs().maxCoeff();
    const HamiltonianSpec h = HamiltonianSpec::constant(hm);
    const StateVector g(BipartiteSpace(2, 2), random_unit_vector(4, rng));
    const auto ts = linspace(0.0, 0.2, 201);
    const auto path = schrodinger_evolve(g, h, ts).amplitudes();
    const auto res = horizontality_residual(ts, path, h);
    CHECK(*std::max_element(res.begin(), res.end()) < 1e-6);

    // e^{it} Gamma with H = 0 violates horizontality by |<G, i G>| = 1
    std::vector<Vec> rot;
    for (double t : ts) rot.push_back(std::exp(cplx(0.0, t)) * g.amplitudes());
    const HamiltonianSpec zero = HamiltonianSpec::constant(Mat::Zero(4, 4));
    const auto bad = horizontality_residual(ts, rot, zero);
    for (double r : bad) CHECK(std::abs(r - 1.0) < 1e-5);
}

TEST_CASE("horizontalizing phase") {
    Rng rng(10);
    const Mat h2 = random_hermitian(4, rng);
    const Vec g = random_unit_vector(4, rng);
    const auto ts = linspace(0.0, 2.0, 101);
    const std::vector<Vec> still(ts.size(), g);
    const HamiltonianSpec zero = HamiltonianSpec::constant(Mat::Zero(4, 4));

    const PhasePath one = horizontalizing_phase(ts, still, zero, zero);
    for (cplx z : one.zeta) CHECK(std::abs(z - 1.0) < 1e-15);

    const PhasePath z = horizontalizing_phase(ts, still, zero, HamiltonianSpec::constant(h2));
    const double e = g.dot(h2 * g).real();
    for (size_t i = 0; i < ts.size(); ++i) {
        CHECK(std::abs(std::abs(z.zeta[i]) - 1.0) < 1e-12);
        CHECK(std::abs(z.zeta[i] - std::exp(cplx(0.0, -e * ts[i]))) < 1e-12);
    }

    // a path that is not horizontal for H' is refused
    std::vector<Vec> rot;
    for (double t : ts) rot.push_back(std::exp(cplx(0.0, t)) * g);
    CHECK_THROWS_AS(horizontalizing_phase(ts, rot, zero, zero), ValidationError);
}

TEST_CASE("horizontalizing in two steps equals one step") {
    Rng rng(12);
    const Mat a = random_hermitian(4, rng), b = random_hermitian(4, rng), c = random_hermitian(4, rng);
    const auto ts = linspace(0.0, 1.0, 401);
    const StateVector g(BipartiteSpace(2, 2), random_unit_vector(4, rng));
    const auto path = schrodinger_evolve(g, HamiltonianSpec::constant(a), ts).amplitudes();

    const PhasePath zb = horizontalizing_phase(ts, path, HamiltonianSpec::constant(a), HamiltonianSpec::constant(b), 1e-4);
    const auto mid = apply_phase(path, zb);
    const PhasePath zc = horizontalizing_phase(ts, mid, HamiltonianSpec::constant(a + b), HamiltonianSpec::constant(c), 1e-4);
    const PhasePath zbc =
        horizontalizing_phase(ts, path, HamiltonianSpec::constant(a), HamiltonianSpec::constant(b + c), 1e-4);
    for (size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(zb.zeta[i] * zc.zeta[i] - zbc.zeta[i]) < 1e-9);
}

TEST_CASE("the horizontal lift of a projective path is unique given its start") {
    // Gamma(t) is A^H-horizontal; e^{i chi(t)} Gamma(t) traces the same rays.
    // Lifting it again (canonical lift, then the H phase) must give Gamma(t).
    Rng rng(14);
    const Mat hm = random_hermitian(4, rng);
    const HamiltonianSpec h = HamiltonianSpec::constant(hm);
    const StateVector g(BipartiteSpace(2, 2), random_unit_vector(4, rng));
    const auto ts = linspace(0.0, 2.0, 2001);
    const auto path = schrodinger_evolve(g, h, ts).amplitudes();
    std::vector<Vec> twisted;
    for (size_t i = 0; i < ts.size(); ++i)
        twisted.push_back(std::exp(cplx(0.0, std::sin(3.0 * ts[i]) + ts[i] * ts[i])) * path[i]);

    const auto flat = apply_phase(twisted, canonical_lift_phase(ts, twisted));
    const HamiltonianSpec zero = HamiltonianSpec::constant(Mat::Zero(4, 4));
    const auto lifted = apply_phase(flat, horizontalizing_phase(ts, flat, zero, h, 1e-4));
    double worst = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) worst = std::max(worst, (lifted[i] - path[i]).norm());
    CHECK(worst < 1e-8);
}
