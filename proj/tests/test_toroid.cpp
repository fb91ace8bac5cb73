#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "iqm/hyperfine.hpp"
#include "iqm/toroid.hpp"
#include "oracles.hpp"

using namespace iqm;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> normalized(std::vector<double> r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    for (double& x : r) x /= std::sqrt(s);
    return r;
}

RightToroid random_toroid(int n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (;;) {
        std::vector<double> r(n);
        for (double& x : r) x = u(rng);
        std::sort(r.begin(), r.end(), std::greater<>());
        bool ok = true;
        for (int k = 0; k + 1 < n; ++k) ok = ok && r[k] - r[k + 1] > 0.02;
        if (ok) return RightToroid(normalized(r));
    }
}

RVec random_arc(const RightToroid& t, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RVec x(t.n());
    for (int k = 0; k < t.n(); ++k) x(k) = u(rng) * t.side(k);
    return x;
}

} // namespace

TEST_CASE("toroid construction") {
    CHECK_THROWS_AS(RightToroid({}), ValidationError);
    CHECK_THROWS_AS(RightToroid({0.5, -0.1}), ValidationError);
    CHECK_THROWS_AS(RightToroid({0.6, 0.6}), DegenerateError);
    CHECK_THROWS_AS(RightToroid({0.6, 0.6 + 1e-10}), DegenerateError);
    const RightToroid t({0.8, 0.6});
    CHECK(std::abs(t.weights()[0] - 0.64) < 1e-15);
    CHECK(std::abs(t.side(1) - 1.2 * kPi) < 1e-15);
    // radii need not be sorted
    CHECK_NOTHROW(RightToroid({0.3, 0.9, 0.1}));
    CHECK_THROWS_AS(make_point(t, RVec::Zero(3)), DimensionError);

    const ToroidPoint p = make_point(t, RVec::Constant(2, -0.1));
    CHECK(std::abs(p.arc(0) - (t.side(0) - 0.1)) < 1e-14);
    CHECK(p.arc(1) >= 0.0);
    CHECK(p.arc(1) < t.side(1));

    Vec q(2);
    q << std::polar(0.8, 0.5), std::polar(0.6, -0.25);
    const RightToroid tq = RightToroid::from_amplitudes(q);
    const ToroidPoint pq = point_from_amplitudes(tq, q);
    CHECK(std::abs(pq.arc(0) - 0.4) < 1e-14);
    CHECK(std::abs(pq.arc(1) - (t.side(1) - 0.15)) < 1e-14);
}

TEST_CASE("n = 2 against the triangle rule") {
    Rng rng(31);
    long mismatches = 0, skipped = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const RightToroid t = random_toroid(2, rng);
        for (int i = 0; i < 500; ++i) {
            const RVec x = random_arc(t, rng);
            const LocateDetail d = locate_detail(make_point(t, x), t);
            if (d.label.on_boundary) {
                ++skipped;
                continue;
            }
            if (d.label.k != oracle::two_torus_label(t.radius(0), t.radius(1), x(0), x(1))) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
    CHECK(skipped < 5);
}

TEST_CASE("n = 3 and 4 against half-space membership") {
    Rng rng(32);
    for (int n : {3, 4}) {
        long mismatches = 0, interior = 0;
        for (int rep = 0; rep < 10; ++rep) {
            const RightToroid t = random_toroid(n, rng);
            for (int i = 0; i < 300; ++i) {
                const RVec x = random_arc(t, rng);
                const PartitionLabel l = locate(make_point(t, x), t);
                const auto hs = oracle::halfspace_labels(t, x, 1e-12);
                if (hs.empty()) continue;  // within the margin of a face
                ++interior;
                if (l.on_boundary || hs.size() != 1 || hs[0] != l.k) ++mismatches;
            }
        }
        CHECK(mismatches == 0);
        CHECK(interior > 2900);
    }
}

TEST_CASE("boundary detection and tie handling") {
    const RightToroid t({0.8, 0.6});
    // equal a on both axes: the two orders put tau = 0.3 in different slabs
    RVec x(2);
    x << 0.3 * t.side(0), 0.3 * t.side(1);
    const LocateDetail d = locate_detail(make_point(t, x), t);
    CHECK(d.sort_gap < 1e-15);
    CHECK(std::abs(d.tau - 0.3) < 1e-14);
    CHECK(d.label.on_boundary);
    CHECK(d.label.k == 0);

    // a tie behind the selected slab does not matter
    const RightToroid t3({0.8, 0.5, std::sqrt(0.11)});
    RVec y(3);
    y << 0.2 * t3.side(0), 0.1 * t3.side(1), 0.1 * t3.side(2);
    const LocateDetail f = locate_detail(make_point(t3, y), t3);
    CHECK(f.sort_gap > 0.05);  // the tied pair is not counted
    CHECK_FALSE(f.label.on_boundary);
    CHECK(f.label.k == 0);

    // tau exactly on the first threshold P_1 = w_0
    x << 0.9 * t.side(0), (0.64 - 0.64 * 0.9) / 0.36 * t.side(1);
    const LocateDetail e = locate_detail(make_point(t, x), t);
    CHECK(e.label.on_boundary);
    CHECK(e.slab_gap < 1e-12);
    CHECK(e.label.k == 0);  // lowest index wins

    // ties keep index order: on the main diagonal a = 0.7 lies past w_0 = 0.64
    x << 0.7 * t.side(0), 0.7 * t.side(1);
    CHECK(locate(make_point(t, x), t).k == 1);
    x(1) += 1e-14;  // noise below tol does not reorder
    CHECK(locate(make_point(t, x), t).k == 1);
}

TEST_CASE("main diagonal through the base point") {
    const RightToroid t({std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)});
    const ToroidPoint origin = make_point(t, RVec::Zero(3));
    const DiagonalArcs d = diagonal_arcs(t, origin);
    // one interval per label, starting at the cumulative sums of r^2
    REQUIRE(d.pieces.size() == 3);
    double start = 0.0;
    for (int k = 0; k < 3; ++k) {
        CHECK(d.pieces[k].k == k);
        CHECK(std::abs(d.pieces[k].lo - start) < 1e-14);
        start += t.weights()[k];
        CHECK(std::abs(d.lengths(k) - 2.0 * kPi * t.weights()[k]) < 1e-12);
    }
    const MeasureEstimate g = global_phase_frequencies(t, origin, 100000, 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(g.fraction(k) - t.weights()[k]) < 4.0 * g.sigma(k));
}

TEST_CASE("points on the generating circles carry their axis label") {
    Rng rng(33);
    for (int n = 2; n <= 5; ++n) {
        const RightToroid t = random_toroid(n, rng);
        for (int k = 0; k < n; ++k) {
            for (double c : {0.01, 0.3, 0.97}) {
                RVec x = RVec::Zero(n);
                x(k) = c * t.side(k) * std::min(1.0, t.weights()[k]);
                const PartitionLabel l = locate(make_point(t, x), t);
                CHECK(l.k == k);
            }
        }
    }
}

TEST_CASE("locate is symmetric under x -> -x") {
    Rng rng(34);
    for (int n = 2; n <= 5; ++n) {
        const RightToroid t = random_toroid(n, rng);
        for (int i = 0; i < 200; ++i) {
            const RVec x = random_arc(t, rng);
            const PartitionLabel a = locate(make_point(t, x), t), b = locate(make_point(t, -x), t);
            if (a.on_boundary || b.on_boundary) continue;
            CHECK(a.k == b.k);
        }
    }
}

TEST_CASE("diagonal arcs: exact lengths") {
    Rng rng(35);
    for (int n = 1; n <= 6; ++n) {
        const RightToroid t = n == 1 ? RightToroid({1.0}) : random_toroid(n, rng);
        for (int rep = 0; rep < 10; ++rep) {
            const ToroidPoint base = make_point(t, random_arc(t, rng));
            const DiagonalArcs d = diagonal_arcs(t, base);
            for (int k = 0; k < n; ++k) CHECK(std::abs(d.lengths(k) - 2.0 * kPi * t.weights()[k]) < 1e-12);
            double cover = 0.0;
            for (const ArcPiece& p : d.pieces) {
                CHECK(p.hi > p.lo);
                cover += p.hi - p.lo;
                // the piece midpoint is in the part it claims
                const double c = 0.5 * (p.lo + p.hi);
                RVec x = base.arc;
                for (int j = 0; j < n; ++j) x(j) += c * t.side(j);
                const PartitionLabel l = locate(make_point(t, x), t);
                if (!l.on_boundary) CHECK(l.k == p.k);
            }
            CHECK(std::abs(cover - 1.0) < 1e-14);
        }
    }
}

TEST_CASE("diagonal arcs: sampled lengths, parallel and serial") {
    Rng rng(36);
    for (int n = 3; n <= 5; ++n) {
        const RightToroid t = random_toroid(n, rng);
        const ToroidPoint base = make_point(t, random_arc(t, rng));
        const RVec a = diagonal_arcs_sampled(t, base, 4000), b = diagonal_arcs_sampled_serial(t, base, 4000);
        CHECK((a - b).norm() == 0.0);
        for (int k = 0; k < n; ++k) CHECK(std::abs(a(k) - 2.0 * kPi * t.weights()[k]) < 1e-6);
    }
}

TEST_CASE("Monte Carlo measures") {
    const RightToroid t({0.8, 0.5, 0.33166247903554});
    const MeasureEstimate a = part_measures(t, 200000, 7), b = part_measures_serial(t, 200000, 7);
    CHECK((a.fraction - b.fraction).norm() == 0.0);
    CHECK(a.boundary_hits == b.boundary_hits);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(a.fraction(k) - t.weights()[k]) < 4.0 * a.sigma(k) + 1e-12);
        CHECK(a.sigma(k) > 0.0);
    }
    CHECK(part_measure(RightToroid({1.0}), 0, 10, 1) == 1.0);

    // global phases: the Pythagorean probability
    Rng rng(37);
    const ToroidPoint base = make_point(t, random_arc(t, rng));
    const MeasureEstimate g = global_phase_frequencies(t, base, 100000, 9);
    const MeasureEstimate gs = global_phase_frequencies_serial(t, base, 100000, 9);
    CHECK((g.fraction - gs.fraction).norm() == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(g.fraction(k) - t.weights()[k]) < 3.0 * g.sigma(k) + 1e-3);
}

TEST_CASE("batch locate: parallel equals serial") {
    Rng rng(38);
    const RightToroid t = random_toroid(4, rng);
    RMat arc(4, 5000);
    for (int i = 0; i < arc.cols(); ++i) arc.col(i) = random_arc(t, rng);
    const auto a = locate_batch(t, arc), b = locate_batch_serial(t, arc);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].k == b[i].k);
        CHECK(a[i].on_boundary == b[i].on_boundary);
        CHECK(a[i].k == locate(make_point(t, arc.col(static_cast<int>(i))), t).k);
    }
}

TEST_CASE("generators and cell geometry") {
    Rng rng(39);
    for (int n = 2; n <= 4; ++n) {
        const RightToroid t = random_toroid(n, rng);
        const RVec s = diagonal_vector(t);
        const auto g = g_vectors(t);
        REQUIRE(static_cast<int>(g.size()) == n);
        RVec sum = RVec::Zero(n);
        for (const RVec& v : g) sum += v;
        CHECK(sum.norm() < 1e-12);  // sum_j (w_j s - f_j) = s - s
        for (int k = 0; k < n; ++k) {
            const RMat gen = parallelotope_generators(t, k);
            CHECK(gen.cols() == n);
            // volume of A_k = w_k * volume of the box
            double box = 1.0;
            for (int j = 0; j < n; ++j) box *= t.side(j);
            CHECK(std::abs(std::abs(gen.determinant()) - t.weights()[k] * box) < 1e-9 * box);

            std::vector<int> sigma(n);
            std::iota(sigma.begin(), sigma.end(), 0);
            std::rotate(sigma.begin(), std::find(sigma.begin(), sigma.end(), k), sigma.end());
            const CellGeometry c = cell_geometry(t, k, sigma);
            CHECK(static_cast<int>(c.parallelotope.size()) == (1 << n));
            CHECK(!c.slab.empty());
            CHECK(c.slab.size() == c.slab_shifted.size());
        }
    }
}

TEST_CASE("lifted parts agree with locate") {
    Rng rng(40);
    for (int n = 2; n <= 3; ++n) {
        const RightToroid t = random_toroid(n, rng);
        long mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            const RVec x = random_arc(t, rng);
            const PartitionLabel l = locate(make_point(t, x), t);
            if (l.on_boundary) continue;
            int hits = 0;
            for (int k = 0; k < n; ++k)
                if (in_lifted_part(t, k, x, -1e-9)) {
                    ++hits;
                    if (k != l.k) ++mismatches;
                }
            if (hits != 1) ++mismatches;
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("naturality") {
    Rng rng(41);
    for (int n = 2; n <= 4; ++n) {
        const RightToroid t = random_toroid(n, rng);
        for (int axis = 0; axis < n; ++axis) {
            const NaturalityReport r = check_naturality(t, axis, 1000, 100 + axis);
            CHECK(r.ok());
            CHECK(r.samples == 1000);
            CHECK(r.boundary_skipped < 20);
            CHECK(r.limit_boundary_skipped < 20);
        }
    }
}

TEST_CASE("convexity of the lifted parts") {
    Rng rng(42);
    for (int n = 2; n <= 3; ++n) {
        const RightToroid t = random_toroid(n, rng);
        for (int k = 0; k < n; ++k) {
            const ConvexityReport r = check_convexity(t, k, 500, 7);
            CHECK(r.facets_ok);
            CHECK(r.chords_ok);
            CHECK(r.label_mismatches == 0);
        }
    }
}

TEST_CASE("convex hulls") {
    std::vector<RVec> sq;
    for (double x : {0.0, 1.0})
        for (double y : {0.0, 2.0}) sq.push_back((RVec(2) << x, y).finished());
    sq.push_back((RVec(2) << 0.5, 1.0).finished());
    const Hull h2 = convex_hull(sq);
    CHECK(h2.vertices.size() == 4);
    CHECK(std::abs(h2.volume - 2.0) < 1e-14);

    std::vector<RVec> cube;
    for (int m = 0; m < 8; ++m) cube.push_back((RVec(3) << (m & 1), (m >> 1) & 1, (m >> 2) & 1).finished());
    cube.push_back(RVec::Constant(3, 0.5));
    const Hull h3 = convex_hull(cube);
    CHECK(h3.vertices.size() == 8);
    CHECK(std::abs(h3.volume - 1.0) < 1e-12);
}

TEST_CASE("hyperfine label rule agrees with locate") {
    Rng rng(43);
    std::uniform_real_distribution<double> u(0.0, 10.0 * kPi);
    const HyperfineParams p(1.0, 3.0 * kPi / 7.0, 0.94);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const double t = u(rng) / p.omega();
        const PolarFrame f = closed_form_frame(p, t);
        const SignResult s = label_sign(p, t);
        const RightToroid tor = RightToroid::from_amplitudes(f.q);
        const PartitionLabel l = locate(point_from_amplitudes(tor, f.q), tor);
        if (s.on_boundary || l.on_boundary) continue;
        ++checked;
        CHECK((s.sign > 0 ? 0 : 1) == l.k);
    }
    CHECK(checked > 1990);
}

TEST_CASE("tiling exports") {
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    const RightToroid t2(normalized({g, 1.0}));
    const std::string svg = tiling_svg(t2);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("data-label=\"0\"") != std::string::npos);
    CHECK(svg.find("data-label=\"1\"") != std::string::npos);
    const RightToroid t3(normalized({3.0, 2.0, 1.0}));
    const std::string obj = tiling_obj(t3);
    CHECK(obj.find("g part0_") != std::string::npos);
    CHECK(obj.find("g part2_") != std::string::npos);
    CHECK_THROWS(tiling_svg(t3));
}
