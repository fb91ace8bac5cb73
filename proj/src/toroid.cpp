#include "iqm/toroid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "iqm/numerics.hpp"

namespace iqm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac01(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;
    return f;
}

std::vector<int> sort_desc(const RVec& a) {
    std::vector<int> s(a.size());
    std::iota(s.begin(), s.end(), 0);
    std::stable_sort(s.begin(), s.end(), [&a](int i, int j) { return a(i) > a(j); });
    return s;
}

// Position j (0-based) with P_{j-1} <= tau <= P_j along sigma.
int slab_position(const std::vector<int>& sigma, const std::vector<double>& w, double tau) {
    double p = 0.0;
    const int n = static_cast<int>(sigma.size());
    for (int j = 0; j < n; ++j) {
        p += w[sigma[j]];
        if (tau <= p) return j;
    }
    return n - 1;
}

} // namespace

RightToroid::RightToroid(std::vector<double> radii, double distinct_tol) : r_(std::move(radii)) {
    if (r_.empty()) throw ValidationError("toroid needs at least one radius");
    double sum = 0.0;
    for (double r : r_) {
        if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("toroid radii must be positive");
        sum += r * r;
    }
    for (size_t j = 0; j < r_.size(); ++j)
        for (size_t k = j + 1; k < r_.size(); ++k)
            if (std::abs(r_[j] - r_[k]) < distinct_tol) {
                std::ostringstream os;
                os << "toroid radii " << j << " and " << k << " are degenerate (" << r_[j] << ")";
                throw DegenerateError(os.str());
            }
    w_.resize(r_.size());
    for (size_t j = 0; j < r_.size(); ++j) w_[j] = r_[j] * r_[j] / sum;
}

RightToroid RightToroid::from_amplitudes(const Vec& q) {
    std::vector<double> r(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) r[k] = std::abs(q(k));
    return RightToroid(std::move(r));
}

double RightToroid::side(int k) const { return kTwoPi * r_[k]; }

ToroidPoint make_point(const RightToroid& t, const RVec& arc) {
    if (arc.size() != t.n()) throw DimensionError("point dimension differs from toroid");
    ToroidPoint p;
    p.arc.resize(t.n());
    for (int k = 0; k < t.n(); ++k) p.arc(k) = frac01(arc(k) / t.side(k)) * t.side(k);
    return p;
}

ToroidPoint point_from_amplitudes(const RightToroid& t, const Vec& q) {
    if (q.size() != t.n()) throw DimensionError("amplitude count differs from toroid");
    RVec arc(t.n());
    for (int k = 0; k < t.n(); ++k) arc(k) = t.radius(k) * std::arg(q(k));
    return make_point(t, arc);
}

LocateDetail locate_detail(const ToroidPoint& p, const RightToroid& t, double tol) {
    const int n = t.n();
    if (p.arc.size() != n) throw DimensionError("point dimension differs from toroid");
    const auto& w = t.weights();
    LocateDetail d;
    d.a.resize(n);
    for (int k = 0; k < n; ++k) {
        d.a(k) = frac01(p.arc(k) / t.side(k));
        // a just below 1 is the same torus point as a = 0; keep ties at the
        // base point visible to the tie test below
        if (d.a(k) > 1.0 - tol) d.a(k) = 0.0;
    }
    d.sigma = sort_desc(d.a);
    // values within tol of each other count as tied and keep index order, so
    // rounding noise cannot reorder sigma (the main diagonal through the
    // base point is all ties)
    for (int lo = 0; lo < n;) {
        int hi = lo;
        while (hi + 1 < n && d.a(d.sigma[hi]) - d.a(d.sigma[hi + 1]) < tol) ++hi;
        std::sort(d.sigma.begin() + lo, d.sigma.begin() + hi + 1);
        lo = hi + 1;
    }
    d.tau = 0.0;
    for (int k = 0; k < n; ++k) d.tau += w[k] * d.a(k);

    const int j = slab_position(d.sigma, w, d.tau);
    int label = d.sigma[j];
    bool boundary = false;

    d.slab_gap = std::numeric_limits<double>::infinity();
    double cum = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        cum += w[d.sigma[i]];
        const double g = std::abs(d.tau - cum);
        d.slab_gap = std::min(d.slab_gap, g);
        if (g < tol) {
            boundary = true;
            label = std::min({label, d.sigma[i], d.sigma[i + 1]});
        }
    }
    // a tie in the sort only matters when swapping the pair moves the label
    d.sort_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) {
        const double g = std::abs(d.a(d.sigma[i]) - d.a(d.sigma[i + 1]));
        std::vector<int> alt = d.sigma;
        std::swap(alt[i], alt[i + 1]);
        if (alt[slab_position(alt, w, d.tau)] == d.sigma[j]) continue;
        d.sort_gap = std::min(d.sort_gap, g);
        boundary = boundary || g < tol;
    }
    // Larger tie clusters: the point is a boundary point when some other
    // member of the cluster around position j can be placed over tau.
    int lo = j, hi = j;
    while (lo > 0 && d.a(d.sigma[lo - 1]) - d.a(d.sigma[lo]) < tol) --lo;
    while (hi + 1 < n && d.a(d.sigma[hi]) - d.a(d.sigma[hi + 1]) < tol) ++hi;
    const int size = hi - lo + 1;
    if (!boundary && size > 2 && size <= 20) {
        double start = 0.0;
        for (int i = 0; i < lo; ++i) start += w[d.sigma[i]];
        const double rel = d.tau - start;
        for (int c = lo; c <= hi && !boundary; ++c) {
            if (c == j) continue;
            const int m = d.sigma[c];
            for (unsigned mask = 0; mask < (1u << size) && !boundary; ++mask) {
                if (mask & (1u << (c - lo))) continue;
                double before = 0.0;
                for (int b = 0; b < size; ++b)
                    if (mask & (1u << b)) before += w[d.sigma[lo + b]];
                boundary = before <= rel + tol && rel <= before + w[m] + tol;
            }
        }
        if (boundary)
            for (int i = lo; i < hi; ++i) d.sort_gap = std::min(d.sort_gap, d.a(d.sigma[i]) - d.a(d.sigma[i + 1]));
    }
    d.label = {label, boundary};
    return d;
}

PartitionLabel locate(const ToroidPoint& p, const RightToroid& t, double tol) {
    return locate_detail(p, t, tol).label;
}

std::vector<PartitionLabel> locate_batch_serial(const RightToroid& t, const RMat& arc) {
    if (arc.rows() != t.n()) throw DimensionError("batch rows differ from toroid dimension");
    std::vector<PartitionLabel> out(arc.cols());
    for (Eigen::Index i = 0; i < arc.cols(); ++i) out[i] = locate(make_point(t, arc.col(i)), t);
    return out;
}

std::vector<PartitionLabel> locate_batch(const RightToroid& t, const RMat& arc) {
    if (arc.rows() != t.n()) throw DimensionError("batch rows differ from toroid dimension");
    const long count = static_cast<long>(arc.cols());
    std::vector<PartitionLabel> out(count);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) out[i] = locate(make_point(t, arc.col(i)), t);
    return out;
}

DiagonalArcs diagonal_arcs(const RightToroid& t, const ToroidPoint& base) {
    const int n = t.n();
    const auto& w = t.weights();
    RVec a0(n);
    for (int k = 0; k < n; ++k) a0(k) = frac01(base.arc(k) / t.side(k));
    std::vector<double> cuts{0.0, 1.0};
    for (int k = 0; k < n; ++k)
        if (a0(k) > 0.0) cuts.push_back(1.0 - a0(k));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    DiagonalArcs out;
    out.lengths = RVec::Zero(n);
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        if (hi - lo <= 0.0) continue;
        const double mid = 0.5 * (lo + hi);
        RVec am(n);
        for (int k = 0; k < n; ++k) am(k) = frac01(a0(k) + mid);
        const auto sigma = sort_desc(am);
        double tau_mid = 0.0;
        for (int k = 0; k < n; ++k) tau_mid += w[k] * am(k);
        double p_lo = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p_hi = p_lo + w[sigma[j]];
            const double x0 = std::max(lo, mid + p_lo - tau_mid);
            const double x1 = std::min(hi, mid + p_hi - tau_mid);
            if (x1 > x0) {
                out.pieces.push_back({x0, x1, sigma[j]});
                out.lengths(sigma[j]) += kTwoPi * (x1 - x0);
            }
            p_lo = p_hi;
        }
    }
    return out;
}

namespace {

ToroidPoint diagonal_point(const RightToroid& t, const ToroidPoint& base, double c) {
    RVec arc(t.n());
    for (int k = 0; k < t.n(); ++k) arc(k) = base.arc(k) + c * t.side(k);
    return make_point(t, arc);
}

double refine_transition(const RightToroid& t, const ToroidPoint& base, double lo, double hi, int k_lo) {
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (locate(diagonal_point(t, base, mid), t).k == k_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RVec lengths_from_samples(const RightToroid& t, const std::vector<int>& lab, const std::vector<double>& cut,
                          const std::vector<size_t>& where) {
    // cut[i] is the transition after sample where[i]
    const int n = t.n();
    const size_t count = lab.size();
    RVec out = RVec::Zero(n);
    if (cut.empty()) {
        out(lab[0]) = kTwoPi;
        return out;
    }
    for (size_t i = 0; i < cut.size(); ++i) {
        const size_t nxt = (i + 1) % cut.size();
        double len = cut[nxt] - cut[i];
        if (len <= 0.0) len += 1.0;
        out(lab[(where[i] + 1) % count]) += kTwoPi * len;
    }
    return out;
}

RVec sampled_arcs(const RightToroid& t, const ToroidPoint& base, int samples, bool parallel) {
    if (samples < 2) throw ValidationError("diagonal_arcs_sampled needs at least 2 samples");
    const long count = samples;
    std::vector<int> lab(count);
    auto c_of = [count](long i) { return (static_cast<double>(i) + 0.5) / static_cast<double>(count); };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < count; ++i) lab[i] = locate(diagonal_point(t, base, c_of(i)), t).k;
    } else {
        for (long i = 0; i < count; ++i) lab[i] = locate(diagonal_point(t, base, c_of(i)), t).k;
    }
    std::vector<size_t> where;
    for (long i = 0; i < count; ++i)
        if (lab[i] != lab[(i + 1) % count]) where.push_back(static_cast<size_t>(i));
    std::vector<double> cut(where.size());
    const long nt = static_cast<long>(where.size());
    auto refine = [&](long i) {
        const long a = static_cast<long>(where[i]);
        double lo = c_of(a), hi = c_of(a + 1);  // may exceed 1 on the wrap
        double c = refine_transition(t, base, lo, hi, lab[a]);
        cut[i] = c >= 1.0 ? c - 1.0 : c;
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < nt; ++i) refine(i);
    } else {
        for (long i = 0; i < nt; ++i) refine(i);
    }
    // order transitions along the circle
    std::vector<size_t> idx(cut.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&cut](size_t x, size_t y) { return cut[x] < cut[y]; });
    std::vector<double> cs;
    std::vector<size_t> ws;
    for (size_t i : idx) {
        cs.push_back(cut[i]);
        ws.push_back(where[i]);
    }
    return lengths_from_samples(t, lab, cs, ws);
}

template <class PointFn>
MeasureEstimate count_labels(const RightToroid& t, long samples, PointFn point_at, bool parallel) {
    if (samples < 1) throw ValidationError("need at least one sample");
    const int n = t.n();
    std::vector<long> counts(n, 0);
    long boundary = 0;
    if (parallel) {
#pragma omp parallel
        {
            std::vector<long> local(n, 0);
            long lb = 0;
#pragma omp for schedule(static) nowait
            for (long i = 0; i < samples; ++i) {
                const PartitionLabel l = locate(point_at(i), t);
                ++local[l.k];
                lb += l.on_boundary;
            }
#pragma omp critical
            {
                for (int k = 0; k < n; ++k) counts[k] += local[k];
                boundary += lb;
            }
        }
    } else {
        for (long i = 0; i < samples; ++i) {
            const PartitionLabel l = locate(point_at(i), t);
            ++counts[l.k];
            boundary += l.on_boundary;
        }
    }
    MeasureEstimate m;
    m.samples = samples;
    m.boundary_hits = boundary;
    m.fraction.resize(n);
    m.sigma.resize(n);
    for (int k = 0; k < n; ++k) {
        const double p = static_cast<double>(counts[k]) / static_cast<double>(samples);
        m.fraction(k) = p;
        m.sigma(k) = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
    }
    return m;
}

} // namespace

RVec diagonal_arcs_sampled(const RightToroid& t, const ToroidPoint& base, int samples) {
    return sampled_arcs(t, base, samples, true);
}

RVec diagonal_arcs_sampled_serial(const RightToroid& t, const ToroidPoint& base, int samples) {
    return sampled_arcs(t, base, samples, false);
}

namespace {

auto uniform_point(const RightToroid& t, std::uint64_t seed) {
    return [&t, seed](long i) {
        const int n = t.n();
        ToroidPoint p;
        p.arc.resize(n);
        for (int k = 0; k < n; ++k)
            p.arc(k) = counter_uniform(seed, static_cast<std::uint64_t>(i) * n + k) * t.side(k);
        return p;
    };
}

auto phase_point(const RightToroid& t, const ToroidPoint& base, std::uint64_t seed) {
    return [&t, &base, seed](long i) {
        const double alpha = kTwoPi * counter_uniform(seed, static_cast<std::uint64_t>(i));
        RVec arc(t.n());
        for (int k = 0; k < t.n(); ++k) arc(k) = base.arc(k) + t.radius(k) * alpha;
        return make_point(t, arc);
    };
}

} // namespace

MeasureEstimate part_measures(const RightToroid& t, long samples, std::uint64_t seed) {
    return count_labels(t, samples, uniform_point(t, seed), true);
}

MeasureEstimate part_measures_serial(const RightToroid& t, long samples, std::uint64_t seed) {
    return count_labels(t, samples, uniform_point(t, seed), false);
}

double part_measure(const RightToroid& t, int k, long samples, std::uint64_t seed) {
    if (k < 0 || k >= t.n()) throw ValidationError("label out of range");
    if (t.n() == 1) return 1.0;
    return part_measures(t, samples, seed).fraction(k);
}

MeasureEstimate global_phase_frequencies(const RightToroid& t, const ToroidPoint& base, long samples,
                                         std::uint64_t seed) {
    return count_labels(t, samples, phase_point(t, base, seed), true);
}

MeasureEstimate global_phase_frequencies_serial(const RightToroid& t, const ToroidPoint& base,
                                                long samples, std::uint64_t seed) {
    return count_labels(t, samples, phase_point(t, base, seed), false);
}

RVec diagonal_vector(const RightToroid& t) {
    RVec s(t.n());
    for (int k = 0; k < t.n(); ++k) s(k) = t.side(k);
    return s;
}

std::vector<RVec> g_vectors(const RightToroid& t) {
    const RVec s = diagonal_vector(t);
    std::vector<RVec> g;
    for (int j = 0; j < t.n(); ++j) {
        RVec v = t.weights()[j] * s;
        v(j) -= s(j);
        g.push_back(v);
    }
    return g;
}

RMat parallelotope_generators(const RightToroid& t, int k) {
    const int n = t.n();
    const auto g = g_vectors(t);
    RMat m(n, n);
    int c = 0;
    for (int j = 0; j < n; ++j)
        if (j != k) m.col(c++) = g[j];
    m.col(n - 1) = t.weights()[k] * diagonal_vector(t);
    return m;
}

CellGeometry cell_geometry(const RightToroid& t, int k, const std::vector<int>& sigma) {
    const int n = t.n();
    if (n > 4) throw ValidationError("cell_geometry export supports n <= 4");
    if (k < 0 || k >= n) throw ValidationError("label out of range");
    std::vector<int> chk = sigma;
    std::sort(chk.begin(), chk.end());
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(chk.size()) != n || chk[i] != i) throw ValidationError("sigma is not a permutation");

    const RVec s = diagonal_vector(t);
    std::vector<RVec> P(n + 1, RVec::Zero(n));
    for (int i = 0; i < n; ++i) {
        P[i + 1] = P[i];
        P[i + 1](sigma[i]) = s(sigma[i]);
    }
    const int j = static_cast<int>(std::find(sigma.begin(), sigma.end(), k) - sigma.begin());
    CellGeometry cg;
    cg.k = k;
    cg.sigma = sigma;
    cg.offset = P[j];
    const double l1 = s.dot(P[j]), l2 = s.dot(P[j + 1]);
    cg.slab.push_back(P[j]);
    cg.slab.push_back(P[j + 1]);
    for (int a = 0; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) {
            const double ha = s.dot(P[a]), hb = s.dot(P[b]);
            for (double lv : {l1, l2})
                if (ha < lv && lv < hb && !(a == j && b == j + 1))
                    cg.slab.push_back(P[a] + (lv - ha) / (hb - ha) * (P[b] - P[a]));
        }
    for (const RVec& v : cg.slab) cg.slab_shifted.push_back(v - cg.offset);

    const RMat gen = parallelotope_generators(t, k);
    for (int mask = 0; mask < (1 << n); ++mask) {
        RVec v = RVec::Zero(n);
        for (int c = 0; c < n; ++c)
            if (mask & (1 << c)) v += gen.col(c);
        cg.parallelotope.push_back(v);
    }
    return cg;
}

bool in_lifted_part(const RightToroid& t, int k, const RVec& x, double tol) {
    const int n = t.n();
    const RMat gen = parallelotope_generators(t, k);
    const Eigen::PartialPivLU<RMat> lu(gen);
    const RVec s = diagonal_vector(t);
    std::vector<int> z(n, -1);
    while (true) {
        RVec y = x;
        for (int c = 0; c < n; ++c) y(c) -= z[c] * s(c);
        const RVec c = lu.solve(y);
        if ((c.array() >= -tol).all() && (c.array() <= 1.0 + tol).all()) return true;
        int p = 0;
        while (p < n && ++z[p] > 2) z[p++] = -1;
        if (p == n) return false;
    }
}

NaturalityReport check_naturality(const RightToroid& t, int axis, long samples, std::uint64_t seed,
                                  double limit_radius) {
    const int n = t.n();
    if (n < 2) throw ValidationError("naturality needs n >= 2");
    if (axis < 0 || axis >= n) throw ValidationError("axis out of range");
    std::vector<int> keep;
    std::vector<double> sub_r;
    for (int k = 0; k < n; ++k)
        if (k != axis) {
            keep.push_back(k);
            sub_r.push_back(t.radius(k));
        }
    const RightToroid sub(sub_r);

    NaturalityReport rep;
    rep.axis = axis;
    rep.samples = samples;
    rep.limit_radius = limit_radius;
    for (long i = 0; i < samples; ++i) {
        RVec arc = RVec::Zero(n), sub_arc(n - 1);
        for (int c = 0; c < n - 1; ++c) {
            sub_arc(c) = counter_uniform(seed, static_cast<std::uint64_t>(i) * n + c) * sub.side(c);
            arc(keep[c]) = sub_arc(c);
        }
        const PartitionLabel full = locate(make_point(t, arc), t);
        const PartitionLabel part = locate(make_point(sub, sub_arc), sub);
        if (full.on_boundary || part.on_boundary) {
            ++rep.boundary_skipped;
            continue;
        }
        if (full.k != keep[part.k]) ++rep.violations;
    }

    // r_axis -> 0: the squeezed toroid keeps the other radii, so the
    // (n-1)-dimensional partition is the limit of the n-dimensional one.
    std::vector<double> lim_r = t.radii();
    lim_r[axis] = limit_radius;
    const RightToroid lim(lim_r);
    for (long i = 0; i < samples; ++i) {
        RVec arc(n), sub_arc(n - 1);
        for (int c = 0; c < n; ++c)
            arc(c) = counter_uniform(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(i) * n + c) * lim.side(c);
        for (int c = 0; c < n - 1; ++c) sub_arc(c) = arc(keep[c]);
        const PartitionLabel full = locate(make_point(lim, arc), lim);
        const PartitionLabel part = locate(make_point(sub, sub_arc), sub);
        if (full.on_boundary || part.on_boundary) {
            ++rep.limit_boundary_skipped;
            continue;
        }
        if (full.k != keep[part.k]) ++rep.limit_violations;
    }
    return rep;
}

ConvexityReport check_convexity(const RightToroid& t, int k, long samples, std::uint64_t seed) {
    const int n = t.n();
    if (n > 3) throw ValidationError("convexity check supports n <= 3");
    ConvexityReport rep;
    rep.k = k;
    rep.samples = samples;
    const RMat gen = parallelotope_generators(t, k);
    std::vector<RVec> verts;
    for (int mask = 0; mask < (1 << n); ++mask) {
        RVec v = RVec::Zero(n);
        for (int c = 0; c < n; ++c)
            if (mask & (1 << c)) v += gen.col(c);
        verts.push_back(v);
    }
    double box = 1.0;
    for (int c = 0; c < n; ++c) box *= t.side(c);
    const Hull hull = convex_hull(verts);
    rep.facets_ok = static_cast<int>(hull.vertices.size()) == (1 << n) &&
                    std::abs(hull.volume - t.weights()[k] * box) < 1e-9 * box;

    // facet inequalities of the hull, n >= 2
    std::vector<std::pair<RVec, double>> planes;
    if (n == 3) {
        for (const auto& f : hull.faces) {
            const RVec a = hull.vertices[f[0]], b = hull.vertices[f[1]], c = hull.vertices[f[2]];
            Eigen::Vector3d nv = (b - a).head<3>().cross((c - a).head<3>());
            planes.push_back({RVec(nv), nv.dot(a.head<3>())});
        }
    } else if (n == 2) {
        const auto& poly = hull.faces.front();
        for (size_t i = 0; i < poly.size(); ++i) {
            const RVec a = hull.vertices[poly[i]], b = hull.vertices[poly[(i + 1) % poly.size()]];
            RVec nv(2);
            nv << (b - a)(1), -(b - a)(0);
            planes.push_back({nv, nv.dot(a)});
        }
    }
    for (const auto& [nv, off] : planes)
        for (const RVec& v : verts)
            if (nv.dot(v) - off > 1e-9 * nv.norm() * (1.0 + v.norm())) rep.facets_ok = false;

    auto inside = [&](const RVec& x) {
        for (const auto& [nv, off] : planes)
            if (nv.dot(x) - off > 1e-9 * nv.norm() * (1.0 + x.norm())) return false;
        return true;
    };
    rep.chords_ok = true;
    std::uint64_t idx = 0;
    for (long i = 0; i < samples; ++i) {
        RVec t1(n), t2(n);
        for (int c = 0; c < n; ++c) {
            t1(c) = counter_uniform(seed, idx++);
            t2(c) = counter_uniform(seed, idx++);
        }
        const double lam = counter_uniform(seed, idx++);
        const RVec x1 = gen * t1, x2 = gen * t2;
        if (n >= 2 && !inside(lam * x1 + (1.0 - lam) * x2)) rep.chords_ok = false;
        const PartitionLabel l = locate(make_point(t, x1), t);
        if (!l.on_boundary && l.k != k) ++rep.label_mismatches;
    }
    return rep;
}

Hull convex_hull(const std::vector<RVec>& pts, double tol) {
    Hull h;
    if (pts.empty()) return h;
    const int d = static_cast<int>(pts[0].size());
    // dedupe
    std::vector<RVec> p;
    for (const RVec& x : pts) {
        bool dup = false;
        for (const RVec& y : p)
            if ((x - y).norm() < tol) dup = true;
        if (!dup) p.push_back(x);
    }
    if (d == 1) {
        double lo = p[0](0), hi = p[0](0);
        for (const RVec& x : p) {
            lo = std::min(lo, x(0));
            hi = std::max(hi, x(0));
        }
        h.vertices = {RVec::Constant(1, lo), RVec::Constant(1, hi)};
        h.faces = {{0, 1}};
        h.volume = hi - lo;
        return h;
    }
    if (d == 2) {
        std::vector<int> idx(p.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&p](int a, int b) {
            return p[a](0) < p[b](0) || (p[a](0) == p[b](0) && p[a](1) < p[b](1));
        });
        auto cross = [&p](int o, int a, int b) {
            return (p[a](0) - p[o](0)) * (p[b](1) - p[o](1)) - (p[a](1) - p[o](1)) * (p[b](0) - p[o](0));
        };
        std::vector<int> hull_idx(2 * idx.size());
        int kk = 0;
        for (int i : idx) {
            while (kk >= 2 && cross(hull_idx[kk - 2], hull_idx[kk - 1], i) <= tol) --kk;
            hull_idx[kk++] = i;
        }
        for (int i = static_cast<int>(idx.size()) - 2, lower = kk + 1; i >= 0; --i) {
            while (kk >= lower && cross(hull_idx[kk - 2], hull_idx[kk - 1], idx[i]) <= tol) --kk;
            hull_idx[kk++] = idx[i];
        }
        hull_idx.resize(std::max(kk - 1, 0));
        std::vector<int> face;
        for (int i : hull_idx) {
            face.push_back(static_cast<int>(h.vertices.size()));
            h.vertices.push_back(p[i]);
        }
        double area = 0.0;
        for (size_t i = 0; i < h.vertices.size(); ++i) {
            const RVec& a = h.vertices[i];
            const RVec& b = h.vertices[(i + 1) % h.vertices.size()];
            area += a(0) * b(1) - a(1) * b(0);
        }
        h.volume = 0.5 * std::abs(area);
        h.faces = {face};
        return h;
    }
    if (d != 3) throw ValidationError("convex_hull supports dimensions 1 to 3");

    const int np = static_cast<int>(p.size());
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const RVec& x : p) centroid += x.head<3>();
    centroid /= np;
    double scale = 0.0;
    for (const RVec& x : p) scale = std::max(scale, (x.head<3>() - centroid).norm());
    const double eps = tol * std::max(scale, 1.0);

    std::vector<bool> used_vertex(np, false);
    std::vector<std::pair<Eigen::Vector3d, double>> seen;
    std::vector<std::vector<int>> raw_faces;
    for (int a = 0; a < np; ++a)
        for (int b = a + 1; b < np; ++b)
            for (int c = b + 1; c < np; ++c) {
                const Eigen::Vector3d pa = p[a].head<3>(), pb = p[b].head<3>(), pc = p[c].head<3>();
                Eigen::Vector3d nv = (pb - pa).cross(pc - pa);
                if (nv.norm() < eps * scale) continue;
                nv.normalize();
                double off = nv.dot(pa);
                if (nv.dot(centroid) > off) {
                    nv = -nv;
                    off = -off;
                }
                bool facet = true;
                std::vector<int> on;
                for (int i = 0; i < np && facet; ++i) {
                    const double sd = nv.dot(p[i].head<3>()) - off;
                    if (sd > eps) facet = false;
                    if (std::abs(sd) <= eps) on.push_back(i);
                }
                if (!facet) continue;
                bool dup = false;
                for (const auto& [sn, so] : seen)
                    if ((sn - nv).norm() < 1e-9 && std::abs(so - off) < eps) dup = true;
                if (dup) continue;
                seen.push_back({nv, off});
                // order the coplanar points counter-clockwise around the outward normal
                Eigen::Vector3d fc = Eigen::Vector3d::Zero();
                for (int i : on) fc += p[i].head<3>();
                fc /= static_cast<double>(on.size());
                const Eigen::Vector3d e1 = (p[on[0]].head<3>() - fc).normalized();
                const Eigen::Vector3d e2 = nv.cross(e1);
                std::sort(on.begin(), on.end(), [&](int x, int y) {
                    const Eigen::Vector3d dx = p[x].head<3>() - fc, dy = p[y].head<3>() - fc;
                    return std::atan2(dx.dot(e2), dx.dot(e1)) < std::atan2(dy.dot(e2), dy.dot(e1));
                });
                // drop points interior to an edge
                std::vector<int> poly;
                const int m = static_cast<int>(on.size());
                for (int i = 0; i < m; ++i) {
                    const Eigen::Vector3d prv = p[on[(i + m - 1) % m]].head<3>();
                    const Eigen::Vector3d cur = p[on[i]].head<3>();
                    const Eigen::Vector3d nxt = p[on[(i + 1) % m]].head<3>();
                    if ((cur - prv).cross(nxt - cur).norm() > eps * scale) poly.push_back(on[i]);
                }
                for (int i : poly) used_vertex[i] = true;
                raw_faces.push_back(poly);
            }
    std::vector<int> remap(np, -1);
    for (int i = 0; i < np; ++i)
        if (used_vertex[i]) {
            remap[i] = static_cast<int>(h.vertices.size());
            h.vertices.push_back(p[i]);
        }
    double vol = 0.0;
    for (const auto& f : raw_faces) {
        std::vector<int> g;
        for (int i : f) g.push_back(remap[i]);
        h.faces.push_back(g);
        const Eigen::Vector3d a = p[f[0]].head<3>() - centroid;
        for (size_t i = 1; i + 1 < f.size(); ++i) {
            const Eigen::Vector3d b = p[f[i]].head<3>() - centroid, c = p[f[i + 1]].head<3>() - centroid;
            vol += a.dot(b.cross(c)) / 6.0;
        }
    }
    h.volume = std::abs(vol);
    return h;
}

} // namespace iqm
