#include "iqm/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace iqm {

namespace {

struct Probe {
    bool ok = false;  // false when the interpolated radii are degenerate
    LocateDetail detail;
};

Probe probe(const RVec& r, const RVec& theta, const TrackOptions& opt) {
    Probe p;
    try {
        const RightToroid t(std::vector<double>(r.data(), r.data() + r.size()), opt.distinct_tol);
        RVec arc(r.size());
        for (Eigen::Index k = 0; k < r.size(); ++k) arc(k) = r(k) * theta(k);
        p.detail = locate_detail(make_point(t, arc), t, opt.boundary_tol);
        p.ok = true;
    } catch (const DegenerateError&) {
        p.ok = false;
    }
    return p;
}

double min_gap(const RVec& r) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < r.size(); ++j)
        for (Eigen::Index k = j + 1; k < r.size(); ++k) g = std::min(g, std::abs(r(j) - r(k)));
    return g;
}

RVec wrapped_step(const RVec& a, const RVec& b) {
    RVec d = b - a;
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::remainder(d(k), 2.0 * std::numbers::pi);
    return d;
}

std::vector<int> inverse(const std::vector<int>& p) {
    std::vector<int> inv(p.size());
    for (size_t j = 0; j < p.size(); ++j) inv[p[j]] = static_cast<int>(j);
    return inv;
}

} // namespace

Continuation continue_through_degeneracy(const PolarFrame& before, const PolarFrame& after,
                                         double ambiguity_tol) {
    const int m = before.size();
    if (after.size() != m || before.phi.rows() != after.phi.rows() || before.psi.rows() != after.psi.rows())
        throw DimensionError("frames on both sides of a crossing must have equal shapes");
    RMat score(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            score(j, k) = std::abs(before.phi.col(j).dot(after.phi.col(k))) +
                          std::abs(before.psi.col(j).dot(after.psi.col(k)));

    Continuation c;
    c.permutation.resize(m);
    std::iota(c.permutation.begin(), c.permutation.end(), 0);
    if (m <= 1) return c;

    double best = -1.0, second = -1.0;
    std::vector<int> best_p;
    if (m <= 8) {
        std::vector<int> p(m);
        std::iota(p.begin(), p.end(), 0);
        do {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += score(j, p[j]);
            if (s > best) {
                second = best;
                best = s;
                best_p = p;
            } else if (s > second) {
                second = s;
            }
        } while (std::next_permutation(p.begin(), p.end()));
    } else {
        // greedy on the largest remaining overlap; ambiguity judged per pick
        std::vector<bool> row(m, false), col(m, false);
        best_p.assign(m, -1);
        second = -std::numeric_limits<double>::infinity();
        best = 0.0;
        for (int it = 0; it < m; ++it) {
            double b1 = -1.0, b2 = -1.0;
            int bj = -1, bk = -1;
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    if (row[j] || col[k]) continue;
                    if (score(j, k) > b1) {
                        b2 = b1;
                        b1 = score(j, k);
                        bj = j;
                        bk = k;
                    } else if (score(j, k) > b2) {
                        b2 = score(j, k);
                    }
                }
            row[bj] = col[bk] = true;
            best_p[bj] = bk;
            if (b2 >= 0.0 && b1 - b2 < ambiguity_tol) c.ambiguous = true;
        }
        if (!c.ambiguous) c.permutation = best_p;
        return c;
    }
    if (best - second < ambiguity_tol) {
        c.ambiguous = true;
        return c;
    }
    c.permutation = best_p;
    return c;
}

LabelTimeline track_labels(const std::vector<double>& times, const std::vector<PolarFrame>& frames,
                           const TrackOptions& opt) {
    const size_t count = times.size();
    if (frames.size() != count) throw DimensionError("times and frames differ in length");
    if (count == 0) throw ValidationError("empty trajectory");
    for (size_t i = 1; i < count; ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError("sample times must increase");
    const int m = frames[0].size();
    for (const auto& f : frames)
        if (f.size() != m) throw DimensionError("frame size changes along the trajectory");

    LabelTimeline tl;
    tl.times = times;
    tl.labels.assign(count, -1);
    tl.on_boundary.assign(count, false);
    tl.degenerate.assign(count, false);

    std::vector<RVec> r(count), th(count);
    std::vector<int> raw(count, -1);
    for (size_t i = 0; i < count; ++i) {
        r[i] = frames[i].q.cwiseAbs();
        th[i].resize(m);
        for (int k = 0; k < m; ++k) th[i](k) = std::arg(frames[i].q(k));
        if (min_gap(r[i]) < opt.distinct_tol) {
            tl.degenerate[i] = true;
            continue;
        }
        const Probe p = probe(r[i], th[i], opt);
        raw[i] = p.detail.label.k;
        tl.on_boundary[i] = p.detail.label.on_boundary;
    }

    std::vector<int> cont(m);
    std::iota(cont.begin(), cont.end(), 0);
    tl.permutation.assign(count, cont);
    const double dt_typ = count > 1 ? (times.back() - times.front()) / static_cast<double>(count - 1) : 0.0;
    const double window = std::max(opt.bridge_samples * dt_typ, opt.bridge_time);

    auto continued = [&](int frame_label) { return inverse(cont)[frame_label]; };

    size_t i = 0;
    while (i < count && tl.degenerate[i]) ++i;
    if (i == count) {
        tl.permanent_degeneracy = true;
        tl.permanent_from = times.front();
        return tl;
    }
    if (i > 0 && times[i] - times.front() > window) {
        tl.permanent_degeneracy = true;
        tl.permanent_from = times.front();
        return tl;
    }
    tl.labels[i] = continued(raw[i]);
    for (size_t j = 0; j < i; ++j) tl.permutation[j] = cont;

    while (i + 1 < count) {
        size_t nxt = i + 1;
        if (tl.degenerate[nxt]) {
            while (nxt < count && tl.degenerate[nxt]) ++nxt;
            if (nxt == count || times[nxt] - times[i] > window) {
                tl.permanent_degeneracy = true;
                tl.permanent_from = times[i + 1];
                for (size_t j = i + 1; j < count; ++j) tl.permutation[j] = cont;
                return tl;
            }
            const Continuation c = continue_through_degeneracy(frames[i], frames[nxt]);
            std::vector<int> updated(m);
            for (int a = 0; a < m; ++a) updated[a] = c.permutation[cont[a]];
            cont = updated;
            tl.bridged.push_back({times[i + 1], times[nxt - 1]});
            for (size_t j = i + 1; j < nxt; ++j) tl.permutation[j] = cont;
            tl.permutation[nxt] = cont;
            tl.labels[nxt] = continued(raw[nxt]);
            if (tl.labels[nxt] != tl.labels[i])
                tl.jumps.push_back({0.5 * (times[i] + times[nxt]), tl.labels[i], tl.labels[nxt], "degeneracy"});
            i = nxt;
            continue;
        }

        // probe the interpolated step, then bisect every label change
        const RVec dr = r[nxt] - r[i];
        const RVec dth = wrapped_step(th[i], th[nxt]);
        auto at = [&](double s) { return probe(r[i] + s * dr, th[i] + s * dth, opt); };
        const int P = std::max(opt.probe_points, 1);
        double s_prev = 0.0;
        int k_prev = raw[i];
        for (int j = 1; j <= P; ++j) {
            const double s = static_cast<double>(j) / P;
            const Probe pj = j == P ? Probe{true, {}} : at(s);
            const int kj = j == P ? raw[nxt] : (pj.ok ? pj.detail.label.k : -1);
            if (kj == k_prev || kj < 0) {
                if (kj >= 0) s_prev = s;
                continue;
            }
            double lo = s_prev, hi = s;
            std::string kind = "degeneracy";
            bool crossed_degenerate = false;
            while (hi - lo > opt.time_tol) {
                const double mid = 0.5 * (lo + hi);
                const Probe pm = at(mid);
                if (!pm.ok) {
                    crossed_degenerate = true;
                    break;
                }
                if (pm.detail.label.k == k_prev)
                    lo = mid;
                else
                    hi = mid;
            }
            if (!crossed_degenerate) {
                const Probe pe = at(0.5 * (lo + hi));
                if (pe.ok) kind = pe.detail.slab_gap <= pe.detail.sort_gap ? "slab" : "simplex";
            }
            const double te = times[i] + 0.5 * (lo + hi) * (times[nxt] - times[i]);
            tl.jumps.push_back({te, continued(k_prev), continued(kj), kind});
            k_prev = kj;
            s_prev = s;
        }
        tl.permutation[nxt] = cont;
        tl.labels[nxt] = continued(raw[nxt]);
        i = nxt;
    }
    return tl;
}

LabelTimeline track_labels(const PolarTrajectory& traj, const TrackOptions& opt) {
    return track_labels(traj.times, traj.frames, opt);
}

ToroidPoint point_from_phases(const PolarFrame& frame, const RVec& theta) {
    if (theta.size() != frame.size()) throw DimensionError("one phase per frame vector expected");
    const RightToroid t = RightToroid::from_amplitudes(frame.q);
    RVec arc(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) arc(k) = t.radius(static_cast<int>(k)) * theta(k);
    return make_point(t, arc);
}

ConditionalState conditional_state(const PolarFrame& frame, const ToroidPoint& point, int side) {
    if (side != 1 && side != 2) throw ValidationError("side must be 1 or 2");
    const RightToroid t = RightToroid::from_amplitudes(frame.q);
    const PartitionLabel l = locate(point, t);
    ConditionalState cs;
    cs.subsystem = {side - 1};
    cs.k = l.k;
    cs.on_boundary = l.on_boundary;
    cs.ray = side == 1 ? Vec(frame.phi.col(l.k)) : Vec(frame.psi.col(l.k));
    cs.provenance.push_back({{0, 1}, {side - 1}, l.k, l.on_boundary});
    return cs;
}

ConditionalState conditional_state(const StateVector& gamma, const ToroidPoint& point, int side) {
    return conditional_state(polar_decompose(gamma), point, side);
}

ConditionalState iterate_conditional(const Vec& gamma, const std::vector<int>& factor_dims,
                                     const std::vector<std::vector<int>>& chain,
                                     const std::vector<std::optional<ToroidPoint>>& points,
                                     double product_tol) {
    if (chain.empty()) throw ValidationError("conditioning chain is empty");
    if (!points.empty() && points.size() != chain.size())
        throw ValidationError("one (optional) point per stage expected");
    long dim = 1;
    for (int d : factor_dims) {
        if (d < 1) throw ValidationError("factor dimensions must be positive");
        dim *= d;
    }
    if (gamma.size() != dim) throw DimensionError("state size differs from the product of factor dimensions");

    std::vector<int> current(factor_dims.size());
    std::iota(current.begin(), current.end(), 0);
    std::vector<int> dims = factor_dims;
    Vec ray = gamma / gamma.norm();

    ConditionalState out;
    for (size_t s = 0; s < chain.size(); ++s) {
        const auto& keep = chain[s];
        std::vector<int> local;
        for (int f : keep) {
            const auto it = std::find(current.begin(), current.end(), f);
            if (it == current.end()) {
                std::ostringstream os;
                os << "stage " << s << " conditions on factor " << f << " outside the current subsystem";
                throw ValidationError(os.str());
            }
            local.push_back(static_cast<int>(it - current.begin()));
        }
        std::sort(local.begin(), local.end());
        local.erase(std::unique(local.begin(), local.end()), local.end());
        if (local.empty() || local.size() == current.size())
            throw ValidationError("each stage must split the current subsystem");

        const StateVector cut = rebipartition(StateVector(BipartiteSpace(1, static_cast<int>(dim)), ray, 1e-9),
                                              dims, local);
        const PolarFrame frame = polar_decompose(cut);
        if (s > 0 && frame.size() > 1 && std::abs(frame.q(1)) > product_tol) {
            std::ostringstream os;
            os << "stage " << s << " input is entangled across the requested cut (second radius " << std::abs(frame.q(1))
               << ")";
            throw Error("non_product", os.str());
        }
        ToroidPoint pt;
        if (!points.empty() && points[s])
            pt = *points[s];
        else
            pt.arc = RVec::Zero(frame.size());  // phase 0 gauge
        const ConditionalState cs = conditional_state(frame, pt, 1);

        std::vector<int> kept, dkept;
        for (int j : local) {
            kept.push_back(current[j]);
            dkept.push_back(dims[j]);
        }
        out.provenance.push_back({current, kept, cs.k, cs.on_boundary});
        out.k = cs.k;
        out.on_boundary = cs.on_boundary;
        ray = cs.ray;
        current = kept;
        dims = dkept;
        dim = ray.size();
    }
    out.subsystem = current;
    out.ray = ray;
    return out;
}

} // namespace iqm
