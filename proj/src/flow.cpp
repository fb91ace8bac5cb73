#include "iqm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "iqm/numerics.hpp"

namespace iqm {

namespace {

Mat to_matrix(const Vec& v, int n1, int n2) {
    Mat m(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) m(i, j) = v(i * n2 + j);
    return m;
}

Vec to_vector(const Mat& m) {
    Vec v(m.size());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
    return v;
}

double gap_of(const RVec& r, int n1, int n2) {
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < r.size(); ++j) {
        for (int k = j + 1; k < r.size(); ++k) gap = std::min(gap, std::abs(r(j) * r(j) - r(k) * r(k)));
        if (std::max(n1, n2) > r.size()) gap = std::min(gap, r(j) * r(j));
    }
    return gap;
}

void check_gap(const RVec& r, int n1, int n2, double floor, double t) {
    const double g = gap_of(r, n1, n2);
    if (g <= floor) {
        std::ostringstream os;
        os << "polar flow: radii degenerate (min |r_j^2 - r_k^2| = " << g << ") at t = " << t;
        throw DegenerateError(os.str(), t);
    }
}

// Fast path of the flow shared by the ODE integrator: everything goes
// through G = Phi^H W conj(Psi), W the matricized H Gamma.
void flow_fast(const Vec& q, const Mat& phi, const Mat& psi, const Mat& h, double floor, double t,
               Vec& q_dot, Mat& phi_dot, Mat& psi_dot, RVec& e_diag) {
    const int n1 = static_cast<int>(phi.rows()), n2 = static_cast<int>(psi.rows());
    const int m = static_cast<int>(q.size());
    const RVec r = q.cwiseAbs();
    check_gap(r, n1, n2, floor, t);

    const Mat gm = phi * q.asDiagonal() * psi.transpose();
    const Mat w = to_matrix(h * to_vector(gm), n1, n2);
    const Mat g = phi.adjoint() * w * psi.conjugate();
    const cplx mi(0.0, -1.0);

    q_dot = mi * g.diagonal();
    phi_dot = Mat::Zero(n1, m);
    psi_dot = Mat::Zero(n2, m);
    for (int a = 0; a < m; ++a) {
        for (int k = 0; k < m; ++k) {
            if (k == a) continue;
            const double den = r(a) * r(a) - r(k) * r(k);
            const cplx beta_ka = mi * (std::conj(q(a)) * g(k, a) - q(k) * std::conj(g(a, k)));
            const cplx betap_ka = mi * (std::conj(q(a)) * g(a, k) - q(k) * std::conj(g(k, a)));
            phi_dot.col(a) += beta_ka / den * phi.col(k);
            psi_dot.col(a) += betap_ka / den * psi.col(k);
        }
    }
    if (n1 > m) {
        const Mat wpsi = w * psi.conjugate();
        const Mat perp = wpsi - phi * (phi.adjoint() * wpsi);
        for (int a = 0; a < m; ++a) phi_dot.col(a) += mi / q(a) * perp.col(a);
    }
    if (n2 > m) {
        const Mat wphi = w.transpose() * phi.conjugate();
        const Mat perp = wphi - psi * (psi.adjoint() * wphi);
        for (int a = 0; a < m; ++a) psi_dot.col(a) += mi / q(a) * perp.col(a);
    }
    e_diag.resize(m);
    for (int a = 0; a < m; ++a) {
        const Vec x = product_vector(phi.col(a), psi.col(a));
        e_diag(a) = x.dot(h * x).real();
    }
}

// Column permutation of `next` that best continues `prev_phi`/`prev_psi`:
// greedy on the summed overlap moduli.
std::vector<int> greedy_match(const Mat& prev_phi, const Mat& prev_psi, const Mat& next_phi,
                              const Mat& next_psi) {
    const int m = static_cast<int>(prev_phi.cols());
    const RMat ov = (prev_phi.adjoint() * next_phi).cwiseAbs() + (prev_psi.adjoint() * next_psi).cwiseAbs();
    std::vector<int> perm(m, -1);
    std::vector<bool> row_used(m, false), col_used(m, false);
    for (int step = 0; step < m; ++step) {
        double best = -1.0;
        int bi = 0, bj = 0;
        for (int i = 0; i < m; ++i) {
            if (row_used[i]) continue;
            for (int j = 0; j < m; ++j) {
                if (col_used[j]) continue;
                if (ov(i, j) > best) {
                    best = ov(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        perm[bi] = bj;
        row_used[bi] = col_used[bj] = true;
    }
    return perm;
}

struct SvdSample {
    RVec sigma;
    Mat phi;
    Mat psi;
};

SvdSample svd_sample(const Vec& gamma, int n1, int n2, int m) {
    Eigen::JacobiSVD<Mat> svd(to_matrix(gamma, n1, n2), Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdSample s;
    s.sigma = svd.singularValues().head(m);
    s.phi = svd.matrixU().leftCols(m);
    s.psi = svd.matrixV().leftCols(m).conjugate();
    return s;
}

RVec diag_energy(const Mat& h, const Mat& phi, const Mat& psi) {
    const int m = static_cast<int>(phi.cols());
    RVec e(m);
    for (int a = 0; a < m; ++a) {
        const Vec x = product_vector(phi.col(a), psi.col(a));
        e(a) = x.dot(h * x).real();
    }
    return e;
}

PolarFrame make_frame(const Vec& q, const Mat& phi, const Mat& psi) {
    PolarFrame f;
    f.q = q;
    f.phi = phi;
    f.psi = psi;
    f.degenerate_pairs = find_degenerate_pairs(f.radii());
    return f;
}

void push_outputs(PolarTrajectory& tr, const Vec& q0, const Mat& phi0, const Mat& psi0,
                  const RVec& ephase) {
    const int m = static_cast<int>(q0.size());
    Vec qh(m);
    Mat phih = phi0;
    for (int a = 0; a < m; ++a) {
        const cplx z = std::exp(cplx(0.0, ephase(a)));
        qh(a) = q0(a) * z;
        phih.col(a) *= std::conj(z);
    }
    tr.frames0.push_back(make_frame(q0, phi0, psi0));
    tr.frames.push_back(make_frame(qh, phih, psi0));
    tr.energy_phase.push_back(ephase);
}

int substeps_for(const EvolveOptions& opt, const HamiltonianSpec& h, double span) {
    if (opt.substeps > 0) return opt.substeps + (opt.substeps % 2);
    const double hn = std::max(h.norm_bound(), 1e-6);
    const double step = 0.25 * std::pow(opt.tol, 0.25) / hn;
    int n = static_cast<int>(std::ceil(std::abs(span) / step));
    n = std::max(n, 2);
    return n + (n % 2);
}

void evolve_ode(const StateVector& gamma0, const PolarFrame& frame0, const HamiltonianSpec& h,
                const std::vector<double>& times, const EvolveOptions& opt, PolarTrajectory& tr) {
    if (h.time_dependent())
        throw ValidationError("ode mode needs an autonomous Hamiltonian; use svd_transport");
    const int n1 = gamma0.space().n1, n2 = gamma0.space().n2;
    const int m = frame0.size();
    if (m != std::min(n1, n2))
        throw DegenerateError("ode mode needs full polar rank (zero radii are degenerate)", times.front());
    const Mat& hm = h.static_part();
    const int off_phi = m, off_psi = m + n1 * m, off_e = m + n1 * m + n2 * m;
    const int len = off_e + m;

    Vec y0(len);
    y0.head(m) = frame0.q;
    for (int a = 0; a < m; ++a) {
        y0.segment(off_phi + a * n1, n1) = frame0.phi.col(a);
        y0.segment(off_psi + a * n2, n2) = frame0.psi.col(a);
    }
    y0.tail(m).setZero();

    auto unpack = [&](const Vec& y, Vec& q, Mat& phi, Mat& psi) {
        q = y.head(m);
        phi.resize(n1, m);
        psi.resize(n2, m);
        for (int a = 0; a < m; ++a) {
            phi.col(a) = y.segment(off_phi + a * n1, n1);
            psi.col(a) = y.segment(off_psi + a * n2, n2);
        }
    };
    const double floor = opt.degeneracy_floor;
    auto rhs = [&](double t, const Vec& y) -> Vec {
        Vec q, qd;
        Mat phi, psi, phid, psid;
        RVec e;
        unpack(y, q, phi, psi);
        flow_fast(q, phi, psi, hm, floor, t, qd, phid, psid, e);
        Vec out(len);
        out.head(m) = qd;
        for (int a = 0; a < m; ++a) {
            out.segment(off_phi + a * n1, n1) = phid.col(a);
            out.segment(off_psi + a * n2, n2) = psid.col(a);
        }
        out.tail(m) = e.cast<cplx>();
        return out;
    };
    OdeOptions oo;
    oo.rtol = opt.tol;
    oo.atol = opt.tol;
    const auto ys = integrate_dopri5(rhs, times.front(), y0, times, oo);
    for (const Vec& y : ys) {
        Vec q;
        Mat phi, psi;
        unpack(y, q, phi, psi);
        push_outputs(tr, q, phi, psi, y.tail(m).real());
    }
    tr.gammas = schrodinger_evolve(gamma0, h, times, opt.tol).states;
}

void evolve_svd(const StateVector& gamma0, const PolarFrame& frame0, const HamiltonianSpec& h,
                const std::vector<double>& times, const EvolveOptions& opt, PolarTrajectory& tr) {
    const int n1 = gamma0.space().n1, n2 = gamma0.space().n2;
    const int m = frame0.size();

    // Fine-grid propagator: eigenbasis for constant H, RK otherwise.
    Eigen::SelfAdjointEigenSolver<Mat> es;
    Vec c0;
    if (!h.time_dependent()) {
        es.compute(h.static_part());
        c0 = es.eigenvectors().adjoint() * gamma0.amplitudes();
    }
    const double t0 = times.front();
    auto exact_at = [&](double t) -> Vec {
        Vec c(c0.size());
        for (Eigen::Index j = 0; j < c.size(); ++j)
            c(j) = c0(j) * std::exp(cplx(0.0, -es.eigenvalues()(j) * (t - t0)));
        return es.eigenvectors() * c;
    };

    SvdSample prev = svd_sample(gamma0.amplitudes(), n1, n2, m);
    {
        const auto perm = greedy_match(frame0.phi, frame0.psi, prev.phi, prev.psi);
        SvdSample r = prev;
        for (int a = 0; a < m; ++a) {
            r.sigma(a) = prev.sigma(perm[a]);
            r.phi.col(a) = prev.phi.col(perm[a]);
            r.psi.col(a) = prev.psi.col(perm[a]);
        }
        prev = r;
    }
    // Theta with phi0 = u exp(-i Theta); starts at the caller's gauge.
    RVec th_phi(m), th_psi(m), corr_phi = RVec::Zero(m), corr_psi = RVec::Zero(m);
    for (int a = 0; a < m; ++a) {
        th_phi(a) = std::arg(frame0.phi.col(a).dot(prev.phi.col(a)));
        th_psi(a) = std::arg(frame0.psi.col(a).dot(prev.psi.col(a)));
    }
    RVec ephase = RVec::Zero(m);

    auto emit = [&](const SvdSample& s) {
        Vec q0(m);
        Mat phi0 = s.phi, psi0 = s.psi;
        for (int a = 0; a < m; ++a) {
            const double tp = th_phi(a) + corr_phi(a), ts = th_psi(a) + corr_psi(a);
            phi0.col(a) *= std::exp(cplx(0.0, -tp));
            psi0.col(a) *= std::exp(cplx(0.0, -ts));
            q0(a) = s.sigma(a) * std::exp(cplx(0.0, tp + ts));
        }
        push_outputs(tr, q0, phi0, psi0, ephase);
    };
    emit(prev);
    tr.gammas.push_back(StateVector(gamma0.space(), gamma0.amplitudes(), 1e-9));

    Vec gamma = gamma0.amplitudes();
    OdeOptions oo;
    oo.rtol = opt.tol;
    oo.atol = opt.tol;
    for (size_t j = 0; j + 1 < times.size(); ++j) {
        const double ta = times[j], tb = times[j + 1];
        const int n = substeps_for(opt, h, tb - ta);
        std::vector<double> fine(n + 1);
        for (int i = 0; i <= n; ++i) fine[i] = ta + (tb - ta) * static_cast<double>(i) / n;
        fine[n] = tb;

        std::vector<Vec> gs(n + 1);
        gs[0] = gamma;
        if (h.time_dependent()) {
            const std::vector<double> rest(fine.begin() + 1, fine.end());
            auto rhs = [&h](double t, const Vec& y) -> Vec { return cplx(0.0, -1.0) * h.apply(t, y); };
            const auto ys = integrate_dopri5(rhs, ta, gamma, rest, oo);
            for (int i = 1; i <= n; ++i) gs[i] = ys[i - 1];
        } else {
            for (int i = 1; i <= n; ++i) gs[i] = exact_at(fine[i]);
        }

        std::vector<RVec> energies(n + 1);
        energies[0] = diag_energy(h.value_at(ta), prev.phi, prev.psi);
        RVec fine_phi = RVec::Zero(m), fine_psi = RVec::Zero(m);
        RVec pair_phi = RVec::Zero(m), pair_psi = RVec::Zero(m);
        RVec rich_phi = RVec::Zero(m), rich_psi = RVec::Zero(m);
        SvdSample even = prev;
        for (int i = 1; i <= n; ++i) {
            const SvdSample raw = svd_sample(gs[i], n1, n2, m);
            const auto perm = greedy_match(prev.phi, prev.psi, raw.phi, raw.psi);
            SvdSample cur = raw;
            for (int a = 0; a < m; ++a) {
                cur.sigma(a) = raw.sigma(perm[a]);
                cur.phi.col(a) = raw.phi.col(perm[a]);
                cur.psi.col(a) = raw.psi.col(perm[a]);
            }
            for (int a = 0; a < m; ++a) {
                const double dp = std::arg(prev.phi.col(a).dot(cur.phi.col(a)));
                const double ds = std::arg(prev.psi.col(a).dot(cur.psi.col(a)));
                fine_phi(a) += dp;
                fine_psi(a) += ds;
                pair_phi(a) += dp;
                pair_psi(a) += ds;
                if (i % 2 == 0) {
                    // the raw SVD gauge jumps between samples, so the two-step
                    // angle may differ from the pair sum by 2 pi
                    const double cp = std::arg(even.phi.col(a).dot(cur.phi.col(a)));
                    const double cs = std::arg(even.psi.col(a).dot(cur.psi.col(a)));
                    rich_phi(a) += std::remainder(pair_phi(a) - cp, 2.0 * std::numbers::pi);
                    rich_psi(a) += std::remainder(pair_psi(a) - cs, 2.0 * std::numbers::pi);
                    pair_phi(a) = pair_psi(a) = 0.0;
                }
            }
            if (i % 2 == 0) even = cur;
            energies[i] = diag_energy(h.value_at(fine[i]), cur.phi, cur.psi);
            prev = cur;
        }
        // composite Simpson over the block (n even, uniform)
        const double dt = (tb - ta) / n;
        RVec block = energies[0] + energies[n];
        for (int i = 1; i < n; ++i) block += (i % 2 ? 4.0 : 2.0) * energies[i];
        ephase += block * (dt / 3.0);

        // discrete transport error is even in the step: one Richardson step
        th_phi += fine_phi;
        th_psi += fine_psi;
        corr_phi += rich_phi / 3.0;
        corr_psi += rich_psi / 3.0;

        gamma = gs[n];
        emit(prev);
        tr.gammas.push_back(StateVector(gamma0.space(), gamma, 1e-9));
    }
}

} // namespace

CouplingMatrix coupling_elements(const Mat& h, const PolarFrame& f) {
    const int n1 = static_cast<int>(f.phi.rows()), n2 = static_cast<int>(f.psi.rows());
    if (h.rows() != n1 * n2 || h.cols() != n1 * n2) throw DimensionError("coupling: H does not match frame");
    const int m = f.size();
    Mat x(n1 * n2, m * m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) x.col(j * m + k) = product_vector(f.phi.col(j), f.psi.col(k));
    CouplingMatrix c;
    c.m = m;
    c.entries = x.adjoint() * h * x;
    return c;
}

std::pair<Mat, Mat> beta_matrices(const CouplingMatrix& c, const Vec& q) {
    const int m = c.m;
    if (q.size() != m) throw DimensionError("beta: q length differs from frame");
    Mat beta(m, m), betap(m, m);
    const cplx mi(0.0, -1.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            cplx s1 = 0, s2 = 0, s3 = 0, s4 = 0;
            for (int k = 0; k < m; ++k) {
                s1 += q(k) * c(a, b, k, k);
                s2 += std::conj(q(k)) * c(k, k, b, a);
                s3 += q(k) * c(b, a, k, k);
                s4 += std::conj(q(k)) * c(k, k, a, b);
            }
            beta(a, b) = mi * (std::conj(q(b)) * s1 - q(a) * s2);
            betap(a, b) = mi * (std::conj(q(b)) * s3 - q(a) * s4);
        }
    return {beta, betap};
}

std::pair<Mat, Mat> beta_matrices(const PolarFrame& frame, const Mat& h, const Vec& q) {
    return beta_matrices(coupling_elements(h, frame), q);
}

double radii_gap(const PolarFrame& f) {
    return gap_of(f.radii(), static_cast<int>(f.phi.rows()), static_cast<int>(f.psi.rows()));
}

FrameDerivative flow_rhs(const PolarFrame& f, const Mat& h, double floor, double t) {
    const int n1 = static_cast<int>(f.phi.rows()), n2 = static_cast<int>(f.psi.rows());
    const int m = f.size();
    const RVec r = f.radii();
    check_gap(r, n1, n2, floor, t);
    const CouplingMatrix c = coupling_elements(h, f);
    const auto [beta, betap] = beta_matrices(c, f.q);

    FrameDerivative d;
    d.q_dot.resize(m);
    for (int a = 0; a < m; ++a) {
        cplx s = 0;
        for (int k = 0; k < m; ++k) s += c(a, a, k, k) * f.q(k);
        d.q_dot(a) = cplx(0.0, -1.0) * s;
    }
    d.phi_dot = Mat::Zero(n1, m);
    d.psi_dot = Mat::Zero(n2, m);
    for (int a = 0; a < m; ++a)
        for (int k = 0; k < m; ++k) {
            if (k == a) continue;
            const double den = r(a) * r(a) - r(k) * r(k);
            d.phi_dot.col(a) += beta(k, a) / den * f.phi.col(k);
            d.psi_dot.col(a) += betap(k, a) / den * f.psi.col(k);
        }
    if (n1 > m || n2 > m) {
        // complement vectors have zero radius: beta_{ka} = -i conj(q_a) <phi_k (x) psi_a, H Gamma>
        const Vec hg = h * reconstruct_amplitudes(f);
        const Mat w = to_matrix(hg, n1, n2);
        const cplx mi(0.0, -1.0);
        if (n1 > m) {
            const Mat wpsi = w * f.psi.conjugate();
            const Mat perp = wpsi - f.phi * (f.phi.adjoint() * wpsi);
            for (int a = 0; a < m; ++a) d.phi_dot.col(a) += mi / f.q(a) * perp.col(a);
        }
        if (n2 > m) {
            const Mat wphi = w.transpose() * f.phi.conjugate();
            const Mat perp = wphi - f.psi * (f.psi.adjoint() * wphi);
            for (int a = 0; a < m; ++a) d.psi_dot.col(a) += mi / f.q(a) * perp.col(a);
        }
    }
    return d;
}

const char* to_string(FlowMode mode) { return mode == FlowMode::ode ? "ode" : "svd_transport"; }

FlowMode flow_mode_from_string(const std::string& s) {
    if (s == "ode") return FlowMode::ode;
    if (s == "svd" || s == "svd_transport") return FlowMode::svd_transport;
    throw ValidationError("unknown mode '" + s + "' (expected ode or svd)");
}

PolarTrajectory evolve_polar(const StateVector& gamma0, const PolarFrame& frame0,
                             const HamiltonianSpec& h, const std::vector<double>& times,
                             const EvolveOptions& opt) {
    if (times.empty()) throw ValidationError("evolve_polar: no output times");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError("evolve_polar: times must increase");
    if (!(opt.tol > 0.0)) throw ValidationError("evolve_polar: tolerance must be positive");
    if (h.dim() != gamma0.dim()) throw DimensionError("evolve_polar: H and state dimensions differ");
    if (frame0.phi.rows() != gamma0.space().n1 || frame0.psi.rows() != gamma0.space().n2)
        throw DimensionError("evolve_polar: frame does not match the space");
    validate_frame(frame0);
    if ((reconstruct_amplitudes(frame0) - gamma0.amplitudes()).norm() > 1e-10)
        throw ValidationError("evolve_polar: frame0 does not decompose gamma0");

    PolarTrajectory tr;
    tr.mode = opt.mode;
    tr.space = gamma0.space();
    tr.times = times;
    if (opt.mode == FlowMode::ode)
        evolve_ode(gamma0, frame0, h, times, opt, tr);
    else
        evolve_svd(gamma0, frame0, h, times, opt, tr);
    for (size_t i = 0; i < times.size(); ++i)
        tr.max_reconstruct_residual =
            std::max(tr.max_reconstruct_residual,
                     (reconstruct_amplitudes(tr.frames[i]) - tr.gammas[i].amplitudes()).norm());
    return tr;
}

InteractionPhases interaction_phases(const PolarTrajectory& traj, const HamiltonianSpec& h) {
    if (!h.split()) throw ValidationError("interaction_phases: Hamiltonian has no split");
    const Mat& h0 = h.split()->h0;
    InteractionPhases out;
    out.times = traj.times;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const PolarFrame& f = traj.frames[i];
        const Vec& g = traj.gammas[i].amplitudes();
        const Vec h0g = h0 * g;
        const double total = g.dot(h0g).real();
        const int m = f.size();
        RVec ups(m), rd(m);
        for (int k = 0; k < m; ++k) {
            const Vec gk = product_vector(f.phi.col(k), f.psi.col(k));
            ups(k) = total - gk.dot(h0 * gk).real();
            const double r = std::abs(f.q(k));
            const cplx zeta = r > 0.0 ? f.q(k) / r : cplx(1.0);
            // sum_k H0'_{jj,kk} r_k = conj(zeta_j) <Gamma_j, H0 Gamma>
            rd(k) = (std::conj(zeta) * gk.dot(h0g)).imag();
        }
        out.upsilon.push_back(ups);
        out.r_dot.push_back(rd);
    }
    return out;
}

HamiltonianSplit split_hamiltonian(const Mat& h, int n1, int n2) {
    require_hermitian(h, "Hamiltonian", 1e-10);
    if (h.rows() != n1 * n2) throw DimensionError("split: H dimension is not n1*n2");
    HamiltonianSplit s;
    s.n1 = n1;
    s.n2 = n2;
    s.h1 = partial_trace_1(h, n1, n2) / static_cast<double>(n2);
    Mat b = partial_trace_2(h, n1, n2) / static_cast<double>(n1);
    b -= (b.trace() / static_cast<double>(n2)) * Mat::Identity(n2, n2);
    s.h2 = b;
    s.h0 = h - kron(s.h1, Mat::Identity(n2, n2)) - kron(Mat::Identity(n1, n1), s.h2);
    return s;
}

EigenDerivative eigenvector_derivatives(const Mat& rho, const Mat& rho_dot) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    const int n = static_cast<int>(rho.rows());
    EigenDerivative d;
    d.values = es.eigenvalues().reverse();
    d.vectors = es.eigenvectors().rowwise().reverse();
    d.derivatives = Mat::Zero(n, n);
    const Mat b = d.vectors.adjoint() * rho_dot * d.vectors;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double den = d.values(j) - d.values(k);
            if (std::abs(den) < kFlowDegeneracyFloor)
                throw DegenerateError("eigenvector derivative: degenerate eigenvalues");
            d.derivatives.col(j) += b(k, j) / den * d.vectors.col(k);
        }
    return d;
}

} // namespace iqm
