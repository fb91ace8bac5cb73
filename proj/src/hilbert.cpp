#include "iqm/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>

namespace iqm {

BipartiteSpace::BipartiteSpace(int a, int b) : n1(a), n2(b) {
    if (a < 1 || b < 1) throw ValidationError("factor dimensions must be positive");
}

StateVector::StateVector(BipartiteSpace space, Vec amplitudes, double norm_tol)
    : space_(space), amp_(std::move(amplitudes)) {
    if (amp_.size() != space_.dim()) {
        std::ostringstream os;
        os << "state has " << amp_.size() << " amplitudes, space needs " << space_.dim();
        throw DimensionError(os.str());
    }
    const double nrm = amp_.norm();
    if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > norm_tol) {
        std::ostringstream os;
        os << "state not normalized: |Gamma| = " << nrm;
        throw ValidationError(os.str());
    }
}

StateVector StateVector::normalized(BipartiteSpace space, Vec amplitudes) {
    const double nrm = amplitudes.norm();
    if (!(nrm > 0.0)) throw ValidationError("cannot normalize the zero vector");
    return StateVector(space, amplitudes / nrm);
}

Mat StateVector::matricize() const {
    Mat m(space_.n1, space_.n2);
    for (int i = 0; i < space_.n1; ++i)
        for (int j = 0; j < space_.n2; ++j) m(i, j) = amp_(i * space_.n2 + j);
    return m;
}

std::vector<std::pair<int, int>> find_degenerate_pairs(const RVec& radii, double tol) {
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j < radii.size(); ++j)
        for (int k = j + 1; k < radii.size(); ++k)
            if (std::abs(radii(j) - radii(k)) < tol) out.emplace_back(j, k);
    return out;
}

void validate_frame(const PolarFrame& f, double tol) {
    const int m = f.size();
    if (f.phi.cols() != m || f.psi.cols() != m)
        throw DimensionError("frame: q, phi, psi lengths differ");
    const Mat id = Mat::Identity(m, m);
    if ((f.phi.adjoint() * f.phi - id).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("frame: phi not orthonormal");
    if ((f.psi.adjoint() * f.psi - id).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("frame: psi not orthonormal");
    if (std::abs(f.q.squaredNorm() - 1.0) > tol)
        throw ValidationError("frame: sum |q_k|^2 != 1");
}

DensityOperator::DensityOperator(Mat m, bool unit_trace, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw DimensionError("density operator must be square and non-empty");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("density operator not Hermitian");
    const double tr = m_.trace().real();
    if (unit_trace ? std::abs(tr - 1.0) > tol : tr > 1.0 + tol)
        throw ValidationError("density operator trace out of range");
    if (eigenvalues().minCoeff() < -tol)
        throw ValidationError("density operator not positive");
}

RVec DensityOperator::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

PolarFrame polar_decompose(const StateVector& gamma) {
    const Mat mtx = gamma.matricize();
    Eigen::JacobiSVD<Mat> svd(mtx, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& sv = svd.singularValues();
    const double cut = kRankCutoff * sv(0);
    int m = 0;
    while (m < sv.size() && sv(m) > cut) ++m;

    PolarFrame f;
    f.q.resize(m);
    f.phi.resize(gamma.space().n1, m);
    f.psi.resize(gamma.space().n2, m);
    for (int k = 0; k < m; ++k) {
        Vec phi = svd.matrixU().col(k);
        Vec psi = svd.matrixV().col(k).conjugate();
        Eigen::Index p = 0;
        const double big = phi.cwiseAbs().maxCoeff();
        while (std::abs(phi(p)) < big * (1.0 - 1e-12)) ++p;
        const cplx ph = phi(p) / std::abs(phi(p));
        f.phi.col(k) = phi * std::conj(ph);
        f.psi.col(k) = psi * ph;
        f.q(k) = sv(k);
    }
    f.degenerate_pairs = find_degenerate_pairs(f.radii());
    return f;
}

Vec product_vector(const Vec& phi, const Vec& psi) {
    Vec out(phi.size() * psi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        out.segment(i * psi.size(), psi.size()) = phi(i) * psi;
    return out;
}

Vec reconstruct_amplitudes(const PolarFrame& f) {
    // Gamma as a matrix is Phi diag(q) Psi^T.
    const Mat m = f.phi * f.q.asDiagonal() * f.psi.transpose();
    Vec out(m.size());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
    return out;
}

StateVector reconstruct(const PolarFrame& f, const BipartiteSpace& space, double norm_tol) {
    if (f.phi.rows() != space.n1 || f.psi.rows() != space.n2)
        throw DimensionError("frame dimensions do not match the space");
    return StateVector(space, reconstruct_amplitudes(f), norm_tol);
}

DensityOperator reduced_trace(const StateVector& gamma, int side) {
    const Mat m = gamma.matricize();
    Mat rho;
    if (side == 1)
        rho = m * m.adjoint();
    else if (side == 2)
        rho = m.transpose() * m.conjugate();
    else
        throw ValidationError("side must be 1 or 2");
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityOperator(rho, true, 1e-10);
}

std::pair<Mat, Mat> moment_map(const StateVector& gamma) {
    const cplx c(0.0, -0.5);
    return {c * reduced_trace(gamma, 1).matrix(), c * reduced_trace(gamma, 2).matrix()};
}

DensityOperator luders_update(const DensityOperator& rho0, const std::vector<Mat>& proj,
                              double tol) {
    const int d = rho0.dim();
    Mat sum = Mat::Zero(d, d);
    for (size_t a = 0; a < proj.size(); ++a) {
        const Mat& p = proj[a];
        if (p.rows() != d || p.cols() != d) throw DimensionError("projector dimension mismatch");
        if ((p * p - p).cwiseAbs().maxCoeff() > tol || (p - p.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw ValidationError("not an orthogonal projection");
        for (size_t b = a + 1; b < proj.size(); ++b)
            if ((p * proj[b]).cwiseAbs().maxCoeff() > tol)
                throw ValidationError("projectors not mutually orthogonal");
        sum += p;
    }
    Mat out = Mat::Zero(d, d);
    for (const Mat& p : proj) out += p * rho0.matrix() * p;
    const bool complete = (sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityOperator(out, complete && std::abs(rho0.trace() - 1.0) <= 1e-12, 1e-10);
}

StateVector rebipartition(const StateVector& gamma, const std::vector<int>& dims,
                          const std::vector<int>& left_set) {
    const int nf = static_cast<int>(dims.size());
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw DimensionError("factor dimensions must be positive");
        total *= d;
    }
    if (total != gamma.dim()) throw DimensionError("factor dims do not multiply to the state dimension");
    std::vector<bool> in_left(nf, false);
    for (int a : left_set) {
        if (a < 0 || a >= nf || in_left[a]) throw ValidationError("bad left_set index");
        in_left[a] = true;
    }
    if (left_set.empty() || static_cast<int>(left_set.size()) == nf)
        throw ValidationError("left_set must be a non-empty proper subset");

    std::vector<int> order;
    for (int a = 0; a < nf; ++a)
        if (in_left[a]) order.push_back(a);
    int nl = 1;
    for (int a : order) nl *= dims[a];
    for (int a = 0; a < nf; ++a)
        if (!in_left[a]) order.push_back(a);

    // strides of the source (row-major over factors)
    std::vector<long> stride(nf, 1);
    for (int a = nf - 2; a >= 0; --a) stride[a] = stride[a + 1] * dims[a + 1];

    Vec out(total);
    std::vector<int> idx(nf, 0); // multi-index in the new order
    for (long lin = 0; lin < total; ++lin) {
        long src = 0;
        for (int p = 0; p < nf; ++p) src += idx[p] * stride[order[p]];
        out(lin) = gamma.amplitudes()(src);
        for (int p = nf - 1; p >= 0; --p) {
            if (++idx[p] < dims[order[p]]) break;
            idx[p] = 0;
        }
    }
    return StateVector(BipartiteSpace(nl, static_cast<int>(total / nl)), out,
                       std::max(kNormTol, std::abs(gamma.amplitudes().norm() - 1.0)));
}

Mat partial_trace_1(const Mat& a, int n1, int n2) {
    Mat out = Mat::Zero(n1, n1);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k) out(i, j) += a(i * n2 + k, j * n2 + k);
    return out;
}

Mat partial_trace_2(const Mat& a, int n1, int n2) {
    Mat out = Mat::Zero(n2, n2);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n1; ++k) out(i, j) += a(k * n2 + i, k * n2 + j);
    return out;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace iqm
