#include "iqm/connection.hpp"

#include <cmath>
#include <sstream>

#include "iqm/numerics.hpp"

namespace iqm {

void require_hermitian(const Mat& h, const char* what, double tol) {
    if (h.rows() != h.cols()) throw DimensionError(std::string(what) + " is not square");
    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol) {
        std::ostringstream os;
        os << what << " not Hermitian (deviation " << dev << ")";
        throw ValidationError(os.str());
    }
}

Mat HamiltonianSplit::assemble() const {
    return h0 + kron(h1, Mat::Identity(n2, n2)) + kron(Mat::Identity(n1, n1), h2);
}

HamiltonianSpec HamiltonianSpec::constant(Mat h, std::optional<HamiltonianSplit> split) {
    require_hermitian(h, "Hamiltonian");
    HamiltonianSpec s;
    s.static_ = std::move(h);
    if (split) {
        if (split->n1 * split->n2 != s.dim()) throw DimensionError("split dimensions mismatch");
        require_hermitian(split->h0, "H0");
        require_hermitian(split->h1, "H1");
        require_hermitian(split->h2, "H2");
        if ((split->assemble() - s.static_).cwiseAbs().maxCoeff() > 1e-10)
            throw ValidationError("split does not reassemble to H");
        s.split_ = std::move(split);
    }
    return s;
}

HamiltonianSpec HamiltonianSpec::from_split(const HamiltonianSplit& split) {
    return constant(split.assemble(), split);
}

HamiltonianSpec HamiltonianSpec::sinusoidal(Mat h_static, Mat h_drive, double omega, double phase) {
    require_hermitian(h_static, "Hamiltonian");
    require_hermitian(h_drive, "drive");
    if (h_drive.rows() != h_static.rows()) throw DimensionError("drive dimension mismatch");
    HamiltonianSpec s;
    s.static_ = std::move(h_static);
    s.drive_ = Drive{std::move(h_drive), omega, phase};
    return s;
}

Mat HamiltonianSpec::value_at(double t) const {
    if (!drive_) return static_;
    return static_ + std::sin(drive_->omega * t + drive_->phase) * drive_->h;
}

Vec HamiltonianSpec::apply(double t, const Vec& v) const {
    if (!drive_) return static_ * v;
    return static_ * v + std::sin(drive_->omega * t + drive_->phase) * (drive_->h * v);
}

double HamiltonianSpec::norm_bound() const {
    auto opnorm = [](const Mat& m) {
        if (m.size() == 0) return 0.0;
        Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    };
    return opnorm(static_) + (drive_ ? opnorm(drive_->h) : 0.0);
}

std::vector<Vec> StatePath::amplitudes() const {
    std::vector<Vec> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.amplitudes());
    return out;
}

StatePath schrodinger_evolve(const StateVector& gamma0, const HamiltonianSpec& h,
                             const std::vector<double>& times, double tol) {
    if (h.dim() != gamma0.dim()) throw DimensionError("Hamiltonian and state dimensions differ");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    StatePath path;
    path.times = times;
    if (times.empty()) return path;
    const double t0 = times.front();
    if (!h.time_dependent()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(h.static_part());
        const Mat& v = es.eigenvectors();
        const Vec c0 = v.adjoint() * gamma0.amplitudes();
        for (double t : times) {
            Vec c(c0.size());
            for (Eigen::Index j = 0; j < c.size(); ++j)
                c(j) = c0(j) * std::exp(cplx(0.0, -es.eigenvalues()(j) * (t - t0)));
            path.states.emplace_back(gamma0.space(), v * c, 1e-9);
        }
        return path;
    }
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    auto rhs = [&h](double t, const Vec& y) -> Vec { return cplx(0.0, -1.0) * h.apply(t, y); };
    const auto ys = integrate_dopri5(rhs, t0, gamma0.amplitudes(), times, opt);
    for (const Vec& y : ys) path.states.emplace_back(gamma0.space(), y, 1e-9);
    return path;
}

namespace {

Vec central_derivative(const std::vector<double>& t, const std::vector<Vec>& p, size_t i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    return (-h2 / (h1 * (h1 + h2))) * p[i - 1] + ((h2 - h1) / (h1 * h2)) * p[i] +
           (h1 / (h2 * (h1 + h2))) * p[i + 1];
}

} // namespace

std::vector<double> horizontality_residual(const std::vector<double>& times,
                                           const std::vector<Vec>& path, const HamiltonianSpec& h) {
    if (times.size() < 3 || path.size() != times.size())
        throw ValidationError("horizontality residual needs at least 3 matching samples");
    std::vector<double> out;
    out.reserve(times.size() - 2);
    for (size_t i = 1; i + 1 < times.size(); ++i) {
        const Vec d = central_derivative(times, path, i);
        const cplx a = path[i].dot(d) + cplx(0.0, 1.0) * path[i].dot(h.apply(times[i], path[i]));
        out.push_back(std::abs(a));
    }
    return out;
}

PhasePath horizontalizing_phase(const std::vector<double>& times, const std::vector<Vec>& omega,
                                const HamiltonianSpec& h_prime, const HamiltonianSpec& h_extra,
                                double residual_tol) {
    if (h_prime.dim() != h_extra.dim()) throw DimensionError("H' and H'' dimensions differ");
    const auto res = horizontality_residual(times, omega, h_prime);
    for (size_t i = 0; i < res.size(); ++i)
        if (res[i] > residual_tol) {
            std::ostringstream os;
            os << "input path not horizontal for H' (residual " << res[i] << " at t=" << times[i + 1] << ")";
            throw ValidationError(os.str());
        }
    std::vector<double> e(times.size());
    for (size_t i = 0; i < times.size(); ++i) e[i] = omega[i].dot(h_extra.apply(times[i], omega[i])).real();
    const auto integral = cumulative_simpson(times, e);
    PhasePath out;
    out.times = times;
    for (double a : integral) out.zeta.push_back(std::exp(cplx(0.0, -a)));
    return out;
}

std::vector<double> transport_angle(const std::vector<double>& times, const std::vector<Vec>& v) {
    const size_t n = v.size();
    std::vector<double> theta(n, 0.0);
    for (size_t i = 1; i < n; ++i) theta[i] = theta[i - 1] + std::arg(v[i - 1].dot(v[i]));
    if (n < 5) return theta;

    // The one-step transport error is odd in h, so the accumulated error is
    // even in h: combine step h with step 2h on the same samples.
    const double h0 = times[1] - times[0];
    for (size_t i = 2; i < n; ++i)
        if (std::abs((times[i] - times[i - 1]) - h0) > 1e-9 * std::abs(h0)) return theta;
    std::vector<double> corr(n, 0.0);
    double coarse = 0.0;
    for (size_t i = 2; i < n; i += 2) {
        coarse += std::arg(v[i - 2].dot(v[i]));
        corr[i] = (theta[i] - coarse) / 3.0;
    }
    for (size_t i = 1; i < n; i += 2) corr[i] = i + 1 < n ? 0.5 * (corr[i - 1] + corr[i + 1]) : corr[i - 1];
    for (size_t i = 0; i < n; ++i) theta[i] += corr[i];
    return theta;
}

PhasePath canonical_lift_phase(const std::vector<double>& times, const std::vector<Vec>& path) {
    if (path.size() != times.size()) throw ValidationError("times and path lengths differ");
    const auto theta = transport_angle(times, path);
    PhasePath out;
    out.times = times;
    for (double a : theta) out.zeta.push_back(std::exp(cplx(0.0, -a)));
    return out;
}

std::vector<Vec> apply_phase(const std::vector<Vec>& path, const PhasePath& zeta) {
    if (path.size() != zeta.zeta.size()) throw ValidationError("path and phase lengths differ");
    std::vector<Vec> out;
    out.reserve(path.size());
    for (size_t i = 0; i < path.size(); ++i) out.push_back(zeta.zeta[i] * path[i]);
    return out;
}

} // namespace iqm
