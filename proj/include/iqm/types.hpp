#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace iqm {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

constexpr cplx I_UNIT{0.0, 1.0};

// Every failure raised by the library carries a short machine-readable kind
// so the CLI can emit it as JSON without parsing messages.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

struct DegenerateError : Error {
    DegenerateError(const std::string& what, double t = 0.0)
        : Error("degenerate", what), time(t) {}
    double time;
};

struct IntegrationError : Error {
    IntegrationError(const std::string& what, double t = 0.0)
        : Error("integration", what), time(t) {}
    double time;
};

} // namespace iqm
