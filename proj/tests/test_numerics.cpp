#include "doctest.h"

#include <cmath>
#include <numbers>

#include "iqm/numerics.hpp"

using namespace iqm;

TEST_CASE("cumulative Simpson is exact for quadratics on nonuniform grids") {
    const std::vector<double> t{0.0, 0.1, 0.35, 0.4, 0.9, 1.3, 1.31, 2.0};
    std::vector<double> f;
    for (double x : t) f.push_back(3.0 * x * x - 2.0 * x + 0.5);
    const auto c = cumulative_simpson(t, f);
    REQUIRE(c.size() == t.size());
    CHECK(c[0] == 0.0);
    for (size_t i = 0; i < t.size(); ++i) {
        const double x = t[i];
        CHECK(std::abs(c[i] - (x * x * x - x * x + 0.5 * x)) < 1e-13);
    }
}

TEST_CASE("cumulative Simpson converges at fourth order on a uniform grid") {
    auto err = [](int n) {
        const auto t = linspace(0.0, 2.0, n + 1);
        std::vector<double> f;
        for (double x : t) f.push_back(std::cos(x));
        return std::abs(cumulative_simpson(t, f).back() - std::sin(2.0));
    };
    const double e1 = err(20), e2 = err(40);
    CHECK(e1 / e2 > 12.0);
    CHECK(e2 < 1e-6);
}

TEST_CASE("Gauss-Kronrod") {
    CHECK(std::abs(gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0) - (std::exp(1.0) - 1.0)) < 1e-14);
    CHECK(std::abs(gauss_kronrod([](double x) { return 1.0 / (1.0 + x * x); }, -50.0, 50.0) -
                   2.0 * std::atan(50.0)) < 1e-12);
    CHECK(std::abs(gauss_kronrod([](double x) { return std::sqrt(x); }, 0.0, 1.0) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("Dormand-Prince lands on output times and meets tolerance") {
    const OdeRhs rot = [](double, const Vec& y) -> Vec { return cplx(0.0, 1.0) * y; };
    Vec y0(1);
    y0(0) = 1.0;
    const auto ts = linspace(0.0, 10.0, 11);
    OdeStats st;
    OdeOptions opt;
    opt.rtol = opt.atol = 1e-11;
    const auto ys = integrate_dopri5(rot, 0.0, y0, ts, opt, &st);
    REQUIRE(ys.size() == ts.size());
    for (size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(ys[i](0) - std::polar(1.0, ts[i])) < 1e-8);
    CHECK(st.accepted > 0);

    // oscillator as a two-component system
    const OdeRhs osc = [](double, const Vec& y) -> Vec {
        Vec d(2);
        d << y(1), -4.0 * y(0);
        return d;
    };
    Vec z0(2);
    z0 << 1.0, 0.0;
    const auto zs = integrate_dopri5(osc, 0.0, z0, {0.5, 3.0}, opt);
    CHECK(std::abs(zs[1](0) - std::cos(6.0)) < 1e-8);
}

TEST_CASE("Dormand-Prince reports a collapsing step") {
    const OdeRhs blow = [](double, const Vec& y) -> Vec { return y.cwiseProduct(y); };
    Vec y0(1);
    y0(0) = 1.0;
    CHECK_THROWS_AS(integrate_dopri5(blow, 0.0, y0, {2.0}), IntegrationError);
}

TEST_CASE("counter-based uniforms") {
    CHECK(counter_uniform(7, 3) == counter_uniform(7, 3));
    CHECK(counter_uniform(7, 3) != counter_uniform(8, 3));
    double sum = 0.0, lo = 1.0, hi = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = counter_uniform(42, i);
        sum += u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("random matrices") {
    Rng rng(1);
    const Mat u = random_unitary(5, rng);
    CHECK((u.adjoint() * u - Mat::Identity(5, 5)).norm() < 1e-12);
    const Mat h = random_hermitian(4, rng, 2.0);
    CHECK((h - h.adjoint()).norm() == 0.0);
    CHECK(std::abs(random_unit_vector(6, rng).norm() - 1.0) < 1e-14);
}

TEST_CASE("phase unwrapping") {
    std::vector<cplx> z;
    for (int i = 0; i <= 100; ++i) z.push_back(std::polar(1.0, 0.2 * i));
    const auto u = unwrap_phase(z);
    for (int i = 0; i <= 100; ++i) CHECK(std::abs(u[i] - 0.2 * i) < 1e-12);
    const auto l = linspace(1.0, 2.0, 5);
    CHECK(l.front() == 1.0);
    CHECK(l.back() == 2.0);
}
