#include <doctest.h>

#include <cmath>
#include <complex>

#include "tct/dyson.hpp"
#include "tct/limit_laws.hpp"
#include "tct/rng.hpp"
#include "test_helpers.hpp"

using namespace tct;
using Complex = std::complex<double>;

namespace {
Eigen::VectorXd equal_thirds() { return Eigen::VectorXd::Constant(3, 1.0 / 3.0); }
}

TEST_CASE("equal thirds solution matches the closed form") {
    DysonSolver solver(equal_thirds());

    SUBCASE("specific points") {
        const Eigen::VectorXcd g_i = solver.solve(Complex(0.0, 1.0));
        CHECK(std::abs(g_i.sum() - Complex(0.0, 0.686140)) <= 1e-5);
        CHECK(std::abs(g_i[0] - Complex(0.0, 0.228713)) <= 1e-5);
        const Eigen::VectorXcd g_2i = solver.solve(Complex(0.0, 2.0));
        CHECK(std::abs(g_2i.sum() - Complex(0.0, 0.436492)) <= 1e-5);
    }

    SUBCASE("100-point grid against the closed form") {
        Rng rng(63);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Complex z(-5.0 + 10.0 * rng.next_unit(), 0.05 + 4.95 * rng.next_unit());
            const Complex g = solver.solve(z).sum();
            worst = std::max(worst, std::abs(g - test::equal_thirds_g(z)));
        }
        CHECK(worst <= 1e-8);
    }

    SUBCASE("stieltjes tail") {
        const Complex z(0.0, 1e4);
        CHECK(std::abs(solver.stieltjes(z) + 1.0 / z) <= 1e-7);
    }
}

TEST_CASE("residual and half-plane invariants on random ratios") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + static_cast<int>(rng.next_u64() % 3);
        DysonSolver solver(test::random_ratios(d, rng));
        for (int i = 0; i < 100; ++i) {
            const Complex z(-5.0 + 10.0 * rng.next_unit(), 0.05 + 4.95 * rng.next_unit());
            const Eigen::VectorXcd g = solver.solve(z);
            // residual of the defining equation
            const Complex total = g.sum();
            double res = 0.0;
            for (int j = 0; j < d; ++j) {
                res = std::max(res, std::abs(solver.ratios()[j] / g[j] + z + (total - g[j])));
                CHECK(g[j].imag() > 0.0);
            }
            CHECK(res <= 1e-11);
        }
    }
}

TEST_CASE("conjugation symmetries") {
    Rng rng(29);
    DysonSolver solver(test::random_ratios(3, rng));
    for (int i = 0; i < 25; ++i) {
        const Complex z(-4.0 + 8.0 * rng.next_unit(), 0.1 + 3.0 * rng.next_unit());
        const Eigen::VectorXcd g = solver.solve(z);
        // reflection across the imaginary axis: g(-conj z) = -conj g(z)
        const Eigen::VectorXcd g_ref = solver.solve(-std::conj(z));
        CHECK((g_ref + g.conjugate()).cwiseAbs().maxCoeff() <= 1e-10);
        // lower half-plane via conjugation
        const Eigen::VectorXcd g_low = solver.solve(std::conj(z));
        CHECK((g_low - g.conjugate()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("solver argument validation") {
    DysonSolver solver(equal_thirds());
    CHECK_THROWS_AS(solver.solve(Complex(1.0, 0.0)), ArgumentError);
    CHECK_THROWS_AS(solver.solve(Complex(0.0, 1.0), 1e-3), ArgumentError);
    CHECK_THROWS_AS(solver.density(0.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(DysonSolver(Eigen::VectorXd::Constant(3, 0.5)), ArgumentError);
}

TEST_CASE("density values for equal thirds") {
    DysonSolver solver(equal_thirds());
    CHECK(std::abs(solver.density(0.0, 1e-6) - 0.389848) <= 1e-4);
    CHECK(solver.density(2.0, 1e-6) <= 1e-4);

    // total mass over [-zeta - 0.1, zeta + 0.1] at eta = 1e-6
    const double zeta = solver.support_edge();
    const double lo = -zeta - 0.1, hi = zeta + 0.1;
    const int n = 4000;
    double mass = 0.0;
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
        const double x0 = lo + i * h, x1 = x0 + h;
        mass += 0.5 * h * (solver.density(x0, 1e-6) + solver.density(x1, 1e-6));
    }
    CHECK(std::abs(mass - 1.0) <= 1e-3);
}

TEST_CASE("support edge") {
    SUBCASE("equal thirds closed form") {
        DysonSolver solver(equal_thirds());
        CHECK(std::abs(solver.support_edge() - 1.63299) <= 1e-3);
    }

    SUBCASE("always within the d=3 bound") {
        Rng rng(41);
        for (int trial = 0; trial < 8; ++trial) {
            DysonSolver solver(test::random_ratios(3, rng));
            CHECK(solver.support_edge() <= 2.0 * std::sqrt(2.0) + 1e-9);
        }
    }

    SUBCASE("grid-scan oracle for uneven ratios") {
        Eigen::VectorXd c(3);
        c << 0.2, 0.3, 0.5;
        DysonSolver solver(c);
        // independent fine scan: last grid point with density above threshold
        double scan_edge = 0.0;
        const int n = 20000;
        const double hi = 2.0 * std::sqrt(2.0);
        for (int i = n; i >= 0; --i) {
            const double e = hi * i / n;
            if (solver.density(e, 1e-7) > 1e-5) {
                scan_edge = e;
                break;
            }
        }
        CHECK(std::abs(solver.support_edge() - scan_edge) <= 1e-3);
    }
}

TEST_CASE("spectral bound formula") {
    DysonSolver a(equal_thirds());
    CHECK(a.spectral_bound() == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-12));

    Eigen::VectorXd c(3);
    c << 0.25, 0.25, 0.5;
    DysonSolver b(c);
    CHECK(b.spectral_bound() == doctest::Approx(4.0 * (0.5 + 0.5 + std::sqrt(0.5))).epsilon(1e-12));

    DysonSolver d4(Eigen::VectorXd::Constant(4, 0.25));
    CHECK(d4.spectral_bound() == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("moments") {
    DysonSolver solver(equal_thirds());
    CHECK(std::abs(solver.moment(2) - 2.0 / 3.0) <= 1e-4);
    CHECK(std::abs(solver.moment(0) - 1.0) <= 1e-6);
    CHECK_THROWS_AS(solver.moment(3), ArgumentError);

    SUBCASE("second moment identity 1 - sum c^2 for uneven ratios") {
        Eigen::VectorXd c(3);
        c << 0.2, 0.35, 0.45;
        DysonSolver s(c);
        CHECK(std::abs(s.moment(2) - (1.0 - c.squaredNorm())) <= 1e-4);
    }

    SUBCASE("solver stays usable at the point-mass boundary") {
        Eigen::VectorXd c(3);
        c << 0.5, 0.25, 0.25;
        DysonSolver s(c);
        const Eigen::VectorXcd g = s.solve(Complex(0.01, 1e-6));
        const Complex total = g.sum();
        double res = 0.0;
        for (int j = 0; j < 3; ++j)
            res = std::max(res, std::abs(c[j] / g[j] + Complex(0.01, 1e-6) + (total - g[j])));
        CHECK(res <= 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("point mass predicate") {
    Eigen::VectorXd a(3), b(3), c(3);
    a << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    b << 0.5, 0.25, 0.25;
    c << 0.6, 0.2, 0.2;
    CHECK_FALSE(DysonSolver(a).has_point_mass());
    CHECK(DysonSolver(b).has_point_mass());
    CHECK(DysonSolver(c).has_point_mass());
}

TEST_CASE("stability operator is invertible off the support") {
    Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        DysonSolver solver(test::random_ratios(3, rng));
        LimitContext ctx(solver, VectorStats::delocalized_limit(3), 0.0, 0.0);
        const Complex z(-4.0 + 8.0 * rng.next_unit(), 0.05 + 3.0 * rng.next_unit());
        const GValue gz = ctx.eval(z);
        const Eigen::MatrixXcd pi = ctx.pi_matrix(gz, gz);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pi);
        const double cond = svd.singularValues()(0) / svd.singularValues()(2);
        CHECK(std::isfinite(cond));
        CHECK(svd.singularValues()(2) > 1e-12);
    }
}
