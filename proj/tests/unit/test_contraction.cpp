#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tct/contraction.hpp"
#include "tct/rng.hpp"
#include "tct/stats.hpp"
#include "test_helpers.hpp"

using namespace tct;

namespace {

// brute-force oracle: iterate every multi-index with explicit index math
Eigen::MatrixXd contraction_oracle(const DenseTensor& t, const UnitVectorSet& a, int j1, int j2) {
    const auto& p = t.profile();
    const int d = p.mode_count();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p.dim(j1), p.dim(j2));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    const std::int64_t total = p.element_count();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t rem = flat;
        for (int j = 0; j < d; ++j) {
            idx[static_cast<std::size_t>(j)] = static_cast<int>(rem / p.strides()[static_cast<std::size_t>(j)]);
            rem %= p.strides()[static_cast<std::size_t>(j)];
        }
        double w = 1.0;
        for (int l = 0; l < d; ++l)
            if (l != j1 && l != j2) w *= a.vector(l)[idx[static_cast<std::size_t>(l)]];
        out(idx[static_cast<std::size_t>(j1)], idx[static_cast<std::size_t>(j2)]) += t.values()[flat] * w;
    }
    return out;
}

} // namespace

TEST_CASE("second order contraction matches brute force") {
    Rng rng(31);
    for (const auto& dims : {std::vector<int>{3, 4, 5}, std::vector<int>{2, 3, 4, 3}}) {
        DimensionProfile p(dims);
        DenseTensor t(p);
        for (Eigen::Index i = 0; i < t.values().size(); ++i) t.values()[i] = rng.next_gaussian();
        const UnitVectorSet a = test::random_unit_set(p, rng);
        const int d = p.mode_count();
        for (int j1 = 0; j1 < d; ++j1)
            for (int j2 = j1 + 1; j2 < d; ++j2) {
                const Eigen::MatrixXd fast = second_order_contraction(t, a, j1, j2);
                const Eigen::MatrixXd slow = contraction_oracle(t, a, j1, j2);
                CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
            }
    }
}

TEST_CASE("contraction closed forms") {
    DimensionProfile p({2, 2, 2});

    SUBCASE("zero tensor") {
        DenseTensor t(p);
        const UnitVectorSet a = delocalized_vectors(p);
        CHECK(second_order_contraction(t, a, 0, 1).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("all-ones tensor against uniform third mode gives sqrt 2") {
        DenseTensor t(p, Eigen::VectorXd::Ones(8));
        const UnitVectorSet a = delocalized_vectors(p);
        const Eigen::MatrixXd m = second_order_contraction(t, a, 0, 1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(m(i, j) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    }

    SUBCASE("basis tensor against basis vector") {
        DenseTensor t(p);
        t.values()[0] = 1.0; // e1 (x) e1 (x) e1
        const UnitVectorSet a = localized_vectors(p);
        const Eigen::MatrixXd m = second_order_contraction(t, a, 0, 1);
        CHECK(m(0, 0) == doctest::Approx(1.0));
        CHECK(std::abs(m.sum() - 1.0) <= 1e-15);
    }

    SUBCASE("argument validation") {
        DenseTensor t(p);
        const UnitVectorSet a = delocalized_vectors(p);
        CHECK_THROWS_AS(second_order_contraction(t, a, 1, 1), ArgumentError);
        CHECK_THROWS_AS(second_order_contraction(t, a, 2, 1), ArgumentError);
        CHECK_THROWS_AS(second_order_contraction(t, a, 0, 3), ArgumentError);
    }
}

TEST_CASE("phi_d output is symmetric with zero diagonal blocks") {
    Rng rng(8);
    DimensionProfile p({4, 3, 5});
    DenseTensor t(p);
    for (Eigen::Index i = 0; i < t.values().size(); ++i) t.values()[i] = rng.next_gaussian();
    const UnitVectorSet a = test::random_unit_set(p, rng);
    const ContractedMatrix m = phi_d(t, a);
    CHECK((m.entries() - m.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int j = 0; j < 3; ++j)
        CHECK(m.block(j, j).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("phi_d is linear in the tensor") {
    Rng rng(12);
    DimensionProfile p({3, 3, 3});
    DenseTensor t1(p), t2(p);
    for (Eigen::Index i = 0; i < t1.values().size(); ++i) {
        t1.values()[i] = rng.next_gaussian();
        t2.values()[i] = rng.next_gaussian();
    }
    const UnitVectorSet a = test::random_unit_set(p, rng);
    const double alpha = 2.75;
    DenseTensor combo(p, alpha * t1.values() + t2.values());
    const Eigen::MatrixXd lhs = phi_d(combo, a).entries();
    const Eigen::MatrixXd rhs = alpha * phi_d(t1, a).entries() + phi_d(t2, a).entries();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("rank one contraction has the block structure U B U'") {
    Rng rng(21);
    DimensionProfile p({6, 7, 8});
    const UnitVectorSet x = test::random_unit_set(p, rng);
    const UnitVectorSet a = test::random_unit_set(p, rng);

    // assemble the rank-1 tensor x1 (x) x2 (x) x3
    DenseTensor t(p);
    std::int64_t flat = 0;
    for (int i0 = 0; i0 < p.dim(0); ++i0)
        for (int i1 = 0; i1 < p.dim(1); ++i1)
            for (int i2 = 0; i2 < p.dim(2); ++i2)
                t.values()[flat++] = x.vector(0)[i0] * x.vector(1)[i1] * x.vector(2)[i2];

    const ContractedMatrix m = phi_d(t, a);
    Eigen::Vector3d overlap;
    for (int l = 0; l < 3; ++l) overlap[l] = x.vector(l).dot(a.vector(l));

    // B_{kl} = (1 - delta_{kl}) prod_{j != k,l} <x_j, a_j>
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            if (k == l) continue;
            const int other = 3 - k - l;
            const Eigen::MatrixXd expected =
                overlap[other] * x.vector(k) * x.vector(l).transpose();
            CHECK((m.block(k, l) - expected).cwiseAbs().maxCoeff() <= 1e-12);
        }

    // Frobenius^2 with beta scaling: beta^2 * 2 * sum_l overlap_l^2
    const double beta = 1.7;
    DenseTensor scaled(p, beta * t.values());
    const double fro = frobenius_sq(phi_d(scaled, a));
    CHECK(fro == doctest::Approx(beta * beta * 2.0 * overlap.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("frobenius_sq equals brute-force double loop") {
    Rng rng(77);
    DimensionProfile p({4, 5, 3});
    DenseTensor t(p);
    for (Eigen::Index i = 0; i < t.values().size(); ++i) t.values()[i] = rng.next_gaussian();
    const UnitVectorSet a = test::random_unit_set(p, rng);
    const ContractedMatrix m = phi_d(t, a);
    double slow = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        for (Eigen::Index j = 0; j < m.size(); ++j) slow += m.entries()(i, j) * m.entries()(i, j);
    CHECK(frobenius_sq(m) == doctest::Approx(slow).epsilon(1e-12));
    CHECK(frobenius_sq(phi_d(DenseTensor(p), a)) == 0.0);
}

TEST_CASE("aligned rank-one frobenius identity") {
    DimensionProfile p({5, 6, 7});
    Rng rng(4);
    const UnitVectorSet x = test::random_unit_set(p, rng);
    const SpikedModel model(p, {1.0}, {x}, NoiseDist::Gaussian);
    DenseTensor zero(p);
    const DenseTensor t = assemble_spiked(model, zero);
    CHECK(frobenius_sq(phi_d(t, x)) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("entry covariance structure of the contracted noise") {
    // d=3: Cov(X^{ij}_{s,t1}, X^{ik}_{s,t2}) = a^(j)_{t1} a^(k)_{t2}
    DimensionProfile p({5, 6, 7});
    Rng rng(2025);
    const UnitVectorSet a = test::random_unit_set(p, rng);
    const int reps = 10000;

    // blocks (0,1) and (0,2) share the row index s: check s = 2, t1 = 1, t2 = 3
    std::vector<double> x01(reps), x02(reps), x01b(reps);
    for (int r = 0; r < reps; ++r) {
        const DenseTensor noise = generate_noise(p, NoiseDist::Gaussian, 9000 + static_cast<std::uint64_t>(r));
        x01[static_cast<std::size_t>(r)] = second_order_contraction(noise, a, 0, 1)(2, 1);
        x02[static_cast<std::size_t>(r)] = second_order_contraction(noise, a, 0, 2)(2, 3);
        x01b[static_cast<std::size_t>(r)] = second_order_contraction(noise, a, 0, 1)(3, 1);
    }
    auto cov = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double mu = 0, mv = 0;
        for (int r = 0; r < reps; ++r) {
            mu += u[static_cast<std::size_t>(r)];
            mv += v[static_cast<std::size_t>(r)];
        }
        mu /= reps;
        mv /= reps;
        double c = 0;
        for (int r = 0; r < reps; ++r)
            c += (u[static_cast<std::size_t>(r)] - mu) * (v[static_cast<std::size_t>(r)] - mv);
        return c / (reps - 1);
    };
    // same row: covariance a^(1)_{t1} a^(2)_{t2}; rows differ: zero
    const double expected = a.vector(1)[1] * a.vector(2)[3];
    const double se = 1.5 / std::sqrt(static_cast<double>(reps)); // Var of product pairs is O(1)
    CHECK(std::abs(cov(x01, x02) - expected) <= 5 * se);
    CHECK(std::abs(cov(x01b, x02)) <= 5 * se);
}

TEST_CASE("contracted noise entries have variance 1/N") {
    DimensionProfile p({5, 6, 7});
    Rng rng(3);
    const UnitVectorSet a = test::random_unit_set(p, rng);
    const int reps = 4000;
    std::vector<double> entry(reps);
    for (int r = 0; r < reps; ++r) {
        DenseTensor noise = generate_noise(p, NoiseDist::UniformPmSqrt3, 100000 + static_cast<std::uint64_t>(r));
        noise.values() /= std::sqrt(static_cast<double>(p.total_dim()));
        entry[static_cast<std::size_t>(r)] = second_order_contraction(noise, a, 0, 1)(1, 2);
    }
    const Summary s = summarize(entry);
    const double target = 1.0 / static_cast<double>(p.total_dim());
    CHECK(std::abs(s.variance - target) <= 5 * s.variance_se);
}

TEST_CASE("matrix csv dump") {
    Eigen::MatrixXd m(2, 2);
    m << 1.5, -2.0, 3.0, 0.25;
    std::stringstream ss;
    write_matrix_csv(ss, m);
    CHECK(ss.str() == "1.5,-2\n3,0.25\n");
}
