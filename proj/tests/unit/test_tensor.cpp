#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tct/rng.hpp"
#include "tct/tensor.hpp"
#include "test_helpers.hpp"

using namespace tct;

TEST_CASE("dimension profile ratios sum to one") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> dims;
        const int d = 3 + static_cast<int>(rng.next_u64() % 3);
        for (int j = 0; j < d; ++j) dims.push_back(2 + static_cast<int>(rng.next_u64() % 40));
        DimensionProfile p(dims);
        CHECK(std::abs(p.ratios().sum() - 1.0) <= 1e-14);
    }
    CHECK_THROWS_AS(DimensionProfile({5, 5}), DimensionError);
    CHECK_THROWS_AS(DimensionProfile({5, 0, 5}), DimensionError);
    CHECK_THROWS_AS(DimensionProfile({100000, 100000, 100000}), DimensionError);
}

TEST_CASE("noise generation is deterministic given seed") {
    DimensionProfile p({6, 5, 4});
    const DenseTensor a = generate_noise(p, NoiseDist::Gaussian, 42);
    const DenseTensor b = generate_noise(p, NoiseDist::Gaussian, 42);
    CHECK(a.values() == b.values());
    const DenseTensor c = generate_noise(p, NoiseDist::Gaussian, 43);
    CHECK(a.values() != c.values());
    CHECK_THROWS_AS(parse_noise_dist("cauchy"), ConfigError);
}

TEST_CASE("uniform noise moments match") {
    DimensionProfile p({100, 100, 100});
    const DenseTensor t = generate_noise(p, NoiseDist::UniformPmSqrt3, 2024);
    const auto& v = t.values();
    const double n = static_cast<double>(v.size());
    const double mean = v.sum() / n;
    const double var = (v.array() - mean).square().sum() / n;
    const double m4 = (v.array() - mean).pow(4).sum() / n;
    const double kappa4 = m4 / (var * var) - 3.0;
    CHECK(var > 0.99);
    CHECK(var < 1.01);
    CHECK(kappa4 > -1.3);
    CHECK(kappa4 < -1.1);
}

TEST_CASE("gaussian noise moments match") {
    DimensionProfile p({100, 100, 100});
    const DenseTensor t = generate_noise(p, NoiseDist::Gaussian, 515);
    const auto& v = t.values();
    const double n = static_cast<double>(v.size());
    const double mean = v.sum() / n;
    const double var = (v.array() - mean).square().sum() / n;
    CHECK(std::abs(mean) < 5e-3);
    CHECK(var > 0.99);
    CHECK(var < 1.01);
}

TEST_CASE("assemble_spiked basic cases") {
    DimensionProfile p({2, 2, 2});

    SUBCASE("rank zero is scaled noise") {
        const DenseTensor noise = generate_noise(p, NoiseDist::Gaussian, 1);
        const SpikedModel model(p, {}, {}, NoiseDist::Gaussian);
        const DenseTensor t = assemble_spiked(model, noise);
        CHECK((t.values() - noise.values() / std::sqrt(6.0)).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("basis spike places a single entry") {
        std::vector<Eigen::VectorXd> vs(3, Eigen::VectorXd::Unit(2, 0));
        const SpikedModel model(p, {1.0}, {UnitVectorSet(p, vs)}, NoiseDist::Gaussian);
        DenseTensor zero(p);
        const DenseTensor t = assemble_spiked(model, zero);
        CHECK(t({0, 0, 0}) == doctest::Approx(1.0));
        CHECK(std::abs(t.values().sum() - 1.0) <= 1e-15);
    }

    SUBCASE("uniform spike fills the expected product value") {
        std::vector<Eigen::VectorXd> vs(3, Eigen::VectorXd::Constant(2, 1.0 / std::sqrt(2.0)));
        const SpikedModel model(p, {2.0}, {UnitVectorSet(p, vs)}, NoiseDist::Gaussian);
        DenseTensor zero(p);
        const DenseTensor t = assemble_spiked(model, zero);
        const double expected = 2.0 * std::pow(2.0, -1.5);
        for (int i = 0; i < t.values().size(); ++i)
            CHECK(t.values()[i] == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("profile mismatch is rejected") {
        const SpikedModel model(p, {}, {}, NoiseDist::Gaussian);
        const DenseTensor wrong(DimensionProfile({2, 2, 3}));
        CHECK_THROWS_AS(assemble_spiked(model, wrong), DimensionError);
    }
}

TEST_CASE("assemble_spiked is linear in the noise") {
    DimensionProfile p({3, 4, 2});
    Rng rng(99);
    const UnitVectorSet sig = test::random_unit_set(p, rng);
    const SpikedModel model(p, {1.5}, {sig}, NoiseDist::Gaussian);
    const DenseTensor n1 = generate_noise(p, NoiseDist::Gaussian, 5);
    const DenseTensor n2 = generate_noise(p, NoiseDist::Gaussian, 6);
    DenseTensor sum(p, n1.values() + n2.values());
    DenseTensor zero(p, Eigen::VectorXd::Zero(p.element_count()));
    const Eigen::VectorXd lhs = assemble_spiked(model, sum).values();
    const Eigen::VectorXd rhs = assemble_spiked(model, n1).values() +
                                assemble_spiked(model, n2).values() -
                                assemble_spiked(model, zero).values();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("vector_stats closed forms") {
    SUBCASE("uniform vectors") {
        DimensionProfile p({100, 100, 100});
        const UnitVectorSet v = delocalized_vectors(p);
        const VectorStats s = vector_stats(v);
        for (int k = 0; k < 3; ++k)
            CHECK(s.b1(k) == doctest::Approx(std::sqrt(100.0 / 300.0)).epsilon(1e-12));
        // remaining mode is uniform on n=100: sum a^4 = 1/100
        CHECK(s.b4(0, 1) == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(s.b4(1, 2) == doctest::Approx(0.01).epsilon(1e-12));
    }

    SUBCASE("one-hot vectors") {
        DimensionProfile p({10, 20, 30});
        const UnitVectorSet v = localized_vectors(p);
        const VectorStats s = vector_stats(v);
        for (int k = 0; k < 3; ++k)
            CHECK(s.b1(k) == doctest::Approx(1.0 / std::sqrt(60.0)).epsilon(1e-12));
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                if (k != l) CHECK(s.b4(k, l) == doctest::Approx(1.0));
    }

    SUBCASE("B4 excluding modes 0,1 is the fourth-power sum of mode 2") {
        DimensionProfile p({4, 5, 6});
        Rng rng(3);
        const UnitVectorSet v = test::random_unit_set(p, rng);
        const VectorStats s = vector_stats(v);
        const double expected = v.vector(2).array().pow(4).sum();
        CHECK(s.b4(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("cauchy-schwarz bound on b1") {
        DimensionProfile p({8, 13, 21});
        Rng rng(11);
        for (int trial = 0; trial < 10; ++trial) {
            const VectorStats s = vector_stats(test::random_unit_set(p, rng));
            for (int k = 0; k < 3; ++k) {
                CHECK(std::abs(s.b1(k)) <= std::sqrt(p.ratio(k)) + 1e-12);
                for (int l = 0; l < 3; ++l)
                    if (k != l) {
                        CHECK(s.b4(k, l) >= 0.0);
                        CHECK(s.b4(k, l) <= 1.0 + 1e-12);
                    }
            }
        }
    }
}

TEST_CASE("unit vector set validation") {
    DimensionProfile p({3, 3, 3});
    std::vector<Eigen::VectorXd> vs(3, Eigen::VectorXd::Constant(3, 1.0));
    CHECK_THROWS_AS(UnitVectorSet(p, vs), ArgumentError);
}

TEST_CASE("signal orthonormalization") {
    DimensionProfile p({8, 8, 8});
    Rng rng(17);
    std::vector<UnitVectorSet> raw;
    raw.push_back(test::random_unit_set(p, rng));
    raw.push_back(test::random_unit_set(p, rng));
    const SpikedModel model(p, {2.0, 1.0}, raw, NoiseDist::Gaussian);
    for (int l = 0; l < 3; ++l) {
        CHECK(std::abs(model.signal(0).vector(l).dot(model.signal(1).vector(l))) <= 1e-10);
        CHECK(model.signal(0).vector(l).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("tensor text and binary round trips") {
    DimensionProfile p({3, 2, 4});
    const DenseTensor t = generate_noise(p, NoiseDist::Gaussian, 77);

    std::stringstream text;
    write_tensor_text(text, t);
    const DenseTensor t2 = read_tensor_text(text);
    CHECK(t2.profile() == p);
    CHECK((t2.values() - t.values()).cwiseAbs().maxCoeff() <= 1e-16);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_tensor_binary(bin, t);
    const DenseTensor t3 = read_tensor_binary(bin);
    CHECK(t3.values() == t.values());
}

TEST_CASE("vector file round trip") {
    DimensionProfile p({4, 5, 6});
    Rng rng(5);
    const UnitVectorSet v = test::random_unit_set(p, rng);
    std::stringstream ss;
    write_vectors_text(ss, v);
    const UnitVectorSet v2 = read_vectors_text(ss);
    for (int j = 0; j < 3; ++j)
        CHECK((v2.vector(j) - v.vector(j)).cwiseAbs().maxCoeff() <= 1e-16);
}
