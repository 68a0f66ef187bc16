#include <doctest.h>

#include <cmath>

#include "oc/features.hpp"
#include "oc/rng.hpp"

using namespace oc;

TEST_CASE("one-hot features") {
    const FeatureMap map = FeatureMap::one_hot(4);
    CHECK(map.n_features() == 4);
    const Eigen::VectorXd v = map.to_dense(map.featurize(2));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 1.0);
    CHECK(v[3] == 0.0);
    CHECK_THROWS_AS(map.featurize(4), std::invalid_argument);
    CHECK_THROWS_AS(map.featurize(-1), std::invalid_argument);
}

TEST_CASE("fourier basis boundary values") {
    const FeatureMap map = FeatureMap::fourier(1, 1);
    CHECK(map.n_features() == 2);
    const double x0[] = {0.0};
    const double x1[] = {1.0};
    const Eigen::VectorXd f0 = map.featurize(std::span<const double>(x0)).dense;
    CHECK(f0[0] == doctest::Approx(1.0));
    CHECK(f0[1] == doctest::Approx(1.0));
    const Eigen::VectorXd f1 = map.featurize(std::span<const double>(x1)).dense;
    CHECK(f1[0] == doctest::Approx(1.0));
    CHECK(f1[1] == doctest::Approx(-1.0));
}

TEST_CASE("fourier input outside the unit box is a contract violation") {
    const FeatureMap map = FeatureMap::fourier(2, 1);
    const double bad[] = {0.5, 1.2};
    CHECK_THROWS_AS(map.featurize(std::span<const double>(bad)), std::invalid_argument);
}

TEST_CASE("fourier lattice enumeration and learning-rate divisors") {
    const FeatureMap map = FeatureMap::fourier(2, 1);
    REQUIRE(map.n_features() == 4);
    // lexicographic, first coordinate slowest: (0,0) (0,1) (1,0) (1,1)
    CHECK(map.coefficients()(0, 0) == 0);
    CHECK(map.coefficients()(0, 1) == 0);
    CHECK(map.coefficients()(1, 0) == 0);
    CHECK(map.coefficients()(1, 1) == 1);
    CHECK(map.coefficients()(2, 0) == 1);
    CHECK(map.coefficients()(2, 1) == 0);
    CHECK(map.coefficients()(3, 0) == 1);
    CHECK(map.coefficients()(3, 1) == 1);

    // enumerate the lattice independently and compute the norms
    Eigen::VectorXd expected(4);
    int row = 0;
    for (int c0 = 0; c0 <= 1; ++c0)
        for (int c1 = 0; c1 <= 1; ++c1) {
            const double norm = std::sqrt(double(c0 * c0 + c1 * c1));
            expected[row++] = norm > 0 ? norm : 1.0;
        }
    CHECK((map.lr_scaling() - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(map.lr_scaling()[0] == 1.0);
    CHECK(map.lr_scaling()[3] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("3-4-5 coefficient norm") {
    const FeatureMap map = FeatureMap::fourier(2, 4);
    // find the row with c = (3,4)
    int row = -1;
    for (int i = 0; i < map.n_features(); ++i)
        if (map.coefficients()(i, 0) == 3 && map.coefficients()(i, 1) == 4) row = i;
    REQUIRE(row >= 0);
    CHECK(map.lr_scaling()[row] == doctest::Approx(5.0));
}

TEST_CASE("fourier features stay within [-1,1] on random inputs") {
    const FeatureMap map = FeatureMap::fourier(4, 3);
    CHECK(map.n_features() == 256);
    RngStream rng(17);
    for (int i = 0; i < 200; ++i) {
        double x[4];
        for (double& v : x) v = rng.uniform();
        const Eigen::VectorXd f = map.featurize(std::span<const double>(x)).dense;
        CHECK(f.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
        CHECK(f[0] == doctest::Approx(1.0));  // constant feature
    }
}

TEST_CASE("rebuilding a map reproduces identical feature vectors") {
    const FeatureMap a = FeatureMap::fourier(3, 2);
    const FeatureMap b = FeatureMap::fourier(3, 2);
    RngStream rng(23);
    for (int i = 0; i < 50; ++i) {
        double x[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
        const Eigen::VectorXd fa = a.featurize(std::span<const double>(x)).dense;
        const Eigen::VectorXd fb = b.featurize(std::span<const double>(x)).dense;
        CHECK(fa == fb);
    }
}
