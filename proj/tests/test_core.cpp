#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jumpsas/core.hpp"

#include <cmath>

using namespace jumpsas;

TEST_CASE("sym_eig on a hand-solved 2x2") {
    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    const auto eig = sym_eig(m);
    CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(eig.vectors.col(0).dot(Eigen::Vector2d(s, s))) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(eig.vectors.col(1).dot(Eigen::Vector2d(s, -s))) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sym_eig symmetrizes and orders descending") {
    Eigen::Matrix3d m;
    m << 5, 1, 0, 3, 2, 1, 0, 1, 1; // asymmetric on purpose
    const auto eig = sym_eig(m);
    CHECK(eig.values[0] >= eig.values[1]);
    CHECK(eig.values[1] >= eig.values[2]);
    const Eigen::Matrix3d sym = 0.5 * (m + m.transpose());
    const Eigen::Matrix3d back = eig.vectors *
                                 eig.values.asDiagonal() *
                                 eig.vectors.transpose();
    CHECK((back - sym).norm() < 1e-12);
}

TEST_CASE("eigenvector sign convention: largest-magnitude entry positive") {
    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    const auto eig = sym_eig(m);
    for (int j = 0; j < 2; ++j) {
        int arg = 0;
        eig.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        CHECK(eig.vectors(arg, j) > 0.0);
    }
}

TEST_CASE("psd_sqrt of identity is identity") {
    const SpectralMatrix m(Eigen::Matrix3d::Identity());
    const Eigen::MatrixXd s = psd_sqrt(m);
    CHECK((s - Eigen::Matrix3d::Identity()).norm() < 1e-12);
}

TEST_CASE("psd_sqrt multiplies back") {
    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    const SpectralMatrix sm(m);
    const Eigen::MatrixXd s = psd_sqrt(sm);
    CHECK((s * s.transpose() - m).norm() < 1e-12);
    CHECK((s - s.transpose()).norm() < 1e-12);
}

TEST_CASE("psd_sqrt clamps tiny negatives, rejects real ones") {
    Eigen::Matrix2d tiny;
    tiny << 1, 0, 0, -1e-12;
    CHECK_NOTHROW(psd_sqrt(SpectralMatrix(tiny)));
    Eigen::Matrix2d bad;
    bad << 1, 0, 0, -1;
    CHECK_THROWS_AS(psd_sqrt(SpectralMatrix(bad)), NotPsdError);
}

TEST_CASE("subspace_cosine basics") {
    const Eigen::Vector2d e1(1, 0);
    CHECK(subspace_cosine(e1, e1) == doctest::Approx(1.0).epsilon(1e-15));
    const Eigen::Vector2d diag(1, 1);
    CHECK(subspace_cosine(e1, diag) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // sign and scale invariance
    CHECK(subspace_cosine(e1, -5.0 * diag) ==
          doctest::Approx(subspace_cosine(e1, diag)).epsilon(1e-15));
    CHECK(subspace_cosine(3.0 * e1, diag) ==
          doctest::Approx(subspace_cosine(e1, diag)).epsilon(1e-15));
}

TEST_CASE("normalize_inputs endpoints and a known value") {
    std::vector<ParameterRange> ranges = {{"speed", 0.0, 40000.0}};
    Eigen::MatrixXd raw(3, 1);
    raw << 0.0, 40000.0, 200.0;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    const Dataset data = normalize_inputs(raw, ranges, y);
    CHECK(data.inputs(0, 0) == 0.0);
    CHECK(data.inputs(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(data.inputs(2, 0) == doctest::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("normalize_inputs round trip and validation") {
    std::vector<ParameterRange> ranges = {{"a", -1.0, 3.0}, {"b", 10.0, 20.0}};
    Eigen::MatrixXd raw(2, 2);
    raw << 0.5, 12.0, 2.0, 19.0;
    Eigen::VectorXd y(2);
    y << 0, 1;
    const Dataset data = normalize_inputs(raw, ranges, y);
    CHECK((denormalize_inputs(data) - raw).norm() < 1e-12);

    Eigen::MatrixXd out_of_range = raw;
    out_of_range(1, 1) = 25.0;
    CHECK_THROWS_AS(normalize_inputs(out_of_range, ranges, y),
                    OutOfRangeError);

    std::vector<ParameterRange> bad = {{"a", 3.0, 3.0}, {"b", 10.0, 20.0}};
    CHECK_THROWS_AS(normalize_inputs(raw, bad, y), InvalidInputError);
}

TEST_CASE("out-of-range message names the row and column") {
    std::vector<ParameterRange> ranges = {{"a", 0.0, 1.0}};
    Eigen::MatrixXd raw(2, 1);
    raw << 0.5, 2.0;
    Eigen::VectorXd y(2);
    y << 0, 1;
    try {
        normalize_inputs(raw, ranges, y);
        FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("Rng is deterministic and well ranged") {
    Rng a(17), b(17), c(18);
    bool all_equal = true;
    for (int i = 0; i < 100; ++i) {
        const double ua = a.uniform();
        const double ub = b.uniform();
        all_equal = all_equal && ua == ub;
        CHECK(ua >= 0.0);
        CHECK(ua < 1.0);
        (void)c.uniform();
    }
    CHECK(all_equal);
    Rng d(17), e(17);
    CHECK(d.uniform() != c.uniform());
    CHECK(d.derive(1).uniform() != e.derive(2).uniform());
}

TEST_CASE("Rng normal moments") {
    Rng rng(99);
    double sum = 0.0, sumsq = 0.0;
    const int m = 50000;
    for (int i = 0; i < m; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / m) < 0.02);
    CHECK(sumsq / m == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("uniform with bounds") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const double v = rng.uniform(-2.0, 3.0);
        CHECK(v >= -2.0);
        CHECK(v < 3.0);
    }
}

TEST_CASE("SpectralMatrix caches a consistent decomposition") {
    Eigen::Matrix2d m;
    m << 4, 0, 0, 1;
    const SpectralMatrix sm(m);
    CHECK(sm.dim() == 2);
    CHECK(sm.eigenvalues()[0] == doctest::Approx(4.0));
    CHECK(std::abs(sm.leading_eigenvector()[0]) ==
          doctest::Approx(1.0).epsilon(1e-14));
}
