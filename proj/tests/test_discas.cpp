#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jumpsas/discas.hpp"
#include "jumpsas/testfn.hpp"

#include <cmath>

using namespace jumpsas;
using namespace jumpsas::discas;

TEST_CASE("ball_sample stays in the ball and matches the moment formula") {
    SUBCASE("P = 1, r = 1: uniform on [-1, 1]") {
        const auto sample = ball_sample(1, 1.0, 20000, 5);
        double sumsq = 0.0;
        for (int i = 0; i < sample.points.rows(); ++i) {
            CHECK(std::abs(sample.points(i, 0)) <= 1.0);
            sumsq += sample.points(i, 0) * sample.points(i, 0);
        }
        CHECK(sumsq / sample.points.rows() ==
              doctest::Approx(1.0 / 3.0).epsilon(0.03));
    }
    SUBCASE("P = 3, r = 0.5: E[z_i^2] = r^2 / (P + 2)") {
        const auto sample = ball_sample(3, 0.5, 20000, 6);
        Eigen::Vector3d sumsq = Eigen::Vector3d::Zero();
        for (int i = 0; i < sample.points.rows(); ++i) {
            CHECK(sample.points.row(i).norm() <= 0.5 + 1e-12);
            sumsq += sample.points.row(i).cwiseAbs2().transpose();
        }
        for (int j = 0; j < 3; ++j)
            CHECK(sumsq[j] / sample.points.rows() ==
                  doctest::Approx(0.05).epsilon(0.05));
    }
}

TEST_CASE("beta_r_mc of a constant is near zero") {
    const ScalarFn f = [](const Eigen::VectorXd&) { return 4.0; };
    Eigen::Vector2d x(0.5, 0.5);
    const Eigen::VectorXd beta = beta_r_mc(f, x, 0.5, 20000, 9);
    // E[beta] = 0 exactly; 3 SE of the through-origin OLS at this m
    CHECK(beta.norm() <= 0.2);
}

TEST_CASE("beta_r_mc validates sample count") {
    const ScalarFn f = [](const Eigen::VectorXd&) { return 0.0; };
    Eigen::Vector2d x(0.5, 0.5);
    CHECK_THROWS_AS(beta_r_mc(f, x, 0.1, 5, 1), InvalidInputError);
}

TEST_CASE("1D heaviside slope at the jump: -3c/(4r)") {
    const ScalarFn f = [](const Eigen::VectorXd& x) {
        return testfn::heaviside_1d(x[0], 0.5, 1.0);
    };
    Eigen::VectorXd x(1);
    x << 0.5;
    const Eigen::VectorXd beta = beta_r_mc(f, x, 0.1, 50000, 12);
    CHECK(beta[0] == doctest::Approx(-7.5).epsilon(0.04));
}

TEST_CASE("half-space profile: closed form vs quadrature oracle") {
    for (int p : {1, 2, 3, 5}) {
        for (double t : {-0.09, -0.05, 0.0, 0.03, 0.08, 0.1, 0.2}) {
            const double closed = halfspace_beta(t, 0.1, p, 1.7);
            const double oracle = halfspace_beta_oracle(t, 0.1, p, 1.7);
            CHECK(closed == doctest::Approx(oracle).epsilon(1e-7));
        }
    }
    CHECK(halfspace_beta(0.0, 0.1, 1, 1.0) == doctest::Approx(-7.5));
    CHECK(halfspace_beta(0.15, 0.1, 2, 1.0) == 0.0);
    CHECK(halfspace_beta(-0.15, 0.1, 2, 1.0) == 0.0);
}

TEST_CASE("1D half-space profile matches 3c(t^2 - r^2)/(4 r^3)") {
    const double r = 0.07, c = 2.0;
    for (double t : {-0.05, -0.01, 0.0, 0.02, 0.06})
        CHECK(halfspace_beta(t, r, 1, c) ==
              doctest::Approx(3.0 * c * (t * t - r * r) / (4.0 * r * r * r))
                  .epsilon(1e-10));
}

TEST_CASE("flat_jump_beta points along the normal") {
    const Eigen::VectorXd u = testfn::random_unit_vector(3, 2);
    const auto f3 = testfn::ridge_family("f3", u);
    const BetaFn beta = flat_jump_beta(f3.jumps);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.5); // on boundary
    const double r = 0.05;
    const Eigen::VectorXd b = beta(x, r);
    const double expected = halfspace_beta(0.0, r, 3, 1.0);
    CHECK((b - expected * f3.jumps[0].normal).norm() <= 1e-12);
}

TEST_CASE("beta_r_quadrature approaches the gradient of a smooth function") {
    const ScalarFn g = [](const Eigen::VectorXd& x) {
        return std::sin(2.0 * M_PI * x[0]) + x[1] * x[1];
    };
    const Eigen::Vector2d x(0.37, 0.62);
    const Eigen::VectorXd beta = beta_r_quadrature(g, x, 1e-3, 16, 32);
    const Eigen::Vector2d grad(2.0 * M_PI * std::cos(2.0 * M_PI * 0.37),
                               2.0 * 0.62);
    CHECK((beta - Eigen::VectorXd(grad)).norm() <= 0.02);
}

TEST_CASE("beta_r_quadrature is exact for quadratics") {
    const ScalarFn f = [](const Eigen::VectorXd& x) {
        return (x[0] - 0.2) * (x[0] - 0.2) + 3.0 * x[1];
    };
    const Eigen::Vector2d x(0.6, 0.3);
    const Eigen::VectorXd beta = beta_r_quadrature(f, x, 0.05);
    CHECK(beta[0] == doctest::Approx(2.0 * (0.6 - 0.2)).epsilon(1e-8));
    CHECK(beta[1] == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("a_p_constant closed forms") {
    CHECK(std::abs(a_p_constant(1) - 5.0 / 3.0) <= 1e-10);
    CHECK(std::abs(a_p_constant(2) - 315.0 * M_PI * M_PI / 2048.0) <= 1e-8);
    CHECK(std::abs(a_p_constant(3) - 7.0 / 5.0) <= 1e-8);
    CHECK_THROWS_AS(a_p_constant(0), InvalidInputError);
}

TEST_CASE("1D scalar quadrature reproduces 3/(5r)") {
    const auto step = testfn::heaviside_function(0.5, 1.0);
    const double r = 0.01;
    const double b = b_r_scalar_quadrature(step.jumps, r);
    CHECK(b == doctest::Approx(3.0 / (5.0 * r)).epsilon(1e-6));
    CHECK((5.0 * r / 3.0) * b == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("1D scalar quadrature adds separated jumps") {
    std::vector<testfn::JumpComponent> jumps = {
        testfn::heaviside_function(0.3, 1.0).jumps[0],
        testfn::heaviside_function(0.7, 2.0).jumps[0]};
    const double r = 0.01;
    CHECK((5.0 * r / 3.0) * b_r_scalar_quadrature(jumps, r) ==
          doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("b_r_matrix of a constant is zero within noise") {
    const ScalarFn f = [](const Eigen::VectorXd&) { return 2.0; };
    McSettings settings;
    settings.m_outer = 1000;
    settings.seed = 3;
    // the inner MC solve leaves a noise floor of c^2 (P+2) / (r^2 m_inner)
    // on the diagonal, so drive m_inner up to push it below the tolerance
    settings.m_inner = 20000;
    const SpectralMatrix b = b_r_matrix(f, uniform_cube(2), 2, 0.2, settings);
    CHECK(b.entries().norm() <= 0.05);
}

TEST_CASE("b_r_matrix is deterministic") {
    const ScalarFn f = [](const Eigen::VectorXd& x) { return x[0]; };
    McSettings settings;
    settings.m_outer = 1000;
    settings.seed = 8;
    const SpectralMatrix a = b_r_matrix(f, uniform_cube(2), 2, 0.1, settings);
    const SpectralMatrix b = b_r_matrix(f, uniform_cube(2), 2, 0.1, settings);
    CHECK((a.entries() - b.entries()).norm() == 0.0);
}

TEST_CASE("extended_asm on a constant gives zero matrices") {
    const ScalarFn f = [](const Eigen::VectorXd&) { return 1.0; };
    McSettings settings;
    settings.m_outer = 1000;
    settings.seed = 4;
    settings.m_inner = 20000;
    const auto est = extended_asm(f, uniform_cube(2), 2, {0.2, 0.1}, settings);
    REQUIRE(est.matrices.size() == 2);
    for (const auto& m : est.matrices) CHECK(m.entries().norm() <= 0.05);
    CHECK(est.a_p == doctest::Approx(a_p_constant(2)));
}

TEST_CASE("extended_asm radii validation") {
    const ScalarFn f = [](const Eigen::VectorXd&) { return 1.0; };
    McSettings settings;
    settings.m_outer = 1000;
    CHECK_THROWS_AS(extended_asm(f, uniform_cube(2), 2, {0.1, 0.2}, settings),
                    InvalidInputError);
    CHECK_THROWS_AS(extended_asm(f, uniform_cube(2), 2, {1e-5}, settings),
                    InvalidInputError);
}

TEST_CASE("extended_asm smooth quadratic shrinks linearly in r") {
    // Theorem 1: B^r stays finite, so A_P r B^r scales with r
    const BetaFn beta = [](const Eigen::VectorXd& x, double) {
        return Eigen::VectorXd(
            Eigen::Vector2d(2.0 * (x[0] - 0.5), 2.0 * (x[1] - 0.5)));
    };
    McSettings settings;
    settings.m_outer = 20000;
    settings.seed = 5;
    const auto est =
        extended_asm(beta, uniform_cube(2), 2, {0.1, 0.05}, settings);
    const double ratio =
        est.matrices[0].entries()(0, 0) / est.matrices[1].entries()(0, 0);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("theorem3 oracle: single plane of unit patch length") {
    // h(x) = 0.5 - x1, c = 1, uniform density: integral is e1 e1^T
    testfn::JumpComponent jump;
    jump.normal = Eigen::Vector2d(-1.0, 0.0);
    jump.offset = 0.5;
    jump.c = 1.0;
    const ScalarFn density = [](const Eigen::VectorXd&) { return 1.0; };
    const SpectralMatrix rhs = theorem3_rhs_oracle({jump}, density, 2);
    Eigen::Matrix2d expected;
    expected << 1, 0, 0, 0;
    CHECK((rhs.entries() - expected).norm() <= 1e-10);
}

TEST_CASE("theorem3 oracle: f4 planes add clipped patch lengths") {
    const Eigen::VectorXd u = testfn::random_unit_vector(2, 9);
    const auto f4 = testfn::ridge_family("f4", u);
    const ScalarFn density = [](const Eigen::VectorXd&) { return 1.0; };
    const SpectralMatrix rhs = theorem3_rhs_oracle(f4.jumps, density, 2);
    // rank-1 along u with weight = total boundary length inside the square
    CHECK(subspace_cosine(rhs.leading_eigenvector(), u) >= 1.0 - 1e-10);
    CHECK(rhs.eigenvalues()[1] <= 1e-10 * rhs.eigenvalues()[0]);
    double total = 0.0;
    const Eigen::Vector2d center(0.5, 0.5);
    for (const auto& jump : f4.jumps) {
        // segment length of jump.h = 0 clipped to the unit square, brute force
        int inside = 0;
        const int m = 200000;
        Rng rng(31);
        for (int i = 0; i < m; ++i) {
            const Eigen::VectorXd x = rng.uniform_vec(2);
            if (std::abs(jump.h(x)) < 0.002) ++inside;
        }
        total += inside / (0.004 * m);
    }
    CHECK(rhs.eigenvalues()[0] == doctest::Approx(total).epsilon(0.05));
}

TEST_CASE("null directions of a ridge jump stay null") {
    const Eigen::VectorXd u = testfn::random_unit_vector(2, 14);
    const auto f3 = testfn::ridge_family("f3", u);
    Eigen::Vector2d w(-u[1], u[0]);
    std::vector<Eigen::VectorXd> grid;
    Rng rng(15);
    for (int i = 0; i < 10; ++i) grid.push_back(rng.uniform_vec(2));
    const double r = 0.05;
    const double worst = null_direction_check(f3.eval, w, grid, r, 40000, 16);
    // beta scale is ~3/(4r); the tangential part is pure MC noise
    CHECK(worst <= 0.05 * 3.0 / (4.0 * r));
}

TEST_CASE("default_inner_samples floor") {
    CHECK(default_inner_samples(1) == 2000);
    CHECK(default_inner_samples(3) == 2000);
    CHECK(default_inner_samples(20) == 4000);
}
