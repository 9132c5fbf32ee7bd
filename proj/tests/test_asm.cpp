#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jumpsas/asm.hpp"
#include "jumpsas/testfn.hpp"

#include <cmath>

using namespace jumpsas;
using namespace jumpsas::active;

namespace {

Dataset sample_fn(int n, int p, std::uint64_t seed,
                  const std::function<double(const Eigen::VectorXd&)>& f) {
    Rng rng(seed);
    Dataset data;
    data.inputs.resize(n, p);
    data.responses.resize(n);
    for (int i = 0; i < n; ++i) {
        data.inputs.row(i) = rng.uniform_vec(p).transpose();
        data.responses[i] = f(data.inputs.row(i).transpose());
    }
    return data;
}

} // namespace

TEST_CASE("pwl estimator on constants and lines") {
    CHECK(pwl_active_subspace_1d([](double) { return 3.0; }, 50) == 0.0);
    CHECK(pwl_active_subspace_1d([](double x) { return x; }, 17) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pwl estimator diverges as n_g - 1 on a step") {
    const auto step = [](double x) {
        return testfn::heaviside_1d(x, 0.5, 1.0);
    };
    CHECK(pwl_active_subspace_1d(step, 2) == doctest::Approx(1.0));
    CHECK(pwl_active_subspace_1d(step, 10) == doctest::Approx(9.0));
    for (int n_g = 2; n_g <= 100; ++n_g)
        CHECK(std::abs(pwl_active_subspace_1d(step, n_g) - (n_g - 1)) <=
              1e-9);
    CHECK_THROWS_AS(pwl_active_subspace_1d(step, 1), InvalidInputError);
}

TEST_CASE("importance normalization") {
    Eigen::Matrix2d a;
    a << 4, 0, 0, 0;
    CHECK((importance(SpectralMatrix(a)) - Eigen::Vector2d(1, 0)).norm() <
          1e-14);
    Eigen::Matrix2d b;
    b << 3, 0, 0, 4;
    CHECK((importance(SpectralMatrix(b)) - Eigen::Vector2d(0.6, 0.8))
              .norm() < 1e-14);
    bool degenerate = false;
    const Eigen::VectorXd zero =
        importance(SpectralMatrix(Eigen::Matrix2d::Zero()), &degenerate);
    CHECK(zero.norm() == 0.0);
    CHECK(degenerate);
}

TEST_CASE("subspace_error hand values") {
    const Eigen::Vector2d u(1, 0);
    CHECK(subspace_error(SpectralMatrix(u * u.transpose()), u) ==
          doctest::Approx(0.0).epsilon(1e-12));
    const Eigen::Vector2d v(0, 1);
    CHECK(subspace_error(SpectralMatrix(v * v.transpose()), u) ==
          doctest::Approx(1.0).epsilon(1e-12));
    Eigen::Matrix2d c;
    c << 2, 0, 0, 1;
    const Eigen::Vector2d diag(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    CHECK(subspace_error(SpectralMatrix(c), diag) ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(
        subspace_error(SpectralMatrix(Eigen::Matrix2d::Zero()), u),
        DegenerateError);
}

TEST_CASE("select_dim picks the largest log gap") {
    Eigen::VectorXd lam(4);
    lam << 100.0, 90.0, 1.0, 0.9;
    CHECK(select_dim(lam) == 2);
    lam << 100.0, 1.0, 0.01, 0.0001;
    CHECK(select_dim(lam) == 1); // ties toward smaller k
}

TEST_CASE("mc_active_subspace recovers the linear-slope matrix") {
    const auto data = sample_fn(100, 2, 8, [](const Eigen::VectorXd& x) {
        return 2.0 * x[0];
    });
    const gp::GpModel model = gp::GpModel::fit(data, gp::KernelFamily::gaussian, 12);
    const SpectralMatrix c = mc_active_subspace(model, 10000, 99);
    CHECK(c.entries()(0, 0) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(c.entries()(1, 1)) <= 0.05);
    CHECK(subspace_cosine(c.leading_eigenvector(), Eigen::Vector2d(1, 0)) >=
          0.99);
}

TEST_CASE("mc_active_subspace recovers the f1 ridge at N = 200") {
    Eigen::Vector3d u(1, 0, 0);
    const auto f1 = testfn::ridge_family("f1", u);
    const auto data = sample_fn(200, 3, 44, f1.eval);
    const gp::GpModel model =
        gp::GpModel::fit(data, gp::KernelFamily::gaussian, 45);
    const SpectralMatrix c = mc_active_subspace(model, 10000, 46);
    CHECK(subspace_cosine(c.leading_eigenvector(), u) >= 0.95);
}

TEST_CASE("mc_active_subspace is deterministic and validates m") {
    const auto data = sample_fn(30, 2, 3, [](const Eigen::VectorXd& x) {
        return x[0] + x[1];
    });
    const gp::GpModel model =
        gp::GpModel::fit(data, gp::KernelFamily::matern32, 2);
    const SpectralMatrix a = mc_active_subspace(model, 2000, 5);
    const SpectralMatrix b = mc_active_subspace(model, 2000, 5);
    CHECK((a.entries() - b.entries()).norm() == 0.0);
    CHECK_THROWS_AS(mc_active_subspace(model, 50, 5), InvalidInputError);
}

TEST_CASE("make_report handles the zero matrix without crashing") {
    const auto report = make_report(SpectralMatrix(Eigen::Matrix3d::Zero()));
    CHECK(report.degenerate);
    CHECK(report.selected_dim == 1);
    CHECK(report.importances.norm() == 0.0);
}

TEST_CASE("make_report on a clear two-gap spectrum") {
    Eigen::Matrix3d m = Eigen::Vector3d(9.0, 4.0, 1e-6).asDiagonal();
    const auto report = make_report(SpectralMatrix(m));
    CHECK_FALSE(report.degenerate);
    CHECK(report.selected_dim == 2);
    CHECK(report.leading_vectors.cols() == 2);
}
