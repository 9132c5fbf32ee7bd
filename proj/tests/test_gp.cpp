#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jumpsas/core.hpp"
#include "jumpsas/gp.hpp"

#include <cmath>

using namespace jumpsas;
using namespace jumpsas::gp;

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

const std::vector<KernelFamily> all_families = {
    KernelFamily::gaussian, KernelFamily::matern52, KernelFamily::matern32};

} // namespace

TEST_CASE("kernel family names round trip") {
    for (auto family : all_families)
        CHECK(family_from_name(family_name(family)) == family);
    CHECK_THROWS_AS(family_from_name("cubic"), InvalidInputError);
}

TEST_CASE("kernel_eval known value") {
    KernelSpec spec;
    spec.family = KernelFamily::gaussian;
    spec.lengthscales = Eigen::VectorXd::Ones(2);
    spec.variance = 1.0;
    const Eigen::Vector2d a(0, 0), b(1, 0);
    CHECK(kernel_eval(spec, a, b) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(kernel_eval(spec, a, a) == doctest::Approx(1.0));
}

TEST_CASE("kernel_eval matern forms at d = 1") {
    KernelSpec spec;
    spec.lengthscales = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd a(1), b(1);
    a << 0;
    b << 1;
    spec.family = KernelFamily::matern32;
    const double s3 = std::sqrt(3.0);
    CHECK(kernel_eval(spec, a, b) ==
          doctest::Approx((1 + s3) * std::exp(-s3)).epsilon(1e-12));
    spec.family = KernelFamily::matern52;
    const double s5 = std::sqrt(5.0);
    CHECK(kernel_eval(spec, a, b) ==
          doctest::Approx((1 + s5 + 5.0 / 3.0) * std::exp(-s5))
              .epsilon(1e-12));
}

TEST_CASE("KernelSpec validation") {
    KernelSpec spec;
    spec.lengthscales = Eigen::VectorXd::Ones(2);
    CHECK_NOTHROW(spec.validate());
    spec.lengthscales[1] = 0.0;
    CHECK_THROWS_AS(spec.validate(), InvalidInputError);
    spec.lengthscales[1] = 1.0;
    spec.variance = -1.0;
    CHECK_THROWS_AS(spec.validate(), InvalidInputError);
}

TEST_CASE("fit interpolates linear data for every family") {
    const auto data = sample_fn(20, 1, 42, [](const Eigen::VectorXd& x) {
        return 0.5 + x[0];
    });
    for (auto family : all_families) {
        const GpModel model = GpModel::fit(data, family, 7);
        double ss = 0.0;
        for (int i = 0; i < data.n(); ++i) {
            const double resid =
                model.predict_mean(data.inputs.row(i).transpose()) -
                data.responses[i];
            ss += resid * resid;
        }
        CHECK(std::sqrt(ss / data.n()) <= 1e-4);
    }
}

TEST_CASE("three collinear points predict near the midpoint interpolant") {
    Dataset data;
    data.inputs.resize(3, 1);
    data.inputs << 0.0, 0.5, 1.0;
    data.responses.resize(3);
    data.responses << 1.0, 2.0, 3.0;
    const GpModel model = GpModel::fit(data, KernelFamily::gaussian, 3);
    Eigen::VectorXd q(1);
    q << 0.25;
    CHECK(model.predict_mean(q) == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("far-field prediction reverts to the response mean") {
    Dataset data;
    data.inputs.resize(3, 1);
    data.inputs << 0.4, 0.5, 0.6;
    data.responses.resize(3);
    data.responses << 1.0, 5.0, 3.0;
    KernelSpec spec;
    spec.family = KernelFamily::gaussian;
    spec.lengthscales = Eigen::VectorXd::Ones(1);
    spec.variance = 1.0;
    spec.nugget = 1e-8;
    const GpModel model = GpModel::with_spec(data, spec);
    Eigen::VectorXd far(1);
    far << 100.0;
    CHECK(model.predict_mean(far) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("fitted gradient of a linear response") {
    const auto data = sample_fn(50, 2, 5, [](const Eigen::VectorXd& x) {
        return 3.0 * x[0];
    });
    const GpModel model = GpModel::fit(data, KernelFamily::gaussian, 9);
    const Eigen::VectorXd g =
        model.mean_gradient(Eigen::Vector2d(0.5, 0.5));
    CHECK(g[0] == doctest::Approx(3.0).epsilon(0.05 / 3.0));
    CHECK(std::abs(g[1]) <= 0.05);
}

TEST_CASE("analytic gradient matches central finite differences") {
    const auto data = sample_fn(40, 3, 13, [](const Eigen::VectorXd& x) {
        return std::sin(3.0 * x[0]) + x[1] * x[2];
    });
    const double h = 1e-4;
    for (auto family : all_families) {
        const GpModel model = GpModel::fit(data, family, 21);
        Rng rng(31);
        for (int t = 0; t < 100; ++t) {
            const Eigen::VectorXd x = rng.uniform_vec(3);
            const Eigen::VectorXd g = model.mean_gradient(x);
            Eigen::VectorXd fd(3);
            for (int j = 0; j < 3; ++j) {
                Eigen::VectorXd hi = x, lo = x;
                hi[j] += h;
                lo[j] -= h;
                fd[j] = (model.predict_mean(hi) - model.predict_mean(lo)) /
                        (2.0 * h);
            }
            const double scale = std::max(g.norm(), 1e-8);
            CHECK((g - fd).norm() / scale <= 1e-5);
        }
    }
}

TEST_CASE("fit input validation") {
    Dataset tiny;
    tiny.inputs.resize(2, 1);
    tiny.inputs << 0.1, 0.9;
    tiny.responses.resize(2);
    tiny.responses << 1, 2;
    CHECK_THROWS_AS(GpModel::fit(tiny, KernelFamily::gaussian, 1),
                    InvalidInputError);

    Dataset dup;
    dup.inputs.resize(3, 1);
    dup.inputs << 0.1, 0.1, 0.9;
    dup.responses.resize(3);
    dup.responses << 1, 2, 3;
    CHECK_THROWS_AS(GpModel::fit(dup, KernelFamily::gaussian, 1),
                    InvalidInputError);
}

TEST_CASE("fit is deterministic in the seed") {
    const auto data = sample_fn(25, 2, 99, [](const Eigen::VectorXd& x) {
        return x[0] * x[0] + 0.3 * x[1];
    });
    const GpModel a = GpModel::fit(data, KernelFamily::matern52, 17);
    const GpModel b = GpModel::fit(data, KernelFamily::matern52, 17);
    CHECK(a.kernel().lengthscales == b.kernel().lengthscales);
    CHECK(a.kernel().variance == b.kernel().variance);
    CHECK(a.log_marginal_likelihood() == b.log_marginal_likelihood());
}

TEST_CASE("summary reports the fitted hyperparameters") {
    const auto data = sample_fn(15, 2, 3, [](const Eigen::VectorXd& x) {
        return x[0];
    });
    const GpModel model = GpModel::fit(data, KernelFamily::matern32, 4);
    const auto doc = model.summary();
    CHECK(doc["family"] == "matern32");
    CHECK(doc["lengthscales"].size() == 2);
    CHECK(doc.contains("log_marginal_likelihood"));
}
