#include "jumpsas/verify.hpp"

#include "jumpsas/discas.hpp"
#include "jumpsas/testfn.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace jumpsas::verify {

namespace {

using discas::ScalarFn;

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

} // namespace

nlohmann::json CheckResult::to_json() const {
    return {{"name", name},
            {"statistic", statistic},
            {"threshold", threshold},
            {"pass", pass},
            {"detail", detail}};
}

CheckResult check_a_p_constants() {
    const double a1 = discas::a_p_constant(1);
    const double a2 = discas::a_p_constant(2);
    const double a3 = discas::a_p_constant(3);
    const double ref2 = 315.0 * M_PI * M_PI / 2048.0;
    const double e1 = std::abs(a1 - 5.0 / 3.0);
    const double e2 = std::abs(a2 - ref2);
    const double e3 = std::abs(a3 - 7.0 / 5.0);

    CheckResult result;
    result.name = "a_p_constants";
    result.statistic = std::max({e1, e2, e3});
    result.threshold = 1e-8;
    result.pass = e1 <= 1e-10 && e2 <= 1e-8 && e3 <= 1e-8;
    result.detail = "A_1 err " + fmt(e1) + " (tol 1e-10), A_2 err " + fmt(e2) +
                    ", A_3 err " + fmt(e3) + " (tol 1e-8)";
    return result;
}

CheckResult check_lemma1(const TheoryOptions& opts) {
    // beta_r of a smooth function approaches its gradient as r -> 0
    const ScalarFn g = [](const Eigen::VectorXd& x) {
        return std::sin(2.0 * M_PI * x[0]) + x[1] * x[1];
    };
    const auto grad = [](const Eigen::VectorXd& x) {
        return Eigen::Vector2d(2.0 * M_PI * std::cos(2.0 * M_PI * x[0]),
                               2.0 * x[1]);
    };

    Rng rng(opts.seed);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd x = rng.uniform_vec(2);
        const Eigen::VectorXd beta =
            discas::beta_r_quadrature(g, x, opts.lemma1_radius, 16, 32);
        worst = std::max(worst, (beta - Eigen::VectorXd(grad(x))).norm());
    }

    CheckResult result;
    result.name = "lemma1_beta_to_gradient";
    result.statistic = worst;
    result.threshold = 0.02;
    result.pass = worst <= result.threshold;
    result.detail = "max ||beta_r - grad g|| over 10 probes at r = " +
                    fmt(opts.lemma1_radius);
    return result;
}

CheckResult check_theorem1(const TheoryOptions& opts) {
    // B^r approaches C for a smooth quadratic
    const ScalarFn f = [](const Eigen::VectorXd& x) {
        return (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
    };

    Rng rng(opts.seed ^ 0x7175616472617469ULL);
    Eigen::Matrix2d c_acc = Eigen::Matrix2d::Zero();
    const int m_grad = 100000;
    for (int i = 0; i < m_grad; ++i) {
        const Eigen::VectorXd x = rng.uniform_vec(2);
        const Eigen::Vector2d g(2.0 * (x[0] - 0.5), 2.0 * (x[1] - 0.5));
        c_acc += g * g.transpose();
    }
    const Eigen::MatrixXd c = c_acc / m_grad;

    const discas::BetaFn beta = [&](const Eigen::VectorXd& x, double r) {
        return discas::beta_r_quadrature(f, x, r, 12, 24);
    };
    const SpectralMatrix b = discas::b_r_matrix_exact(
        beta, discas::uniform_cube(2), 2, opts.theorem1_radius,
        opts.theorem1_m_outer, opts.seed + 1);

    CheckResult result;
    result.name = "theorem1_br_matches_c";
    result.statistic = (b.entries() - c).norm() / c.norm();
    result.threshold = 0.05;
    result.pass = result.statistic <= result.threshold;
    result.detail = "relative Frobenius error at r = " +
                    fmt(opts.theorem1_radius);
    return result;
}

namespace {

CheckResult lemma3_case(const std::string& name,
                        const std::vector<double>& taus,
                        const std::vector<double>& jumps, double target,
                        double threshold, double r) {
    std::vector<testfn::JumpComponent> components;
    for (size_t j = 0; j < taus.size(); ++j) {
        const auto fn = testfn::heaviside_function(taus[j], jumps[j]);
        components.push_back(fn.jumps[0]);
    }
    const double b = discas::b_r_scalar_quadrature(components, r);
    const double scaled = (5.0 * r / 3.0) * b;

    CheckResult result;
    result.name = name;
    result.statistic = std::abs(scaled - target);
    result.threshold = threshold;
    result.pass = result.statistic <= threshold;
    result.detail = "(5r/3) B^r = " + fmt(scaled) + " vs " + fmt(target) +
                    " at r = " + fmt(r);
    return result;
}

} // namespace

CheckResult check_lemma3_single(const TheoryOptions& opts) {
    return lemma3_case("lemma3_single_jump", {0.5}, {1.0}, 1.0, 0.02,
                       opts.lemma3_radius);
}

CheckResult check_lemma3_two_jumps(const TheoryOptions& opts) {
    // c = (1, 2) at separated taus -> 1^2 + 2^2 = 5, within 2%
    return lemma3_case("lemma3_two_jumps", {0.3, 0.7}, {1.0, 2.0}, 5.0, 0.1,
                       opts.lemma3_radius);
}

CheckResult check_theorem2(const TheoryOptions& opts) {
    const Eigen::VectorXd u = testfn::random_unit_vector(3, opts.seed + 3);
    const auto f3 = testfn::ridge_family("f3", u);
    const SpectralMatrix b = discas::b_r_matrix_exact(
        discas::flat_jump_beta(f3.jumps), discas::uniform_cube(3), 3,
        opts.theorem2_radius, opts.theorem2_m_outer, opts.seed + 4);

    CheckResult result;
    result.name = "theorem2_ridge_range";
    result.statistic = std::max(b.eigenvalues()[1], 0.0) / b.eigenvalues()[0];
    result.threshold = 1e-3;
    result.pass = result.statistic <= result.threshold;
    result.detail = "lambda_2 / lambda_1 for f3 in P = 3";
    return result;
}

CheckResult check_theorem3(const TheoryOptions& opts, const std::string& fn) {
    const Eigen::VectorXd u = testfn::random_unit_vector(
        2, opts.seed + (fn == "f3" ? 5 : 6));
    const auto ridge = testfn::ridge_family(fn, u);

    const double r = opts.theorem3_radius;
    const SpectralMatrix b = discas::b_r_matrix_exact(
        discas::flat_jump_beta(ridge.jumps), discas::uniform_cube(2), 2, r,
        opts.theorem3_m_outer, opts.seed + 7);
    const Eigen::MatrixXd lhs = discas::a_p_constant(2) * r * b.entries();

    const ScalarFn uniform_density = [](const Eigen::VectorXd&) {
        return 1.0;
    };
    const SpectralMatrix rhs =
        discas::theorem3_rhs_oracle(ridge.jumps, uniform_density, 2);

    CheckResult result;
    result.name = "theorem3_boundary_integral_" + fn;
    result.statistic = (lhs - rhs.entries()).norm() / rhs.entries().norm();
    result.threshold = 0.1;
    result.pass = result.statistic <= result.threshold;
    result.detail = "relative Frobenius error of A_P r B^r vs boundary "
                    "integral at r = " + fmt(r);
    return result;
}

namespace {

// exact beta for mixed_2d: half-space profile along x1 plus the quadratic's
// exact slope along x2 (third derivatives vanish, so beta equals the
// derivative there)
Eigen::MatrixXd corollary1_matrix(const TheoryOptions& opts, double r,
                                  std::uint64_t seed) {
    const auto mixed = testfn::mixed_2d_function();
    const discas::BetaFn jump_beta = discas::flat_jump_beta(mixed.jumps);
    const discas::BetaFn beta = [jump_beta](const Eigen::VectorXd& x,
                                            double radius) {
        Eigen::VectorXd b = jump_beta(x, radius);
        b[1] += 12.0 * (x[1] - 0.5);
        return b;
    };
    const SpectralMatrix b = discas::b_r_matrix_exact(
        beta, discas::uniform_cube(2), 2, r, opts.corollary1_m_outer, seed);
    return discas::a_p_constant(2) * r * b.entries();
}

} // namespace

CheckResult check_corollary1_smooth_rate(const TheoryOptions& opts) {
    const double r = opts.corollary1_radius;
    const Eigen::MatrixXd coarse = corollary1_matrix(opts, r, opts.seed + 8);
    const Eigen::MatrixXd fine =
        corollary1_matrix(opts, 0.5 * r, opts.seed + 9);
    const double ratio = coarse(1, 1) / fine(1, 1);

    CheckResult result;
    result.name = "corollary1_smooth_direction_rate";
    result.statistic = ratio;
    result.threshold = 2.3; // window [1.7, 2.3]
    result.pass = ratio >= 1.7 && ratio <= 2.3;
    result.detail = "smooth-direction entry ratio when r halves from " +
                    fmt(r) + "; window [1.7, 2.3]";
    return result;
}

CheckResult check_corollary1_jump_stable(const TheoryOptions& opts) {
    const double r = opts.corollary1_radius;
    const Eigen::MatrixXd coarse = corollary1_matrix(opts, r, opts.seed + 8);
    const Eigen::MatrixXd fine =
        corollary1_matrix(opts, 0.5 * r, opts.seed + 9);
    const double change =
        std::abs(coarse(0, 0) - fine(0, 0)) / std::abs(fine(0, 0));

    CheckResult result;
    result.name = "corollary1_jump_direction_stable";
    result.statistic = change;
    result.threshold = 0.10;
    result.pass = change <= result.threshold;
    result.detail = "jump-direction entry relative change when r halves";
    return result;
}

std::vector<CheckResult> run_all(const TheoryOptions& opts) {
    return {check_a_p_constants(),
            check_lemma1(opts),
            check_theorem1(opts),
            check_lemma3_single(opts),
            check_lemma3_two_jumps(opts),
            check_theorem2(opts),
            check_theorem3(opts, "f3"),
            check_theorem3(opts, "f4"),
            check_corollary1_smooth_rate(opts),
            check_corollary1_jump_stable(opts)};
}

} // namespace jumpsas::verify
