#pragma once

#include "jumpsas/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jumpsas::testfn {

/// One jump component c * 1[h(x) <= 0] with affine boundary
/// h(x) = normal . x + offset, ||normal|| = 1.
struct JumpComponent {
    Eigen::VectorXd normal;
    double offset;
    double c;

    double h(const Eigen::VectorXd& x) const { return normal.dot(x) + offset; }
};

/// Analytic test function, total on all of R^P so ball sampling near the
/// cube boundary stays well defined.
struct TestFunction {
    std::string name;
    int dim = 0;
    bool smooth = false;
    std::function<double(const Eigen::VectorXd&)> eval;
    std::optional<Eigen::VectorXd> ridge_direction;
    std::vector<JumpComponent> jumps; // empty when smooth or unknown
};

/// c if x <= tau else 0 (closed-set convention).
double heaviside_1d(double x, double tau, double c);

/// indicator(x1 >= 0.5) + 6 (x2 - 0.5)^2.
double mixed_2d(const Eigen::VectorXd& x);

/// Ridge test family:
///   f1 = (u.x)^2
///   f2 = exp(-(u.x)^2)
///   f3 = 1[u.(x - 0.5) >= 0]
///   f4 = 1[sin((10 pi / P) u.(x - 0.5)) >= 0]
/// `which` is one of "f1".."f4"; u must be unit length.
TestFunction ridge_family(const std::string& which, const Eigen::VectorXd& u);

/// Uniform draw on the unit (P-1)-sphere.
Eigen::VectorXd random_unit_vector(int p, std::uint64_t seed);

/// mixed_2d and heaviside wrapped as TestFunction, for the CLI registry.
TestFunction mixed_2d_function();
TestFunction heaviside_function(double tau = 0.5, double c = 1.0);

} // namespace jumpsas::testfn
