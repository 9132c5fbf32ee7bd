#include "jumpsas/testfn.hpp"

#include <cmath>

namespace jumpsas::testfn {

double heaviside_1d(double x, double tau, double c) {
    return x <= tau ? c : 0.0;
}

double mixed_2d(const Eigen::VectorXd& x) {
    if (x.size() != 2)
        throw InvalidInputError("mixed_2d: expects a 2-vector");
    const double jump = x[0] >= 0.5 ? 1.0 : 0.0;
    return jump + 6.0 * (x[1] - 0.5) * (x[1] - 0.5);
}

namespace {

void require_unit(const Eigen::VectorXd& u) {
    if (std::abs(u.norm() - 1.0) > 1e-12)
        throw InvalidInputError("ridge_family: u must be unit length");
}

} // namespace

TestFunction ridge_family(const std::string& which, const Eigen::VectorXd& u) {
    require_unit(u);
    const int p = static_cast<int>(u.size());
    const Eigen::VectorXd center = Eigen::VectorXd::Constant(p, 0.5);

    TestFunction fn;
    fn.dim = p;
    fn.name = which;
    fn.ridge_direction = u;

    if (which == "f1") {
        fn.smooth = true;
        fn.eval = [u](const Eigen::VectorXd& x) {
            const double t = u.dot(x);
            return t * t;
        };
    } else if (which == "f2") {
        fn.smooth = true;
        fn.eval = [u](const Eigen::VectorXd& x) {
            const double t = u.dot(x);
            return std::exp(-t * t);
        };
    } else if (which == "f3") {
        fn.smooth = false;
        fn.eval = [u, center](const Eigen::VectorXd& x) {
            return u.dot(x - center) >= 0.0 ? 1.0 : 0.0;
        };
        // f3 = 1[h <= 0] with h(x) = -u.(x - 0.5)
        JumpComponent jump;
        jump.normal = -u;
        jump.offset = u.dot(center);
        jump.c = 1.0;
        fn.jumps.push_back(jump);
    } else if (which == "f4") {
        fn.smooth = false;
        const double omega = 10.0 * M_PI / p;
        fn.eval = [u, center, omega](const Eigen::VectorXd& x) {
            return std::sin(omega * u.dot(x - center)) >= 0.0 ? 1.0 : 0.0;
        };
        // Zero crossings at u.(x - 0.5) = k P / 10. Crossing upward past an
        // odd k drops f from 1 to 0 and past an even k raises it, so in the
        // sum-of-indicators form c_k = +1 (k odd), -1 (k even). Enumerate the
        // planes that can intersect the unit cube, with slack for
        // finite-radius probes just outside it.
        const double spacing = p / 10.0;
        const double reach = 0.5 * u.cwiseAbs().sum() + spacing;
        const int kmax = static_cast<int>(std::floor(reach / spacing));
        for (int k = -kmax; k <= kmax; ++k) {
            JumpComponent jump;
            jump.normal = u;
            jump.offset = -u.dot(center) - k * spacing;
            jump.c = (k % 2 != 0) ? 1.0 : -1.0;
            fn.jumps.push_back(jump);
        }
    } else {
        throw InvalidInputError("ridge_family: unknown function '" + which +
                                "'");
    }
    return fn;
}

Eigen::VectorXd random_unit_vector(int p, std::uint64_t seed) {
    if (p < 1)
        throw InvalidInputError("random_unit_vector: dimension must be >= 1");
    Rng rng(seed);
    Eigen::VectorXd v;
    double norm;
    do {
        v = rng.normal_vec(p);
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

TestFunction mixed_2d_function() {
    TestFunction fn;
    fn.name = "mixed2d";
    fn.dim = 2;
    fn.smooth = false;
    fn.eval = mixed_2d;
    JumpComponent jump;
    // indicator(x1 >= 0.5) = 1[h <= 0] with h(x) = 0.5 - x1
    jump.normal = Eigen::Vector2d(-1.0, 0.0);
    jump.offset = 0.5;
    jump.c = 1.0;
    fn.jumps.push_back(jump);
    return fn;
}

TestFunction heaviside_function(double tau, double c) {
    TestFunction fn;
    fn.name = "heaviside";
    fn.dim = 1;
    fn.smooth = false;
    fn.eval = [tau, c](const Eigen::VectorXd& x) {
        return heaviside_1d(x[0], tau, c);
    };
    JumpComponent jump;
    jump.normal = Eigen::VectorXd::Ones(1);
    jump.offset = -tau;
    jump.c = c;
    fn.jumps.push_back(jump);
    return fn;
}

} // namespace jumpsas::testfn
