#include "jumpsas/discas.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <map>
#include <mutex>

namespace jumpsas::discas {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
}

// --- quadrature helpers ---------------------------------------------------

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                                depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (a >= b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

struct GlRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Legendre roots by Newton iteration.
const GlRule& gl_rule(int n) {
    static std::map<int, GlRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GlRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 =
                    ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Unit-ball 1D marginal normalizer Z_P = int_{-1}^{1} (1-s^2)^((P-1)/2) ds,
// by quadrature (this module never trusts the Gamma-function closed form).
double marginal_normalizer(int p) {
    static std::map<int, double> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    const double ex = 0.5 * (p - 1);
    const double z = adaptive_simpson(
        [ex](double s) { return std::pow(1.0 - s * s, ex); }, -1.0, 1.0,
        1e-14);
    cache.emplace(p, z);
    return z;
}

} // namespace

MuSampler uniform_cube(int p) {
    if (p < 1) throw InvalidInputError("uniform_cube: dimension must be >= 1");
    return [p](Rng& rng) { return rng.uniform_vec(p); };
}

BallSample ball_sample(int p, double r, int m, std::uint64_t seed) {
    if (p < 1) throw InvalidInputError("ball_sample: dimension must be >= 1");
    if (r <= 0.0) throw InvalidInputError("ball_sample: radius must be > 0");
    if (m < 1) throw InvalidInputError("ball_sample: m must be >= 1");

    BallSample out{r, p, Eigen::MatrixXd(m, p), seed};
    Rng rng(seed);
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd dir;
        double norm;
        do {
            dir = rng.normal_vec(p);
            norm = dir.norm();
        } while (norm < 1e-12);
        const double radius = r * std::pow(rng.uniform(), 1.0 / p);
        out.points.row(i) = (radius / norm) * dir.transpose();
    }
    return out;
}

Eigen::VectorXd beta_r_mc(const ScalarFn& f, const Eigen::VectorXd& x,
                          double r, int m, std::uint64_t seed) {
    const int p = static_cast<int>(x.size());
    if (m < 10 * p)
        throw InvalidInputError("beta_r_mc: m must be >= 10 * P");
    const BallSample sample = ball_sample(p, r, m, seed);

    Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd z = sample.points.row(i).transpose();
        moment.selfadjointView<Eigen::Lower>().rankUpdate(z);
        rhs += z * f(x + z);
    }
    Eigen::MatrixXd sym = moment.selfadjointView<Eigen::Lower>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() <=
        1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0))
        throw DegenerateError(
            "beta_r_mc: rank-deficient empirical moment matrix");
    return es.eigenvectors() *
           (es.eigenvectors().transpose() * rhs).cwiseQuotient(
               es.eigenvalues());
}

double halfspace_beta_oracle(double t, double r, int p, double c) {
    if (r <= 0.0)
        throw InvalidInputError("halfspace_beta_oracle: radius must be > 0");
    if (t <= -r || t >= r) return 0.0;
    const double z = marginal_normalizer(p);
    const double ex = 0.5 * (p - 1);
    // m_P(t) = int_{-r}^{t} s p_P(s) ds with p_P(s) = (1-(s/r)^2)^ex / (r Z)
    const double m = adaptive_simpson(
        [r, ex](double s) {
            return s * std::pow(1.0 - (s / r) * (s / r), ex);
        },
        -r, t, 1e-13 * r * r) / (r * z);
    return c * (p + 2) / (r * r) * m;
}

double halfspace_beta(double t, double r, int p, double c) {
    if (r <= 0.0)
        throw InvalidInputError("halfspace_beta: radius must be > 0");
    const double u = t / r;
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double z = marginal_normalizer(p);
    const double m =
        -(r / (z * (p + 1))) * std::pow(1.0 - u * u, 0.5 * (p + 1));
    return c * (p + 2) / (r * r) * m;
}

BetaFn flat_jump_beta(const std::vector<testfn::JumpComponent>& jumps) {
    // normalize boundary normals once; h <= 0 is unchanged by the rescale
    std::vector<testfn::JumpComponent> unit = jumps;
    for (auto& jump : unit) {
        const double norm = jump.normal.norm();
        if (norm < 1e-14)
            throw InvalidInputError("flat_jump_beta: zero normal");
        jump.normal /= norm;
        jump.offset /= norm;
    }
    return [unit](const Eigen::VectorXd& x, double r) {
        const int p = static_cast<int>(x.size());
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
        for (const auto& jump : unit) {
            const double t = -jump.h(x); // signed distance, > 0 inside
            const double coef = halfspace_beta(t, r, p, jump.c);
            if (coef != 0.0) beta += coef * jump.normal;
        }
        return beta;
    };
}

Eigen::VectorXd beta_r_quadrature(const ScalarFn& f, const Eigen::VectorXd& x,
                                  double r, int n_radial, int n_angle) {
    const int p = static_cast<int>(x.size());
    if (r <= 0.0)
        throw InvalidInputError("beta_r_quadrature: radius must be > 0");

    if (p == 1) {
        // (3/r^2) * (1/(2r)) int_{-r}^{r} s f(x+s) ds
        const GlRule& rule = gl_rule(2 * n_radial);
        double acc = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = r * rule.nodes[i];
            Eigen::VectorXd xs = x;
            xs[0] += s;
            acc += rule.weights[i] * s * f(xs);
        }
        acc *= r; // jacobian of s = r * node
        Eigen::VectorXd beta(1);
        beta[0] = 3.0 / (r * r) * acc / (2.0 * r);
        return beta;
    }
    if (p == 2) {
        // (4/r^2) * (1/(pi r^2)) int f(x + rho w) rho w * rho drho dtheta
        const GlRule& rule = gl_rule(n_radial);
        Eigen::Vector2d acc = Eigen::Vector2d::Zero();
        const double dtheta = 2.0 * M_PI / n_angle;
        for (int a = 0; a < n_angle; ++a) {
            const double theta = a * dtheta;
            const Eigen::Vector2d w(std::cos(theta), std::sin(theta));
            for (int i = 0; i < n_radial; ++i) {
                const double rho = 0.5 * r * (rule.nodes[i] + 1.0);
                const double weight =
                    0.5 * r * rule.weights[i] * dtheta * rho * rho;
                acc += weight * f(x + rho * w) * w;
            }
        }
        return (4.0 / (r * r)) * acc / (M_PI * r * r);
    }
    throw InvalidInputError(
        "beta_r_quadrature: only P in {1, 2} is supported");
}

double a_p_constant(int p) {
    if (p < 1) throw InvalidInputError("a_p_constant: dimension must be >= 1");
    static std::map<int, double> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;

    const double ex = 0.5 * (p - 1);
    const double z = [&] {
        return adaptive_simpson(
            [ex](double s) { return std::pow(1.0 - s * s, ex); }, -1.0, 1.0,
            1e-14);
    }();
    auto g = [&](double sigma) {
        return adaptive_simpson(
                   [ex](double s) {
                       return s * std::pow(1.0 - s * s, ex);
                   },
                   -1.0, sigma, 1e-14) /
               z;
    };
    const double g_sq_integral = adaptive_simpson(
        [&](double sigma) {
            const double v = g(sigma);
            return v * v;
        },
        -1.0, 1.0, 1e-13);
    const double a = 1.0 / ((p + 2.0) * (p + 2.0) * g_sq_integral);
    cache.emplace(p, a);
    return a;
}

int default_inner_samples(int p) { return std::max(2000, 200 * p); }

namespace {

template <typename Inner>
SpectralMatrix outer_average(const Inner& beta_at, const MuSampler& mu,
                             int p, int m_outer, std::uint64_t seed) {
    if (m_outer < 1)
        throw InvalidInputError("b_r_matrix: m_outer must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < m_outer; ++i) {
        const Eigen::VectorXd x = mu(rng);
        const Eigen::VectorXd beta = beta_at(x, i);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(beta);
    }
    Eigen::MatrixXd sym = acc.selfadjointView<Eigen::Lower>();
    return SpectralMatrix(sym / m_outer);
}

} // namespace

SpectralMatrix b_r_matrix(const ScalarFn& f, const MuSampler& mu, int p,
                          double r, const McSettings& settings) {
    if (settings.m_outer < 1000)
        throw InvalidInputError("b_r_matrix: m_outer must be >= 1000");
    const int m_inner =
        settings.m_inner > 0 ? settings.m_inner : default_inner_samples(p);
    return outer_average(
        [&](const Eigen::VectorXd& x, int i) {
            return beta_r_mc(f, x, r, m_inner,
                             derive_seed(settings.seed, i));
        },
        mu, p, settings.m_outer, settings.seed);
}

SpectralMatrix b_r_matrix_exact(const BetaFn& beta, const MuSampler& mu,
                                int p, double r, int m_outer,
                                std::uint64_t seed) {
    return outer_average(
        [&](const Eigen::VectorXd& x, int) { return beta(x, r); }, mu, p,
        m_outer, seed);
}

double b_r_scalar_quadrature(const std::vector<testfn::JumpComponent>& jumps,
                             double r) {
    if (r <= 0.0)
        throw InvalidInputError("b_r_scalar_quadrature: radius must be > 0");
    std::vector<std::pair<double, double>> bands;
    for (const auto& jump : jumps) {
        if (jump.normal.size() != 1)
            throw InvalidInputError("b_r_scalar_quadrature: 1D jumps only");
        const double n = jump.normal[0];
        if (std::abs(std::abs(n) - 1.0) > 1e-12)
            throw InvalidInputError(
                "b_r_scalar_quadrature: normal must be +-1");
        const double tau = -jump.offset * n; // h(tau) = 0
        const double lo = std::max(tau - r, 0.0);
        const double hi = std::min(tau + r, 1.0);
        if (lo < hi) bands.emplace_back(lo, hi);
    }
    if (bands.empty()) return 0.0;
    std::sort(bands.begin(), bands.end());
    std::vector<std::pair<double, double>> merged{bands[0]};
    for (size_t i = 1; i < bands.size(); ++i) {
        if (bands[i].first <= merged.back().second)
            merged.back().second =
                std::max(merged.back().second, bands[i].second);
        else
            merged.push_back(bands[i]);
    }

    const BetaFn beta = flat_jump_beta(jumps);
    const GlRule& rule = gl_rule(48);
    Eigen::VectorXd x(1);
    double acc = 0.0;
    for (const auto& [lo, hi] : merged) {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            x[0] = mid + half * rule.nodes[i];
            const double b = beta(x, r)[0];
            acc += half * rule.weights[i] * b * b;
        }
    }
    return acc;
}

namespace {

void check_radii(const std::vector<double>& radii) {
    if (radii.empty())
        throw InvalidInputError("extended_asm: empty radii schedule");
    for (size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < 1e-4)
            throw InvalidInputError("extended_asm: radii must be >= 1e-4");
        if (i > 0 && radii[i] >= radii[i - 1])
            throw InvalidInputError(
                "extended_asm: radii must be strictly decreasing");
    }
}

} // namespace

ExtendedAsmEstimate extended_asm(const ScalarFn& f, const MuSampler& mu,
                                 int p, const std::vector<double>& radii,
                                 const McSettings& settings) {
    check_radii(radii);
    ExtendedAsmEstimate out;
    out.radii = radii;
    out.a_p = a_p_constant(p);
    out.settings = settings;
    for (size_t i = 0; i < radii.size(); ++i) {
        McSettings per = settings;
        per.seed = derive_seed(settings.seed, 1000 + i);
        const SpectralMatrix b = b_r_matrix(f, mu, p, radii[i], per);
        out.matrices.emplace_back(out.a_p * radii[i] * b.entries());
    }
    return out;
}

ExtendedAsmEstimate extended_asm(const BetaFn& beta, const MuSampler& mu,
                                 int p, const std::vector<double>& radii,
                                 const McSettings& settings) {
    check_radii(radii);
    ExtendedAsmEstimate out;
    out.radii = radii;
    out.a_p = a_p_constant(p);
    out.settings = settings;
    for (size_t i = 0; i < radii.size(); ++i) {
        const SpectralMatrix b =
            b_r_matrix_exact(beta, mu, p, radii[i], settings.m_outer,
                             derive_seed(settings.seed, 1000 + i));
        out.matrices.emplace_back(out.a_p * radii[i] * b.entries());
    }
    return out;
}

SpectralMatrix theorem3_rhs_oracle(
    const std::vector<testfn::JumpComponent>& jumps,
    const ScalarFn& mu_density, int p) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (const auto& raw : jumps) {
        if (raw.normal.size() != p)
            throw InvalidInputError("theorem3_rhs_oracle: dimension mismatch");
        const double norm = raw.normal.norm();
        if (norm < 1e-14)
            throw InvalidInputError("theorem3_rhs_oracle: zero normal");
        const Eigen::VectorXd n = raw.normal / norm;
        const double b = raw.offset / norm;

        double weighted_measure = 0.0;
        if (p == 1) {
            const double tau = -b / n[0];
            if (tau >= 0.0 && tau <= 1.0) {
                Eigen::VectorXd x(1);
                x[0] = tau;
                weighted_measure = mu_density(x);
            }
        } else if (p == 2) {
            // clip the line n.x + b = 0 to the unit square
            const Eigen::Vector2d x0 = -b * n.head<2>();
            const Eigen::Vector2d d(-n[1], n[0]);
            double tmin = -std::numeric_limits<double>::infinity();
            double tmax = std::numeric_limits<double>::infinity();
            bool empty = false;
            for (int i = 0; i < 2; ++i) {
                if (std::abs(d[i]) < 1e-15) {
                    if (x0[i] < -1e-12 || x0[i] > 1.0 + 1e-12) empty = true;
                    continue;
                }
                double t0 = (0.0 - x0[i]) / d[i];
                double t1 = (1.0 - x0[i]) / d[i];
                if (t0 > t1) std::swap(t0, t1);
                tmin = std::max(tmin, t0);
                tmax = std::min(tmax, t1);
            }
            if (!empty && tmax > tmin) {
                const GlRule& rule = gl_rule(32);
                const double half = 0.5 * (tmax - tmin);
                const double mid = 0.5 * (tmax + tmin);
                for (size_t i = 0; i < rule.nodes.size(); ++i) {
                    const Eigen::Vector2d x =
                        x0 + (mid + half * rule.nodes[i]) * d;
                    weighted_measure +=
                        half * rule.weights[i] * mu_density(x);
                }
            }
        } else {
            // axis-aligned hyperplanes only beyond P = 2
            int axis = -1;
            for (int i = 0; i < p; ++i) {
                if (std::abs(std::abs(n[i]) - 1.0) < 1e-12) {
                    axis = i;
                } else if (std::abs(n[i]) > 1e-12) {
                    axis = -1;
                    break;
                }
            }
            if (axis < 0)
                throw InvalidInputError(
                    "theorem3_rhs_oracle: unsupported geometry (only "
                    "axis-aligned hyperplanes beyond P = 2)");
            const double tau = -b / n[axis];
            if (tau >= 0.0 && tau <= 1.0) {
                // tensor Gauss-Legendre over the (P-1)-cube slice
                const GlRule& rule = gl_rule(16);
                const int nn = static_cast<int>(rule.nodes.size());
                std::vector<int> idx(p - 1, 0);
                Eigen::VectorXd x(p);
                x[axis] = tau;
                bool done = false;
                while (!done) {
                    double w = 1.0;
                    int k = 0;
                    for (int i = 0; i < p; ++i) {
                        if (i == axis) continue;
                        x[i] = 0.5 * (rule.nodes[idx[k]] + 1.0);
                        w *= 0.5 * rule.weights[idx[k]];
                        ++k;
                    }
                    weighted_measure += w * mu_density(x);
                    // odometer increment
                    int c = 0;
                    while (c < p - 1 && ++idx[c] == nn) {
                        idx[c] = 0;
                        ++c;
                    }
                    done = (c == p - 1);
                }
            }
        }
        if (weighted_measure != 0.0)
            acc += (raw.c * raw.c * weighted_measure) * (n * n.transpose());
    }
    return SpectralMatrix(acc);
}

double null_direction_check(const ScalarFn& f, const Eigen::VectorXd& u,
                            const std::vector<Eigen::VectorXd>& grid,
                            double r, int m, std::uint64_t seed) {
    double worst = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd beta =
            beta_r_mc(f, grid[i], r, m, derive_seed(seed, i));
        worst = std::max(worst, std::abs(u.dot(beta)));
    }
    return worst;
}

nlohmann::json ExtendedAsmEstimate::to_json() const {
    nlohmann::json out;
    out["radii"] = radii;
    out["a_p"] = a_p;
    out["settings"] = {{"m_outer", settings.m_outer},
                       {"m_inner", settings.m_inner},
                       {"seed", settings.seed}};
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& m : matrices) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.dim(); ++i) {
            std::vector<double> row(m.dim());
            for (int j = 0; j < m.dim(); ++j) row[j] = m.entries()(i, j);
            rows.push_back(row);
        }
        mats.push_back(rows);
    }
    out["matrices"] = mats;
    return out;
}

} // namespace jumpsas::discas
