#pragma once

#include "jumpsas/core.hpp"
#include "jumpsas/testfn.hpp"

#include <nlohmann/json_fwd.hpp>
#include <functional>
#include <vector>

namespace jumpsas::discas {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
/// Exact per-point inner solve: x, r -> beta_r(x).
using BetaFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;
using MuSampler = std::function<Eigen::VectorXd(Rng&)>;

/// mu uniform on [0,1]^P.
MuSampler uniform_cube(int p);

/// i.i.d. uniform draws from the P-ball of radius r.
struct BallSample {
    double radius;
    int dim;
    Eigen::MatrixXd points; // M x P, each row with norm <= r
    std::uint64_t seed;
};

BallSample ball_sample(int p, double r, int m, std::uint64_t seed);

/// Finite-radius regression coefficient: through-origin OLS of f(x+z) on z
/// over a ball sample, (sum z z^T)^-1 (sum z f(x+z)).
Eigen::VectorXd beta_r_mc(const ScalarFn& f, const Eigen::VectorXd& x,
                          double r, int m, std::uint64_t seed);

/// Normal component of beta_r for f = c * 1[half-space], as a function of
/// the signed distance t from x to the boundary (t > 0 means x inside the
/// jump set). Computed by adaptive quadrature of the ball's 1D marginal to
/// 1e-10 relative accuracy; tangential components are zero.
double halfspace_beta_oracle(double t, double r, int p, double c);

/// Closed-form fast path for the same profile,
/// c (P+2)/r^2 * m_P(t) with m_P(t) = -(r / (Z_P (P+1))) (1-(t/r)^2)^((P+1)/2)
/// for |t| < r and 0 otherwise.
double halfspace_beta(double t, double r, int p, double c);

/// Exact beta for a sum of affine jumps (c_j * 1[h_j <= 0], unit normals),
/// built from the closed-form half-space profile. Valid when the jump
/// boundaries are separated by more than 2r at the probed points (profiles
/// add linearly either way; overlap only affects the interpretation).
BetaFn flat_jump_beta(const std::vector<testfn::JumpComponent>& jumps);

/// Quadrature inner solve for smooth f: (P+2)/r^2 E[z f(x+z)] by tensor
/// Gauss-Legendre over the ball. Supported for P in {1, 2}.
Eigen::VectorXd beta_r_quadrature(const ScalarFn& f, const Eigen::VectorXd& x,
                                  double r, int n_radial = 24,
                                  int n_angle = 48);

/// Normalizing constant A_P = 1 / [(P+2)^2 int_{-1}^{1} g_P^2], with
/// g_P(s) = int_{-1}^{s} t q_P(t) dt and q_P the unit-ball 1D marginal
/// density. Adaptive quadrature, cached per P. A_1 = 5/3.
double a_p_constant(int p);

int default_inner_samples(int p); // max(2000, 200 P)

struct McSettings {
    int m_outer = 5000;
    int m_inner = 0; // 0 -> default_inner_samples(P)
    std::uint64_t seed = 0;
};

/// B^r = (1/M_outer) sum beta_r(x_i) beta_r(x_i)^T, x_i ~ mu, inner solves
/// by MC ball sampling with per-point derived seeds.
SpectralMatrix b_r_matrix(const ScalarFn& f, const MuSampler& mu, int p,
                          double r, const McSettings& settings);

/// Same outer average with an exact per-point inner solve.
SpectralMatrix b_r_matrix_exact(const BetaFn& beta, const MuSampler& mu,
                                int p, double r, int m_outer,
                                std::uint64_t seed);

/// 1D special case with mu uniform on [0,1]: int_0^1 beta(x)^2 dx by
/// composite Gauss-Legendre over the jump bands, beta from the closed-form
/// half-space profile.
double b_r_scalar_quadrature(const std::vector<testfn::JumpComponent>& jumps,
                             double r);

struct ExtendedAsmEstimate {
    std::vector<double> radii; // strictly decreasing, >= 1e-4
    std::vector<SpectralMatrix> matrices; // A_P * r * B^r per radius
    double a_p = 0.0;
    McSettings settings;

    nlohmann::json to_json() const;
};

/// The finite-r sequence A_P r B^r over a decreasing radii schedule. No
/// extrapolation; convergence is judged by the caller.
ExtendedAsmEstimate extended_asm(const ScalarFn& f, const MuSampler& mu,
                                 int p, const std::vector<double>& radii,
                                 const McSettings& settings);
ExtendedAsmEstimate extended_asm(const BetaFn& beta, const MuSampler& mu,
                                 int p, const std::vector<double>& radii,
                                 const McSettings& settings);

/// Limit boundary integral sum_j c_j^2 int_{h_j = 0} n_j n_j^T delta dS over
/// the unit cube, for affine jumps. Supports P = 1, general lines in P = 2,
/// and axis-aligned hyperplanes in higher dimensions.
SpectralMatrix theorem3_rhs_oracle(
    const std::vector<testfn::JumpComponent>& jumps,
    const ScalarFn& mu_density, int p);

/// max over the grid of |u^T beta_r_mc(f, x, r, m)|.
double null_direction_check(const ScalarFn& f, const Eigen::VectorXd& u,
                            const std::vector<Eigen::VectorXd>& grid,
                            double r, int m, std::uint64_t seed);

} // namespace jumpsas::discas
