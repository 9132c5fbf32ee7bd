#pragma once

#include "jumpsas/core.hpp"
#include "jumpsas/gp.hpp"

#include <nlohmann/json_fwd.hpp>
#include <functional>

namespace jumpsas::active {

/// Eigen summary of a sensitivity matrix: normalized diagonal importances,
/// eigen-gap dimension selection, leading eigenvectors.
struct SubspaceReport {
    SpectralMatrix matrix;
    Eigen::VectorXd importances; // diag normalized to unit Euclidean norm
    bool degenerate = false;     // diag norm below 1e-14
    int selected_dim = 1;
    Eigen::MatrixXd leading_vectors; // first selected_dim eigenvectors

    nlohmann::json to_json() const;
};

/// Monte-Carlo expected-gradient-outer-product of the GP posterior mean,
/// (1/M) sum grad m(x_i) grad m(x_i)^T over x_i uniform on [0,1]^P.
SpectralMatrix mc_active_subspace(const gp::GpModel& model, int m_samples,
                                  std::uint64_t seed);

/// 1D piecewise-linear estimator: interpolate f at n_g evenly spaced points
/// on [0,1] and return the mean of squared segment slopes.
double pwl_active_subspace_1d(const std::function<double(double)>& f,
                              int n_g);

/// diag(c) normalized to unit Euclidean norm. Returns all zeros and sets
/// *degenerate when the diagonal norm is below 1e-14.
Eigen::VectorXd importance(const SpectralMatrix& c,
                           bool* degenerate = nullptr);

/// 1 - |cos| between u and the leading eigenvector of c.
double subspace_error(const SpectralMatrix& c, const Eigen::VectorXd& u);

/// Largest relative eigen-gap: argmax_k log(l_k) - log(l_{k+1}), values
/// floored at 1e-12 * l_1, ties toward smaller k.
int select_dim(const Eigen::VectorXd& eigenvalues);

SubspaceReport make_report(const SpectralMatrix& matrix);

} // namespace jumpsas::active
