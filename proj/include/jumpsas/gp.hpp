#pragma once

#include "jumpsas/core.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace jumpsas::gp {

enum class KernelFamily { gaussian, matern52, matern32 };

std::string family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    Eigen::VectorXd lengthscales; // per-dimension (ARD), strictly positive
    double variance = 1.0;
    double nugget = 1e-8;

    void validate() const;
};

/// Stationary kernel value. With d = sqrt(sum(((a_j - b_j)/l_j)^2)):
///   gaussian:  s2 exp(-d^2/2)
///   matern52:  s2 (1 + sqrt5 d + 5 d^2 / 3) exp(-sqrt5 d)
///   matern32:  s2 (1 + sqrt3 d) exp(-sqrt3 d)
/// The nugget is not added here; it only enters the factorized matrix
/// diagonal.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

struct FitOptions {
    int n_starts = 10;
    int max_evals_per_start = 400;
    double log_ls_lo = std::log(0.01);
    double log_ls_hi = std::log(10.0);
    double log_var_lo = std::log(1e-4);
    double log_var_hi = std::log(1e4);
};

/// Fitted GP surrogate: zero-mean prior on mean-centered responses,
/// Cholesky-factorized kernel matrix, dual weights alpha = (K + nI)^-1 yc.
class GpModel {
  public:
    /// Maximize the log marginal likelihood over log-lengthscales and
    /// log-variance with a seeded multi-start Nelder-Mead search. Nugget is
    /// fixed at 1e-6 * var(y) (floored at 1e-8) and escalated x10 on
    /// factorization failure up to 1e-2 * var(y).
    static GpModel fit(const Dataset& data, KernelFamily family,
                       std::uint64_t seed, const FitOptions& options = {});

    /// Model with given hyperparameters, no optimization.
    static GpModel with_spec(const Dataset& data, const KernelSpec& spec);

    double predict_mean(const Eigen::VectorXd& x) const;
    Eigen::VectorXd mean_gradient(const Eigen::VectorXd& x) const;

    const KernelSpec& kernel() const { return spec_; }
    const Dataset& data() const { return data_; }
    double log_marginal_likelihood() const { return log_lik_; }
    double response_mean() const { return y_mean_; }
    const Eigen::VectorXd& dual_weights() const { return alpha_; }
    const Eigen::MatrixXd& cholesky_factor() const { return chol_; }

    nlohmann::json summary() const;

  private:
    GpModel() = default;

    Dataset data_;
    KernelSpec spec_;
    Eigen::MatrixXd chol_; // lower factor of K + nugget I
    Eigen::VectorXd alpha_;
    double y_mean_ = 0.0;
    double log_lik_ = 0.0;
};

} // namespace jumpsas::gp
