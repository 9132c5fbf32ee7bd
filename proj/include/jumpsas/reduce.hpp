#pragma once

#include "jumpsas/asm.hpp"
#include "jumpsas/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace jumpsas::reduce {

struct SirResult {
    Eigen::MatrixXd directions; // P x d, unit-norm columns
    Eigen::VectorXd eigenvalues; // of the slice-mean covariance, descending
    bool degenerate = false;     // constant response -> identity fallback
    bool merged_slices = false;  // duplicate-response pileup was repaired
};

/// Sliced Inverse Regression: standardize inputs, slice by response
/// quantiles, PCA the count-weighted slice means, map the top-d directions
/// back through the standardization.
SirResult sir(const Dataset& data, int n_slices, int d);

/// Mean response of the k Euclidean-nearest training rows per query.
/// Distance ties break toward the lower training-row index.
Eigen::VectorXd knn_predict(const Eigen::MatrixXd& train_inputs,
                            const Eigen::VectorXd& train_responses,
                            const Eigen::MatrixXd& query_inputs, int k);

enum class ProjectionKind { identity, asm_warp, asm_warp_truncated, sir };

std::string projection_kind_name(ProjectionKind kind);

/// Input transform applied before KNN: projected x = matrix^T x.
struct ProjectionSpec {
    ProjectionKind kind = ProjectionKind::identity;
    Eigen::MatrixXd matrix; // P x d
    int dim = 0;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& inputs) const {
        return inputs * matrix;
    }
};

ProjectionSpec identity_projection(int p);
/// asm_warp: symmetric PSD square root of the subspace matrix.
ProjectionSpec asm_projection(const active::SubspaceReport& report);
/// asm_warp_truncated: square root followed by the top-d eigenvectors.
ProjectionSpec asm_truncated_projection(const active::SubspaceReport& report,
                                        int d);
ProjectionSpec sir_projection(const SirResult& result);

using ProjectionBuilder = std::function<ProjectionSpec(const Dataset&)>;

struct CvResult {
    double mean_mse = 0.0;
    std::vector<double> fold_mse;
};

/// Seeded k-fold CV; the projection (including any surrogate or SIR fit) is
/// learned on the training portion of each fold only.
CvResult kfold_cv_mse(const Dataset& data, const ProjectionBuilder& builder,
                      int k_folds, int knn_k, std::uint64_t seed);

} // namespace jumpsas::reduce
