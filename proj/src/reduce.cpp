#include "jumpsas/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jumpsas::reduce {

SirResult sir(const Dataset& data, int n_slices, int d) {
    const int n = data.n();
    const int p = data.dim();
    if (n_slices < 2 || n < n_slices)
        throw InvalidInputError("sir: requires n >= n_slices >= 2");
    if (d < 1 || d > p)
        throw InvalidInputError("sir: d must be in [1, P]");

    const Eigen::VectorXd mean = data.inputs.colwise().mean();
    const Eigen::MatrixXd centered = data.inputs.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / std::max(n - 1, 1);
    cov += 1e-10 * Eigen::MatrixXd::Identity(p, p); // ridge for degenerate designs

    const EigenDecomposition cov_eig = sym_eig(cov);
    Eigen::VectorXd inv_root(p);
    for (int i = 0; i < p; ++i)
        inv_root[i] = 1.0 / std::sqrt(std::max(cov_eig.values[i], 1e-12));
    const Eigen::MatrixXd whitener = cov_eig.vectors * inv_root.asDiagonal() *
                                     cov_eig.vectors.transpose();
    const Eigen::MatrixXd z = centered * whitener; // rows standardized

    // quantile boundaries from the sorted responses
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (data.responses[a] != data.responses[b])
            return data.responses[a] < data.responses[b];
        return a < b;
    });
    std::vector<double> boundaries;
    for (int k = 1; k < n_slices; ++k)
        boundaries.push_back(data.responses[order[k * n / n_slices]]);

    std::vector<int> counts(n_slices, 0);
    std::vector<Eigen::VectorXd> sums(n_slices, Eigen::VectorXd::Zero(p));
    for (int i = 0; i < n; ++i) {
        const int slice = static_cast<int>(
            std::lower_bound(boundaries.begin(), boundaries.end(),
                             data.responses[i]) -
            boundaries.begin());
        counts[slice] += 1;
        sums[slice] += z.row(i).transpose();
    }

    SirResult result;
    // duplicate-response pileup can empty a slice; fold it into its neighbor
    std::vector<std::pair<int, Eigen::VectorXd>> slices;
    for (int h = 0; h < n_slices; ++h) {
        if (counts[h] == 0) {
            result.merged_slices = true;
            continue;
        }
        slices.emplace_back(counts[h], sums[h] / counts[h]);
    }

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [count, slice_mean] : slices)
        m += (static_cast<double>(count) / n) * slice_mean *
             slice_mean.transpose();

    const EigenDecomposition m_eig = sym_eig(m);
    result.eigenvalues = m_eig.values;
    if (m_eig.values[0] < 1e-14) {
        result.degenerate = true;
        result.directions = Eigen::MatrixXd::Identity(p, p).leftCols(d);
        return result;
    }
    result.directions = whitener * m_eig.vectors.leftCols(d);
    for (int j = 0; j < d; ++j)
        result.directions.col(j).normalize();
    return result;
}

Eigen::VectorXd knn_predict(const Eigen::MatrixXd& train_inputs,
                            const Eigen::VectorXd& train_responses,
                            const Eigen::MatrixXd& query_inputs, int k) {
    const int n = static_cast<int>(train_inputs.rows());
    if (k < 1 || k > n)
        throw InvalidInputError("knn_predict: k must be in [1, n_train]");
    if (train_responses.size() != n)
        throw InvalidInputError("knn_predict: responses size != rows");
    if (query_inputs.cols() != train_inputs.cols())
        throw InvalidInputError("knn_predict: dimension mismatch");
    if (!train_inputs.allFinite() || !query_inputs.allFinite())
        throw InvalidInputError("knn_predict: non-finite inputs");

    const int n_query = static_cast<int>(query_inputs.rows());
    Eigen::VectorXd out(n_query);
    std::vector<std::pair<double, int>> dist(n);
    for (int q = 0; q < n_query; ++q) {
        for (int i = 0; i < n; ++i)
            dist[i] = {(train_inputs.row(i) - query_inputs.row(q))
                           .squaredNorm(),
                       i};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += train_responses[dist[i].second];
        out[q] = acc / k;
    }
    return out;
}

std::string projection_kind_name(ProjectionKind kind) {
    switch (kind) {
    case ProjectionKind::identity: return "Ident";
    case ProjectionKind::asm_warp: return "ASM";
    case ProjectionKind::asm_warp_truncated: return "ASMt";
    case ProjectionKind::sir: return "SIR";
    }
    return "unknown";
}

ProjectionSpec identity_projection(int p) {
    return {ProjectionKind::identity, Eigen::MatrixXd::Identity(p, p), p};
}

ProjectionSpec asm_projection(const active::SubspaceReport& report) {
    const int p = report.matrix.dim();
    return {ProjectionKind::asm_warp, psd_sqrt(report.matrix), p};
}

ProjectionSpec asm_truncated_projection(const active::SubspaceReport& report,
                                        int d) {
    const int p = report.matrix.dim();
    if (d < 1 || d > p)
        throw InvalidInputError("asm_truncated_projection: d must be in [1, P]");
    const Eigen::MatrixXd root = psd_sqrt(report.matrix);
    return {ProjectionKind::asm_warp_truncated,
            root * report.matrix.eigenvectors().leftCols(d), d};
}

ProjectionSpec sir_projection(const SirResult& result) {
    return {ProjectionKind::sir, result.directions,
            static_cast<int>(result.directions.cols())};
}

CvResult kfold_cv_mse(const Dataset& data, const ProjectionBuilder& builder,
                      int k_folds, int knn_k, std::uint64_t seed) {
    const int n = data.n();
    if (k_folds < 2 || n < k_folds)
        throw InvalidInputError("kfold_cv_mse: requires n >= k_folds >= 2");

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform() * (i + 1));
        std::swap(perm[i], perm[std::min(j, i)]);
    }

    CvResult result;
    for (int fold = 0; fold < k_folds; ++fold) {
        const int lo = fold * n / k_folds;
        const int hi = (fold + 1) * n / k_folds;
        const int n_test = hi - lo;
        const int n_train = n - n_test;
        if (knn_k > n_train)
            throw InvalidInputError(
                "kfold_cv_mse: training complement smaller than knn_k");

        Dataset train;
        train.inputs.resize(n_train, data.dim());
        train.responses.resize(n_train);
        Eigen::MatrixXd test_inputs(n_test, data.dim());
        Eigen::VectorXd test_responses(n_test);
        int it = 0;
        for (int i = 0; i < n; ++i) {
            if (i >= lo && i < hi) {
                test_inputs.row(i - lo) = data.inputs.row(perm[i]);
                test_responses[i - lo] = data.responses[perm[i]];
            } else {
                train.inputs.row(it) = data.inputs.row(perm[i]);
                train.responses[it] = data.responses[perm[i]];
                ++it;
            }
        }

        const ProjectionSpec projection = builder(train);
        const Eigen::VectorXd pred =
            knn_predict(projection.apply(train.inputs), train.responses,
                        projection.apply(test_inputs), knn_k);
        result.fold_mse.push_back(
            (pred - test_responses).squaredNorm() / n_test);
    }
    result.mean_mse =
        std::accumulate(result.fold_mse.begin(), result.fold_mse.end(), 0.0) /
        k_folds;
    return result;
}

} // namespace jumpsas::reduce
