#include "jumpsas/asm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace jumpsas::active {

SpectralMatrix mc_active_subspace(const gp::GpModel& model, int m_samples,
                                  std::uint64_t seed) {
    if (m_samples < 100)
        throw InvalidInputError("mc_active_subspace: m_samples must be >= 100");
    const int p = model.data().dim();
    Rng rng(seed);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < m_samples; ++i) {
        const Eigen::VectorXd g = model.mean_gradient(rng.uniform_vec(p));
        acc.selfadjointView<Eigen::Lower>().rankUpdate(g);
    }
    Eigen::MatrixXd c = acc.selfadjointView<Eigen::Lower>();
    return SpectralMatrix(c / m_samples);
}

double pwl_active_subspace_1d(const std::function<double(double)>& f,
                              int n_g) {
    if (n_g < 2)
        throw InvalidInputError("pwl_active_subspace_1d: n_g must be >= 2");
    const double h = 1.0 / (n_g - 1);
    double acc = 0.0;
    double prev = f(0.0);
    for (int i = 1; i < n_g; ++i) {
        const double cur = f(i * h);
        const double slope = (cur - prev) / h;
        acc += slope * slope;
        prev = cur;
    }
    return acc / (n_g - 1);
}

Eigen::VectorXd importance(const SpectralMatrix& c, bool* degenerate) {
    const Eigen::VectorXd diag = c.entries().diagonal();
    const double norm = diag.norm();
    if (degenerate) *degenerate = norm < 1e-14;
    if (norm < 1e-14) return Eigen::VectorXd::Zero(c.dim());
    return diag / norm;
}

double subspace_error(const SpectralMatrix& c, const Eigen::VectorXd& u) {
    if (c.eigenvalues()[0] <= 0.0)
        throw DegenerateError("subspace_error: zero leading eigenvalue");
    return 1.0 - subspace_cosine(c.leading_eigenvector(), u);
}

int select_dim(const Eigen::VectorXd& eigenvalues) {
    const int p = static_cast<int>(eigenvalues.size());
    if (p < 2)
        throw InvalidInputError("select_dim: needs at least 2 eigenvalues");
    if (eigenvalues[0] <= 0.0)
        throw InvalidInputError("select_dim: leading eigenvalue must be > 0");
    const double floor = 1e-12 * eigenvalues[0];
    int best_k = 1;
    double best_gap = -1.0;
    for (int k = 1; k < p; ++k) {
        const double gap = std::log(std::max(eigenvalues[k - 1], floor)) -
                           std::log(std::max(eigenvalues[k], floor));
        if (gap > best_gap + 1e-15) {
            best_gap = gap;
            best_k = k;
        }
    }
    return best_k;
}

SubspaceReport make_report(const SpectralMatrix& matrix) {
    SubspaceReport report{matrix, {}, false, 1, {}};
    report.importances = importance(matrix, &report.degenerate);
    report.selected_dim =
        (matrix.dim() >= 2 && matrix.eigenvalues()[0] > 0.0)
            ? select_dim(matrix.eigenvalues().cwiseMax(0.0))
            : 1;
    report.leading_vectors =
        matrix.eigenvectors().leftCols(report.selected_dim);
    return report;
}

nlohmann::json SubspaceReport::to_json() const {
    nlohmann::json out;
    out["eigenvalues"] = std::vector<double>(
        matrix.eigenvalues().data(),
        matrix.eigenvalues().data() + matrix.eigenvalues().size());
    std::vector<std::vector<double>> vecs;
    for (int j = 0; j < matrix.dim(); ++j) {
        const Eigen::VectorXd col = matrix.eigenvectors().col(j);
        vecs.emplace_back(col.data(), col.data() + col.size());
    }
    out["eigenvectors"] = vecs;
    out["importances"] = std::vector<double>(
        importances.data(), importances.data() + importances.size());
    out["selected_dim"] = selected_dim;
    out["degenerate"] = degenerate;
    return out;
}

} // namespace jumpsas::active
