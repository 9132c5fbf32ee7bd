#include "jumpsas/core.hpp"

#include <cmath>
#include <sstream>

namespace jumpsas {

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
    // top 53 bits -> [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
}

Eigen::VectorXd Rng::uniform_vec(int p) {
    Eigen::VectorXd out(p);
    for (int i = 0; i < p; ++i) out[i] = uniform();
    return out;
}

Eigen::VectorXd Rng::normal_vec(int p) {
    Eigen::VectorXd out(p);
    for (int i = 0; i < p; ++i) out[i] = normal();
    return out;
}

Rng Rng::derive(std::uint64_t index) const {
    // golden-ratio increment keeps derived streams distinct even for
    // adjacent indices
    return Rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

namespace {

void fix_sign(Eigen::MatrixXd& vectors) {
    for (int j = 0; j < vectors.cols(); ++j) {
        int imax = 0;
        double amax = 0.0;
        for (int i = 0; i < vectors.rows(); ++i) {
            const double a = std::abs(vectors(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (vectors(imax, j) < 0.0) vectors.col(j) *= -1.0;
    }
}

} // namespace

EigenDecomposition sym_eig(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw InvalidInputError("sym_eig: matrix must be square");
    if (!m.allFinite())
        throw InvalidInputError("sym_eig: matrix has non-finite entries");

    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw IllConditionedError("sym_eig: eigensolver failed to converge");

    const int p = static_cast<int>(m.rows());
    EigenDecomposition out;
    out.values.resize(p);
    out.vectors.resize(p, p);
    // Eigen returns ascending order; flip to descending.
    for (int j = 0; j < p; ++j) {
        out.values[j] = solver.eigenvalues()[p - 1 - j];
        out.vectors.col(j) = solver.eigenvectors().col(p - 1 - j);
    }
    fix_sign(out.vectors);
    return out;
}

SpectralMatrix::SpectralMatrix(const Eigen::MatrixXd& m)
    : entries_(0.5 * (m + m.transpose())), eig_(sym_eig(entries_)) {}

Eigen::MatrixXd psd_sqrt(const SpectralMatrix& m) {
    const Eigen::VectorXd& lam = m.eigenvalues();
    const double lam_max = lam.size() > 0 ? std::max(lam[0], 0.0) : 0.0;
    const double tol = 1e-8 * lam_max;
    Eigen::VectorXd root(lam.size());
    for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] < -tol) {
            std::ostringstream msg;
            msg << "psd_sqrt: eigenvalue " << lam[i]
                << " below PSD tolerance " << -tol;
            throw NotPsdError(msg.str());
        }
        root[i] = std::sqrt(std::max(lam[i], 0.0));
    }
    const Eigen::MatrixXd& v = m.eigenvectors();
    return v * root.asDiagonal() * v.transpose();
}

double subspace_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size())
        throw InvalidInputError("subspace_cosine: dimension mismatch");
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0)
        throw InvalidInputError("subspace_cosine: zero vector");
    double c = std::abs(u.dot(v)) / (nu * nv);
    return std::min(c, 1.0);
}

Dataset normalize_inputs(const Eigen::MatrixXd& raw,
                         const std::vector<ParameterRange>& ranges,
                         const Eigen::VectorXd& responses) {
    const int n = static_cast<int>(raw.rows());
    const int p = static_cast<int>(raw.cols());
    if (static_cast<int>(ranges.size()) != p)
        throw InvalidInputError("normalize_inputs: ranges size != columns");
    if (responses.size() != n)
        throw InvalidInputError("normalize_inputs: responses size != rows");
    if (n < 1) throw InvalidInputError("normalize_inputs: empty design");
    if (!responses.allFinite())
        throw InvalidInputError("normalize_inputs: non-finite response");

    for (int j = 0; j < p; ++j) {
        if (!(ranges[j].min < ranges[j].max)) {
            std::ostringstream msg;
            msg << "normalize_inputs: invalid range for column " << j << " ('"
                << ranges[j].name << "'): min " << ranges[j].min
                << " >= max " << ranges[j].max;
            throw InvalidInputError(msg.str());
        }
    }

    Dataset out;
    out.inputs.resize(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) {
            const double x = raw(i, j);
            if (x < ranges[j].min || x > ranges[j].max) {
                std::ostringstream msg;
                msg << "normalize_inputs: value " << x << " at row " << i
                    << ", column " << j << " ('" << ranges[j].name
                    << "') outside [" << ranges[j].min << ", "
                    << ranges[j].max << "]";
                throw OutOfRangeError(msg.str());
            }
            out.inputs(i, j) =
                (x - ranges[j].min) / (ranges[j].max - ranges[j].min);
        }
    }
    out.responses = responses;
    out.ranges = ranges;
    return out;
}

Eigen::MatrixXd denormalize_inputs(const Dataset& data) {
    if (data.ranges.empty())
        throw InvalidInputError("denormalize_inputs: dataset has no ranges");
    if (static_cast<int>(data.ranges.size()) != data.dim())
        throw InvalidInputError("denormalize_inputs: ranges size != dim");
    Eigen::MatrixXd raw(data.n(), data.dim());
    for (int i = 0; i < data.n(); ++i)
        for (int j = 0; j < data.dim(); ++j)
            raw(i, j) = data.ranges[j].min +
                        data.inputs(i, j) *
                            (data.ranges[j].max - data.ranges[j].min);
    return raw;
}

} // namespace jumpsas
