#include "jumpsas/gp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace jumpsas::gp {

std::string family_name(KernelFamily family) {
    switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::matern52: return "matern52";
    case KernelFamily::matern32: return "matern32";
    }
    return "unknown";
}

KernelFamily family_from_name(const std::string& name) {
    if (name == "gaussian") return KernelFamily::gaussian;
    if (name == "matern52") return KernelFamily::matern52;
    if (name == "matern32") return KernelFamily::matern32;
    throw InvalidInputError("unknown kernel family '" + name + "'");
}

void KernelSpec::validate() const {
    if (lengthscales.size() < 1 || (lengthscales.array() <= 0.0).any())
        throw InvalidInputError("KernelSpec: lengthscales must be positive");
    if (variance <= 0.0)
        throw InvalidInputError("KernelSpec: variance must be positive");
    if (nugget < 0.0)
        throw InvalidInputError("KernelSpec: nugget must be nonnegative");
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

double correlation(KernelFamily family, double d) {
    switch (family) {
    case KernelFamily::gaussian:
        return std::exp(-0.5 * d * d);
    case KernelFamily::matern52: {
        const double a = kSqrt5 * d;
        return (1.0 + a + a * a / 3.0) * std::exp(-a);
    }
    case KernelFamily::matern32: {
        const double a = kSqrt3 * d;
        return (1.0 + a) * std::exp(-a);
    }
    }
    return 0.0;
}

} // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
    spec.validate();
    if (a.size() != b.size() || a.size() != spec.lengthscales.size())
        throw InvalidInputError("kernel_eval: dimension mismatch");
    const double d =
        ((a - b).array() / spec.lengthscales.array()).matrix().norm();
    return spec.variance * correlation(spec.family, d);
}

namespace {

// Minimize obj with Nelder-Mead; every candidate vertex is clamped into
// [lo, hi] before evaluation. Returns the best point seen.
struct NmResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
};

template <typename Obj>
NmResult nelder_mead(const Obj& obj, const Eigen::VectorXd& x0,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     int max_evals) {
    const int dim = static_cast<int>(x0.size());
    auto clamp = [&](Eigen::VectorXd v) {
        for (int i = 0; i < dim; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
        return v;
    };

    int evals = 0;
    NmResult best;
    auto eval = [&](const Eigen::VectorXd& v) {
        ++evals;
        const double f = obj(v);
        if (f < best.f) {
            best.f = f;
            best.x = v;
        }
        return f;
    };

    std::vector<Eigen::VectorXd> simplex(dim + 1);
    std::vector<double> fvals(dim + 1);
    simplex[0] = clamp(x0);
    fvals[0] = eval(simplex[0]);
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd v = simplex[0];
        v[i] += 0.5;
        simplex[i + 1] = clamp(v);
        fvals[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<int> order(dim + 1);
    while (evals < max_evals) {
        for (int i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fvals[a] < fvals[b]; });
        const int ib = order[0], iw = order[dim], is = order[dim - 1];

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int i = 0; i <= dim; ++i)
            if (i != iw) centroid += simplex[i];
        centroid /= dim;

        // convergence on simplex spread
        double spread = 0.0;
        for (int i = 0; i <= dim; ++i)
            spread = std::max(spread, (simplex[i] - simplex[ib]).norm());
        if (spread < 1e-7 && std::abs(fvals[iw] - fvals[ib]) < 1e-10) break;

        const Eigen::VectorXd refl =
            clamp(centroid + (centroid - simplex[iw]));
        const double f_refl = eval(refl);

        if (f_refl < fvals[ib]) {
            const Eigen::VectorXd exp_pt =
                clamp(centroid + 2.0 * (centroid - simplex[iw]));
            const double f_exp = eval(exp_pt);
            if (f_exp < f_refl) {
                simplex[iw] = exp_pt;
                fvals[iw] = f_exp;
            } else {
                simplex[iw] = refl;
                fvals[iw] = f_refl;
            }
        } else if (f_refl < fvals[is]) {
            simplex[iw] = refl;
            fvals[iw] = f_refl;
        } else {
            const Eigen::VectorXd contr =
                clamp(centroid + 0.5 * (simplex[iw] - centroid));
            const double f_contr = eval(contr);
            if (f_contr < fvals[iw]) {
                simplex[iw] = contr;
                fvals[iw] = f_contr;
            } else {
                for (int i = 0; i <= dim; ++i) {
                    if (i == ib) continue;
                    simplex[i] =
                        clamp(simplex[ib] + 0.5 * (simplex[i] - simplex[ib]));
                    fvals[i] = eval(simplex[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
    }
    return best;
}

// Per-dimension squared difference matrices, cached across likelihood
// evaluations; only the lengthscale weights change per candidate.
std::vector<Eigen::MatrixXd> pairwise_sqdiff(const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    std::vector<Eigen::MatrixXd> out(p);
    for (int j = 0; j < p; ++j) {
        out[j].resize(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b <= a; ++b) {
                const double d = x(a, j) - x(b, j);
                out[j](a, b) = d * d;
                out[j](b, a) = d * d;
            }
    }
    return out;
}

Eigen::MatrixXd build_kernel_matrix(KernelFamily family,
                                    const std::vector<Eigen::MatrixXd>& sqdiff,
                                    const Eigen::VectorXd& lengthscales,
                                    double variance, double nugget) {
    const int n = static_cast<int>(sqdiff[0].rows());
    const int p = static_cast<int>(sqdiff.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < p; ++j)
        s += sqdiff[j] / (lengthscales[j] * lengthscales[j]);
    Eigen::MatrixXd k(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b <= a; ++b) {
            const double v =
                variance * correlation(family, std::sqrt(s(a, b)));
            k(a, b) = v;
            k(b, a) = v;
        }
        k(a, a) += nugget;
    }
    return k;
}

// Negative log marginal likelihood; +inf if the factorization fails.
double neg_log_lik(KernelFamily family,
                   const std::vector<Eigen::MatrixXd>& sqdiff,
                   const Eigen::VectorXd& yc, const Eigen::VectorXd& ls,
                   double variance, double nugget) {
    const int n = static_cast<int>(yc.size());
    const Eigen::MatrixXd k =
        build_kernel_matrix(family, sqdiff, ls, variance, nugget);
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success)
        return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd alpha = llt.solve(yc);
    double log_det_half = 0.0;
    for (int i = 0; i < n; ++i)
        log_det_half += std::log(llt.matrixLLT()(i, i));
    return 0.5 * yc.dot(alpha) + log_det_half +
           0.5 * n * std::log(2.0 * M_PI);
}

} // namespace

GpModel GpModel::with_spec(const Dataset& data, const KernelSpec& spec) {
    spec.validate();
    if (spec.lengthscales.size() != data.dim())
        throw InvalidInputError("GpModel: lengthscale count != dim");

    GpModel model;
    model.data_ = data;
    model.spec_ = spec;
    model.y_mean_ = data.responses.mean();
    const Eigen::VectorXd yc =
        data.responses.array() - model.y_mean_;

    const auto sqdiff = pairwise_sqdiff(data.inputs);
    const double yvar =
        data.n() > 1 ? yc.squaredNorm() / (data.n() - 1) : 0.0;
    const double nugget_cap = std::max(1e-2 * yvar, 1e-6);

    double nugget = spec.nugget;
    while (true) {
        const Eigen::MatrixXd k = build_kernel_matrix(
            spec.family, sqdiff, spec.lengthscales, spec.variance, nugget);
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            model.spec_.nugget = nugget;
            model.chol_ = llt.matrixL();
            model.alpha_ = llt.solve(yc);
            double log_det_half = 0.0;
            for (int i = 0; i < data.n(); ++i)
                log_det_half += std::log(model.chol_(i, i));
            model.log_lik_ = -0.5 * yc.dot(model.alpha_) - log_det_half -
                             0.5 * data.n() * std::log(2.0 * M_PI);
            return model;
        }
        if (nugget >= nugget_cap)
            throw IllConditionedError(
                "GpModel: Cholesky failed after jitter escalation");
        nugget = std::min(std::max(nugget, 1e-10) * 10.0, nugget_cap);
    }
}

GpModel GpModel::fit(const Dataset& data, KernelFamily family,
                     std::uint64_t seed, const FitOptions& options) {
    const int n = data.n();
    const int p = data.dim();
    if (n < 3) throw InvalidInputError("GpModel::fit: needs n >= 3");
    if (!data.inputs.allFinite() || !data.responses.allFinite())
        throw InvalidInputError("GpModel::fit: non-finite data");
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if ((data.inputs.row(a) - data.inputs.row(b))
                    .cwiseAbs()
                    .maxCoeff() < 1e-12)
                throw InvalidInputError(
                    "GpModel::fit: duplicate inputs at rows " +
                    std::to_string(a) + " and " + std::to_string(b));

    const double y_mean = data.responses.mean();
    const Eigen::VectorXd yc = data.responses.array() - y_mean;
    const double yvar = n > 1 ? yc.squaredNorm() / (n - 1) : 0.0;
    const double nugget = std::max(1e-6 * yvar, 1e-8);

    const auto sqdiff = pairwise_sqdiff(data.inputs);

    // search space: (log l_1 .. log l_P, log s2)
    const int dim = p + 1;
    Eigen::VectorXd lo(dim), hi(dim);
    lo.head(p).setConstant(options.log_ls_lo);
    hi.head(p).setConstant(options.log_ls_hi);
    lo[p] = options.log_var_lo;
    hi[p] = options.log_var_hi;

    auto objective = [&](const Eigen::VectorXd& params) {
        Eigen::VectorXd ls = params.head(p).array().exp();
        const double variance = std::exp(params[p]);
        return neg_log_lik(family, sqdiff, yc, ls, variance, nugget);
    };

    Rng rng(seed);
    NmResult best;
    for (int s = 0; s < options.n_starts; ++s) {
        Eigen::VectorXd x0(dim);
        for (int i = 0; i < dim; ++i) x0[i] = rng.uniform(lo[i], hi[i]);
        const NmResult res = nelder_mead(objective, x0, lo, hi,
                                         options.max_evals_per_start);
        if (res.f < best.f) best = res;
    }
    if (!std::isfinite(best.f))
        throw IllConditionedError(
            "GpModel::fit: no candidate produced a finite likelihood");

    KernelSpec spec;
    spec.family = family;
    spec.lengthscales = best.x.head(p).array().exp();
    spec.variance = std::exp(best.x[p]);
    spec.nugget = nugget;
    return with_spec(data, spec);
}

double GpModel::predict_mean(const Eigen::VectorXd& x) const {
    if (x.size() != data_.dim())
        throw InvalidInputError("predict_mean: dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < data_.n(); ++i)
        acc += alpha_[i] *
               kernel_eval(spec_, x, data_.inputs.row(i).transpose());
    return y_mean_ + acc;
}

Eigen::VectorXd GpModel::mean_gradient(const Eigen::VectorXd& x) const {
    if (x.size() != data_.dim())
        throw InvalidInputError("mean_gradient: dimension mismatch");
    const int p = data_.dim();
    const Eigen::ArrayXd inv_l2 =
        spec_.lengthscales.array().square().inverse();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < data_.n(); ++i) {
        const Eigen::ArrayXd diff =
            x.array() - data_.inputs.row(i).transpose().array();
        const double d = std::sqrt((diff.square() * inv_l2).sum());
        // dk/dx_j = w(d) * (x_j - xi_j) / l_j^2 for all three families;
        // w stays finite at d = 0 (for matern32 the d in dk/dd cancels
        // against the chain-rule 1/d).
        double w;
        switch (spec_.family) {
        case KernelFamily::gaussian:
            w = -spec_.variance * std::exp(-0.5 * d * d);
            break;
        case KernelFamily::matern52:
            w = -(5.0 / 3.0) * spec_.variance * (1.0 + kSqrt5 * d) *
                std::exp(-kSqrt5 * d);
            break;
        case KernelFamily::matern32:
            w = -3.0 * spec_.variance * std::exp(-kSqrt3 * d);
            break;
        }
        grad += (alpha_[i] * w) * (diff * inv_l2).matrix();
    }
    return grad;
}

nlohmann::json GpModel::summary() const {
    nlohmann::json out;
    out["family"] = family_name(spec_.family);
    out["lengthscales"] = std::vector<double>(
        spec_.lengthscales.data(),
        spec_.lengthscales.data() + spec_.lengthscales.size());
    out["variance"] = spec_.variance;
    out["nugget"] = spec_.nugget;
    out["log_marginal_likelihood"] = log_lik_;
    return out;
}

} // namespace jumpsas::gp
