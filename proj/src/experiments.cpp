#include "jumpsas/experiments.hpp"

#include "jumpsas/discas.hpp"
#include "jumpsas/io.hpp"
#include "jumpsas/testfn.hpp"
#include "jumpsas/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>

namespace jumpsas::cli {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string fd(double v) { return io::format_double(v); }

template <typename T>
std::vector<T> json_list(const nlohmann::json& doc, const std::string& key,
                         std::vector<T> fallback) {
    if (!doc.contains(key)) return fallback;
    return doc[key].get<std::vector<T>>();
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
    ExperimentConfig config;
    config.experiment = doc.value("experiment", "");
    config.seed = doc.value("seed", std::uint64_t{0});
    config.sizes = json_list<int>(doc, "sizes", {});
    config.dims = json_list<int>(doc, "dims", {});
    config.kernels = json_list<std::string>(doc, "kernels", {});
    config.functions = json_list<std::string>(doc, "functions", {});
    config.replicates = doc.value("replicates", 1);
    config.radii = json_list<double>(doc, "radii", {});
    config.grid = json_list<int>(doc, "grid", {});
    config.mc_samples = doc.value("mc_samples", 10000);
    config.knn_k = doc.value("knn_k", 5);
    config.k_folds = doc.value("k_folds", 10);
    config.sir_slices = doc.value("sir_slices", 10);
    config.input_csv = doc.value("input_csv", "");
    config.ranges_path = doc.value("ranges_path", "");
    config.out_dir = doc.value("out_dir", ".");
    config.paper_mode = doc.value("paper_mode", false);
    config.plot_data = doc.value("plot_data", false);
    return config;
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"experiment", experiment},
            {"seed", seed},
            {"sizes", sizes},
            {"dims", dims},
            {"kernels", kernels},
            {"functions", functions},
            {"replicates", replicates},
            {"radii", radii},
            {"grid", grid},
            {"mc_samples", mc_samples},
            {"knn_k", knn_k},
            {"k_folds", k_folds},
            {"sir_slices", sir_slices},
            {"input_csv", input_csv},
            {"ranges_path", ranges_path},
            {"out_dir", out_dir},
            {"paper_mode", paper_mode},
            {"plot_data", plot_data}};
}

void ExperimentConfig::resolve_defaults() {
    if (replicates < 1)
        throw InvalidInputError("config: replicates must be >= 1");
    if (experiment == "fig-divergence") {
        if (grid.empty())
            for (int n = 2; n <= 100; ++n) grid.push_back(n);
    } else if (experiment == "fig-crossover") {
        if (sizes.empty()) sizes = {10, 20, 30, 40, 60, 80, 100};
        if (kernels.empty()) kernels = {"matern32"};
        if (replicates == 1) replicates = 30;
    } else if (experiment == "fig-kernels") {
        if (sizes.empty()) sizes = {50, 100, 150, 200};
        if (dims.empty()) dims = {3, 5, 7};
        if (kernels.empty()) kernels = {"gaussian", "matern52", "matern32"};
        if (functions.empty()) functions = {"f1", "f2", "f3", "f4"};
        if (replicates == 1) replicates = 30;
    } else if (experiment == "analyze") {
        if (kernels.empty()) kernels = {"matern32"};
    } else if (experiment == "verify-theory") {
        // radii, when given, override the per-check defaults (6 entries)
    } else {
        throw InvalidInputError("config: unknown experiment '" + experiment +
                                "'");
    }
    if ((experiment == "fig-crossover" || experiment == "fig-kernels" ||
         experiment == "analyze") &&
        !sizes.empty() && experiment != "analyze") {
        for (int n : sizes)
            if (n < 3)
                throw InvalidInputError("config: sweep sizes must be >= 3");
    }
}

std::string ExperimentConfig::hash() const {
    nlohmann::json doc = to_json();
    doc.erase("out_dir");
    const std::string canonical = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

void Table::write_csv(const std::string& path,
                      const std::vector<std::string>& comments) const {
    std::ofstream out(path);
    if (!out) throw io::ParseError("cannot write '" + path + "'");
    for (const auto& c : comments) out << "# " << c << "\n";
    for (size_t j = 0; j < columns.size(); ++j)
        out << columns[j] << (j + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t j = 0; j < row.size(); ++j)
            out << row[j] << (j + 1 < row.size() ? "," : "\n");
}

Table run_fig_divergence(const ExperimentConfig& config) {
    Table table;
    table.columns = {"n_g", "estimate"};
    const auto step = [](double x) {
        return testfn::heaviside_1d(x, 0.5, 1.0);
    };
    for (int n_g : config.grid) {
        const double estimate = active::pwl_active_subspace_1d(step, n_g);
        table.rows.push_back({std::to_string(n_g), fd(estimate)});
    }
    return table;
}

CrossoverResult run_fig_crossover(const ExperimentConfig& config) {
    const gp::KernelFamily family = gp::family_from_name(
        config.kernels.empty() ? "matern32" : config.kernels[0]);

    CrossoverResult result;
    result.table.columns = {"N", "mean_importance_x1", "mean_importance_x2",
                            "median_diff", "excluded"};
    result.series.columns = {"N", "replicate", "importance_x1",
                             "importance_x2"};

    for (size_t si = 0; si < config.sizes.size(); ++si) {
        const int n = config.sizes[si];
        std::vector<double> imp1, imp2, diff;
        int excluded = 0;
        for (int rep = 0; rep < config.replicates; ++rep) {
            const std::uint64_t rep_seed =
                derive_seed(config.seed, si * 1000 + rep);
            Rng rng(rep_seed);
            Dataset data;
            data.inputs.resize(n, 2);
            data.responses.resize(n);
            for (int i = 0; i < n; ++i) {
                data.inputs.row(i) = rng.uniform_vec(2).transpose();
                data.responses[i] =
                    testfn::mixed_2d(data.inputs.row(i).transpose());
            }
            std::optional<gp::GpModel> model;
            for (int attempt = 0; attempt < 3 && !model; ++attempt) {
                try {
                    model = gp::GpModel::fit(data, family,
                                             derive_seed(rep_seed, attempt));
                } catch (const std::runtime_error&) {
                }
            }
            if (!model) {
                ++excluded;
                continue;
            }
            const SpectralMatrix c = active::mc_active_subspace(
                *model, config.mc_samples, derive_seed(rep_seed, 77));
            const Eigen::VectorXd imp = active::importance(c);
            imp1.push_back(imp[0]);
            imp2.push_back(imp[1]);
            diff.push_back(imp[0] - imp[1]);
            result.series.rows.push_back({std::to_string(n),
                                          std::to_string(rep), fd(imp[0]),
                                          fd(imp[1])});
        }
        const double m1 = imp1.empty()
                              ? 0.0
                              : std::accumulate(imp1.begin(), imp1.end(),
                                                0.0) / imp1.size();
        const double m2 = imp2.empty()
                              ? 0.0
                              : std::accumulate(imp2.begin(), imp2.end(),
                                                0.0) / imp2.size();
        result.table.rows.push_back({std::to_string(n), fd(m1), fd(m2),
                                     fd(median(diff)),
                                     std::to_string(excluded)});
    }
    return result;
}

KernelStudyResult run_fig_kernels(const ExperimentConfig& config) {
    KernelStudyResult result;
    result.table.columns = {"function", "P",          "N",
                            "kernel",   "mean_error", "std_error",
                            "excluded"};
    result.series.columns = {"function", "P", "N", "kernel", "replicate",
                             "error"};

    std::uint64_t combo = 0;
    for (const auto& fn_name : config.functions) {
        for (int p : config.dims) {
            for (int n : config.sizes) {
                for (const auto& kernel_name : config.kernels) {
                    const gp::KernelFamily family =
                        gp::family_from_name(kernel_name);
                    std::vector<double> errors;
                    int excluded = 0;
                    for (int rep = 0; rep < config.replicates; ++rep) {
                        const std::uint64_t rep_seed =
                            derive_seed(config.seed, combo * 100000 + rep);
                        const Eigen::VectorXd u = testfn::random_unit_vector(
                            p, derive_seed(rep_seed, 1));
                        const auto fn = testfn::ridge_family(fn_name, u);
                        Rng rng(derive_seed(rep_seed, 2));
                        Dataset data;
                        data.inputs.resize(n, p);
                        data.responses.resize(n);
                        for (int i = 0; i < n; ++i) {
                            data.inputs.row(i) =
                                rng.uniform_vec(p).transpose();
                            data.responses[i] =
                                fn.eval(data.inputs.row(i).transpose());
                        }
                        bool ok = false;
                        double err = 0.0;
                        for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
                            try {
                                const gp::GpModel model = gp::GpModel::fit(
                                    data, family,
                                    derive_seed(rep_seed, 3 + attempt));
                                const SpectralMatrix c =
                                    active::mc_active_subspace(
                                        model, config.mc_samples,
                                        derive_seed(rep_seed, 9));
                                err = active::subspace_error(c, u);
                                ok = true;
                            } catch (const std::runtime_error&) {
                            }
                        }
                        if (!ok) {
                            ++excluded;
                            continue;
                        }
                        errors.push_back(err);
                        result.series.rows.push_back(
                            {fn_name, std::to_string(p), std::to_string(n),
                             kernel_name, std::to_string(rep), fd(err)});
                    }
                    double mean = 0.0, se = 0.0;
                    if (!errors.empty()) {
                        mean = std::accumulate(errors.begin(), errors.end(),
                                               0.0) /
                               errors.size();
                        double var = 0.0;
                        for (double e : errors)
                            var += (e - mean) * (e - mean);
                        if (errors.size() > 1)
                            se = std::sqrt(var / (errors.size() - 1) /
                                           errors.size());
                    }
                    result.table.rows.push_back(
                        {fn_name, std::to_string(p), std::to_string(n),
                         kernel_name, fd(mean), fd(se),
                         std::to_string(excluded)});
                    ++combo;
                }
            }
        }
    }
    return result;
}

reduce::ProjectionBuilder make_asm_builder(gp::KernelFamily family,
                                           std::uint64_t seed,
                                           int mc_samples, bool truncated,
                                           std::optional<int> fixed_dim,
                                           const gp::FitOptions& options) {
    auto counter = std::make_shared<int>(0);
    return [=](const Dataset& train) {
        const std::uint64_t fold_seed = derive_seed(seed, 500 + (*counter)++);
        const gp::GpModel model =
            gp::GpModel::fit(train, family, fold_seed, options);
        const SpectralMatrix c = active::mc_active_subspace(
            model, mc_samples, derive_seed(fold_seed, 7));
        const active::SubspaceReport report = active::make_report(c);
        if (!truncated) return reduce::asm_projection(report);
        return reduce::asm_truncated_projection(
            report, fixed_dim.value_or(report.selected_dim));
    };
}

reduce::ProjectionBuilder make_sir_builder(int n_slices,
                                           std::optional<int> fixed_dim,
                                           gp::KernelFamily family,
                                           std::uint64_t seed,
                                           int mc_samples,
                                           const gp::FitOptions& options) {
    auto counter = std::make_shared<int>(0);
    return [=](const Dataset& train) {
        const std::uint64_t fold_seed = derive_seed(seed, 900 + (*counter)++);
        int d;
        if (fixed_dim) {
            d = *fixed_dim;
        } else {
            // the reduced dimension comes from the fold-local eigenanalysis
            const gp::GpModel model =
                gp::GpModel::fit(train, family, fold_seed, options);
            const SpectralMatrix c = active::mc_active_subspace(
                model, mc_samples, derive_seed(fold_seed, 7));
            d = active::make_report(c).selected_dim;
        }
        return reduce::sir_projection(reduce::sir(train, n_slices, d));
    };
}

AnalyzeResult run_analyze(const ExperimentConfig& config) {
    if (config.input_csv.empty())
        throw InvalidInputError("analyze: input_csv is required");
    Dataset data = io::read_csv(config.input_csv);
    if (!config.ranges_path.empty()) {
        const auto ranges = io::read_ranges(config.ranges_path);
        data = normalize_inputs(data.inputs, ranges, data.responses);
    } else if (data.inputs.minCoeff() < 0.0 || data.inputs.maxCoeff() > 1.0) {
        throw OutOfRangeError(
            "analyze: inputs outside [0,1]; provide a ranges file");
    }
    const int p = data.dim();

    AnalyzeResult result;
    result.projection.columns = {"t1", "t2", "y"};
    result.bakeoff.columns = {"method", "fold", "mse"};
    result.loadings.columns = {"parameter", "ev1", "ev2"};

    const double y_mean = data.responses.mean();
    const double y_var =
        (data.responses.array() - y_mean).square().sum() /
        std::max(data.n() - 1, 1);
    if (y_var < 1e-20) {
        result.degenerate = true;
        result.status = "bake-off skipped: constant responses";
        result.report = {{"degenerate", true}, {"status", result.status}};
        return result;
    }

    const gp::KernelFamily family = gp::family_from_name(
        config.kernels.empty() ? "matern32" : config.kernels[0]);
    const gp::GpModel model = gp::GpModel::fit(data, family, config.seed);
    const SpectralMatrix c = active::mc_active_subspace(
        model, config.mc_samples, derive_seed(config.seed, 11));
    const active::SubspaceReport report = active::make_report(c);

    result.report = report.to_json();
    result.report["gp"] = model.summary();
    result.report["paper_mode"] = config.paper_mode;
    result.status = "ok";
    result.report["status"] = result.status;

    // 2D projection of the design onto the top-2 eigenvectors
    const int n_proj = std::min(2, p);
    for (int i = 0; i < data.n(); ++i) {
        const Eigen::VectorXd x = data.inputs.row(i).transpose();
        const double t1 = c.eigenvectors().col(0).dot(x);
        const double t2 =
            n_proj > 1 ? c.eigenvectors().col(1).dot(x) : 0.0;
        result.projection.rows.push_back(
            {fd(t1), fd(t2), fd(data.responses[i])});
    }

    // eigenvector loading table
    for (int j = 0; j < p; ++j) {
        const std::string name =
            j < static_cast<int>(data.ranges.size()) &&
                    !data.ranges[j].name.empty()
                ? data.ranges[j].name
                : "x" + std::to_string(j + 1);
        result.loadings.rows.push_back(
            {name, fd(c.eigenvectors()(j, 0)),
             fd(n_proj > 1 ? c.eigenvectors()(j, 1) : 0.0)});
    }

    // CV bake-off over {Ident, ASM, ASMt, SIR}; the surrogate subspace is
    // computed once per fold and shared between the ASM-based methods.
    auto cache = std::make_shared<
        std::vector<std::optional<active::SubspaceReport>>>(config.k_folds);
    auto fold_report = [=, seed = config.seed,
                        mc = config.mc_samples](const Dataset& train,
                                                int fold) {
        auto& slot = (*cache)[fold];
        if (!slot) {
            const std::uint64_t fold_seed = derive_seed(seed, 500 + fold);
            const gp::GpModel fold_model =
                gp::GpModel::fit(train, family, fold_seed);
            slot = active::make_report(active::mc_active_subspace(
                fold_model, mc, derive_seed(fold_seed, 7)));
        }
        return *slot;
    };
    const std::optional<int> fixed_dim =
        config.paper_mode ? std::optional<int>(report.selected_dim)
                          : std::nullopt;

    struct Method {
        std::string name;
        reduce::ProjectionBuilder builder;
    };
    auto counting = [&](auto make) {
        auto counter = std::make_shared<int>(0);
        return [=](const Dataset& train) {
            return make(train, (*counter)++);
        };
    };
    std::vector<Method> methods;
    methods.push_back({"Ident", [p](const Dataset&) {
                           return reduce::identity_projection(p);
                       }});
    methods.push_back({"ASM", counting([&](const Dataset& train, int fold) {
                           return reduce::asm_projection(
                               fold_report(train, fold));
                       })});
    methods.push_back(
        {"ASMt", counting([&](const Dataset& train, int fold) {
             const auto rep = fold_report(train, fold);
             return reduce::asm_truncated_projection(
                 rep, fixed_dim.value_or(rep.selected_dim));
         })});
    methods.push_back(
        {"SIR", counting([&](const Dataset& train, int fold) {
             const int d = fixed_dim.value_or(
                 fold_report(train, fold).selected_dim);
             return reduce::sir_projection(
                 reduce::sir(train, config.sir_slices, d));
         })});

    nlohmann::json summary = nlohmann::json::object();
    for (const auto& method : methods) {
        const reduce::CvResult cv =
            reduce::kfold_cv_mse(data, method.builder, config.k_folds,
                                 config.knn_k, derive_seed(config.seed, 23));
        for (size_t fold = 0; fold < cv.fold_mse.size(); ++fold)
            result.bakeoff.rows.push_back({method.name,
                                           std::to_string(fold),
                                           fd(cv.fold_mse[fold])});
        result.bakeoff.rows.push_back({method.name, "mean", fd(cv.mean_mse)});
        summary[method.name] = cv.mean_mse;
    }
    result.report["bakeoff_mean_mse"] = summary;
    return result;
}

nlohmann::json run_verify_theory(const ExperimentConfig& config) {
    verify::TheoryOptions opts;
    if (config.seed != 0) opts.seed = config.seed;
    if (!config.radii.empty()) {
        if (config.radii.size() != 6)
            throw InvalidInputError(
                "verify-theory: radii must have 6 entries (lemma1, theorem1, "
                "lemma3, theorem2, theorem3, corollary1)");
        opts.lemma1_radius = config.radii[0];
        opts.theorem1_radius = config.radii[1];
        opts.lemma3_radius = config.radii[2];
        opts.theorem2_radius = config.radii[3];
        opts.theorem3_radius = config.radii[4];
        opts.corollary1_radius = config.radii[5];
    }
    const auto checks = verify::run_all(opts);
    nlohmann::json out;
    out["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& check : checks) {
        out["checks"].push_back(check.to_json());
        all = all && check.pass;
    }
    out["all_pass"] = all;
    return out;
}

int run_command(ExperimentConfig config) {
    try {
        config.resolve_defaults();
        const std::string hash = config.hash();
        std::filesystem::create_directories(config.out_dir);
        const std::string base =
            config.out_dir + "/" + config.experiment + "_" + hash;
        const std::vector<std::string> comments = {
            "config_hash=" + hash, "seed=" + std::to_string(config.seed)};

        auto write_json = [&](const std::string& path, nlohmann::json doc) {
            doc["config_hash"] = hash;
            doc["seed"] = config.seed;
            std::ofstream out(path);
            if (!out) throw io::ParseError("cannot write '" + path + "'");
            out << doc.dump(2) << "\n";
        };

        if (config.experiment == "fig-divergence") {
            run_fig_divergence(config).write_csv(base + ".csv", comments);
        } else if (config.experiment == "fig-crossover") {
            const CrossoverResult result = run_fig_crossover(config);
            result.table.write_csv(base + ".csv", comments);
            if (config.plot_data)
                result.series.write_csv(base + "_series.csv", comments);
        } else if (config.experiment == "fig-kernels") {
            const KernelStudyResult result = run_fig_kernels(config);
            result.table.write_csv(base + ".csv", comments);
            if (config.plot_data)
                result.series.write_csv(base + "_series.csv", comments);
        } else if (config.experiment == "analyze") {
            const AnalyzeResult result = run_analyze(config);
            write_json(base + ".json", result.report);
            if (!result.degenerate) {
                result.projection.write_csv(base + "_projection.csv",
                                            comments);
                result.bakeoff.write_csv(base + "_bakeoff.csv", comments);
                result.loadings.write_csv(base + "_loadings.csv", comments);
            }
            if (result.degenerate)
                std::cerr << result.status << "\n";
        } else if (config.experiment == "verify-theory") {
            const nlohmann::json report = run_verify_theory(config);
            write_json(base + ".json", report);
            for (const auto& check : report["checks"])
                std::cout << (check["pass"].get<bool>() ? "[PASS] " :
                                                          "[FAIL] ")
                          << check["name"].get<std::string>() << ": "
                          << check["statistic"].get<double>()
                          << " (threshold "
                          << check["threshold"].get<double>() << ")\n";
        }
        return 0;
    } catch (const io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const OutOfRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace jumpsas::cli
