#pragma once

#include "jumpsas/asm.hpp"
#include "jumpsas/core.hpp"
#include "jumpsas/gp.hpp"
#include "jumpsas/reduce.hpp"

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace jumpsas::cli {

/// One harness run: seeds, sweep sizes, kernel choice, radii schedule,
/// input/output paths. Flat JSON on disk; CLI flags override file values.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<int> sizes;
    std::vector<int> dims;
    std::vector<std::string> kernels;
    std::vector<std::string> functions;
    int replicates = 1;
    std::vector<double> radii;
    std::vector<int> grid; // n_g sweep for fig-divergence
    int mc_samples = 10000;
    int knn_k = 5;
    int k_folds = 10;
    int sir_slices = 10;
    std::string input_csv;
    std::string ranges_path;
    std::string out_dir = ".";
    bool paper_mode = false;
    bool plot_data = false;

    static ExperimentConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    /// Fill experiment-specific defaults for fields left empty.
    void resolve_defaults();
    /// FNV-1a hash of the resolved config (out_dir excluded), hex.
    std::string hash() const;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void write_csv(const std::string& path,
                   const std::vector<std::string>& comments) const;
};

struct CrossoverResult {
    Table table;  // N, mean importances, median difference, excluded count
    Table series; // per-replicate rows
};

struct KernelStudyResult {
    Table table;  // function, P, N, kernel, mean error, std error
    Table series; // per-replicate rows
};

struct AnalyzeResult {
    nlohmann::json report;      // spectrum, eigenvectors, importances, dim
    Table projection;           // design projected on the top-2 eigenvectors
    Table bakeoff;              // method, fold, mse (+ summary rows)
    Table loadings;             // per-parameter eigenvector loadings
    bool degenerate = false;    // constant response: bake-off skipped
    std::string status;
};

Table run_fig_divergence(const ExperimentConfig& config);
CrossoverResult run_fig_crossover(const ExperimentConfig& config);
KernelStudyResult run_fig_kernels(const ExperimentConfig& config);
AnalyzeResult run_analyze(const ExperimentConfig& config);
nlohmann::json run_verify_theory(const ExperimentConfig& config);

/// Projection builders for the CV bake-off. The ASM builders fit a
/// fold-local surrogate; `fixed_dim` pins the truncation dimension (the
/// --paper-mode protocol), otherwise each fold selects its own from the
/// eigen-gap.
reduce::ProjectionBuilder make_asm_builder(gp::KernelFamily family,
                                           std::uint64_t seed,
                                           int mc_samples, bool truncated,
                                           std::optional<int> fixed_dim,
                                           const gp::FitOptions& options = {});
reduce::ProjectionBuilder make_sir_builder(int n_slices,
                                           std::optional<int> fixed_dim,
                                           gp::KernelFamily family,
                                           std::uint64_t seed,
                                           int mc_samples,
                                           const gp::FitOptions& options = {});

/// Dispatch a resolved config: run, write `<command>_<hash>.{csv,json}`
/// under out_dir. Returns 0 on success, 1 on input error, 2 on internal
/// failure.
int run_command(ExperimentConfig config);

} // namespace jumpsas::cli
