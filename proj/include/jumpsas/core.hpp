#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace jumpsas {

struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Seeded random source. Uniform doubles come straight from the top 53 bits
/// of a mt19937_64 stream and normals from the polar method, so streams are
/// reproducible for a given seed independent of the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal.
    double normal();

    Eigen::VectorXd uniform_vec(int p);
    Eigen::VectorXd normal_vec(int p);

    /// Derived stream for shard/replicate i.
    Rng derive(std::uint64_t index) const;

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct EigenDecomposition {
    Eigen::VectorXd values;  // sorted descending
    Eigen::MatrixXd vectors; // orthonormal columns, matching order
};

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
/// The input is symmetrized as (M + M^T)/2 first. Eigenvector sign
/// convention: the largest-magnitude entry of each column is positive.
EigenDecomposition sym_eig(const Eigen::MatrixXd& m);

/// Symmetric PSD sensitivity matrix with cached eigendecomposition.
class SpectralMatrix {
  public:
    explicit SpectralMatrix(const Eigen::MatrixXd& m);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    const Eigen::VectorXd& eigenvalues() const { return eig_.values; }
    const Eigen::MatrixXd& eigenvectors() const { return eig_.vectors; }
    Eigen::VectorXd leading_eigenvector() const { return eig_.vectors.col(0); }

  private:
    Eigen::MatrixXd entries_;
    EigenDecomposition eig_;
};

/// Symmetric square root S = V diag(sqrt(max(lambda, 0))) V^T with
/// S S^T = m. Eigenvalues in [-1e-8 * lambda_max, 0) are clamped to 0;
/// anything below that tolerance is rejected as not PSD.
Eigen::MatrixXd psd_sqrt(const SpectralMatrix& m);

/// |u^T v| after normalizing both arguments. Sign- and scale-invariant.
double subspace_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct ParameterRange {
    std::string name;
    double min;
    double max;
};

/// Design matrix in the unit hypercube plus scalar responses.
struct Dataset {
    Eigen::MatrixXd inputs;    // n x P, coordinates in [0, 1]
    Eigen::VectorXd responses; // length n
    std::vector<ParameterRange> ranges; // optional, for de/normalization

    int n() const { return static_cast<int>(inputs.rows()); }
    int dim() const { return static_cast<int>(inputs.cols()); }
};

/// Map raw values to the unit cube column-wise by (x - min) / (max - min).
Dataset normalize_inputs(const Eigen::MatrixXd& raw,
                         const std::vector<ParameterRange>& ranges,
                         const Eigen::VectorXd& responses);

/// Inverse of normalize_inputs; requires ranges to be present.
Eigen::MatrixXd denormalize_inputs(const Dataset& data);

} // namespace jumpsas
