#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace sessionscreen {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Per-column z-scoring with the sample (n - 1) standard deviation.
// Columns whose deviation is below kConstantColumnStd get std 1, so they map
// to zero after centering.
inline constexpr double kConstantColumnStd = 1e-12;

struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& x);

// Reductions may cap the requested dimension at what the data supports
// (instead of throwing) and record why.
struct FitOptions {
  bool cap_to_rank = false;
};

struct SvdOptions : FitOptions {
  int max_iterations = 1000;
  double residual_tolerance = 1e-10;  // relative to the top eigenvalue of the Gram matrix
  // Singular values below this fraction of the largest are treated as zero.
  double rank_tolerance = 1e-10;
  unsigned long long seed = 0x5eed;
};

struct SvdModel {
  Eigen::MatrixXd components;        // k x d, orthonormal rows
  Eigen::VectorXd singular_values;   // k, non-increasing
  std::vector<std::string> warnings;

  int rank() const { return static_cast<int>(singular_values.size()); }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd project_rows(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd project_rows(const SparseMatrix& x) const;
};

// Top-k right singular vectors by block subspace iteration on the smaller
// Gram matrix (X X^T or X^T X) with Rayleigh-Ritz extraction. Each component
// is signed so its largest-magnitude entry is positive.
SvdModel fit_truncated_svd(const Eigen::MatrixXd& x, int k, const SvdOptions& options = {});
SvdModel fit_truncated_svd(const SparseMatrix& x, int k, const SvdOptions& options = {});

struct Kernel {
  enum class Type { rbf, linear };
  Type type = Type::rbf;
  double gamma = 0.0;  // rbf only; <= 0 means 1 / d at fit time

  static Kernel rbf(double gamma = 0.0) { return {Type::rbf, gamma}; }
  static Kernel linear() { return {Type::linear, 0.0}; }

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

// Eigenvalues at or below kKpcaEigenTolerance * max(1, largest) are unusable.
inline constexpr double kKpcaEigenTolerance = 1e-10;

struct KpcaModel {
  Eigen::MatrixXd training_points;   // n x d
  Kernel kernel;                     // gamma resolved
  // Column j is the j-th eigenvector of the centered kernel divided by
  // sqrt(eigenvalue), so the implied feature-space axis has unit norm and
  // training projections equal sqrt(eigenvalue) * eigenvector.
  Eigen::MatrixXd centered_eigenvectors;  // n x m
  Eigen::VectorXd eigenvalues;            // m, descending
  Eigen::VectorXd kernel_column_means;    // mean over training points of k(x_i, x_j), per j
  double kernel_grand_mean = 0.0;
  std::vector<std::string> warnings;

  int components() const { return static_cast<int>(eigenvalues.size()); }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd project_rows(const Eigen::MatrixXd& x) const;
};

// Centered kernel K' = K - 1K - K1 + 1K1, with 1 the n x n matrix of 1/n.
Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& k);

KpcaModel fit_kernel_pca(const Eigen::MatrixXd& x, int m, Kernel kernel = Kernel::rbf(),
                         const FitOptions& options = {});

// text part first, then dense part.
Eigen::VectorXd concat_reduced(const Eigen::VectorXd& text_proj, const Eigen::VectorXd& dense_proj);
Eigen::MatrixXd concat_reduced_rows(const Eigen::MatrixXd& text_proj, const Eigen::MatrixXd& dense_proj);

}  // namespace sessionscreen
