#include "sessionscreen/reduce.hpp"

#include "sessionscreen/error.hpp"
#include "sessionscreen/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace sessionscreen {

Standardizer fit_standardizer(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw ValidationError("standardizer needs at least 2 rows");
  Standardizer s;
  s.means = x.colwise().mean().transpose();
  s.stds.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - s.means[j]).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
    s.stds[j] = sd < kConstantColumnStd ? 1.0 : sd;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != means.size()) throw ValidationError("standardizer width mismatch");
  return (x.rowwise() - means.transpose()).array().rowwise() / stds.transpose().array();
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != means.size()) throw ValidationError("standardizer width mismatch");
  return (x - means).cwiseQuotient(stds);
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

// Flips v so its largest-magnitude entry (first on ties) is positive.
template <typename Vec>
void canonical_sign(Vec&& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0) v = -v;
}

template <typename Matrix>
SvdModel truncated_svd(const Matrix& x, int k, const SvdOptions& options) {
  SvdModel model;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index side = std::min(n, d);
  if (k < 1) throw ValidationError("SVD component count must be >= 1");
  if (k > side) {
    if (!options.cap_to_rank) {
      throw ValidationError("SVD component count " + std::to_string(k) + " exceeds min(n, d) = " + std::to_string(side));
    }
    model.warnings.push_back("SVD components capped from " + std::to_string(k) + " to " + std::to_string(side));
    k = static_cast<int>(side);
  }

  // Subspace iteration on the smaller Gram matrix: X X^T when n <= d, else X^T X.
  const bool left = n <= d;
  auto gram_times = [&](const Eigen::MatrixXd& q) -> Eigen::MatrixXd {
    if (left) {
      Eigen::MatrixXd t = x.transpose() * q;
      return x * t;
    }
    Eigen::MatrixXd t = x * q;
    return x.transpose() * t;
  };

  const Eigen::Index block = std::min<Eigen::Index>(side, std::max<Eigen::Index>(2 * k, k + 10));
  Rng rng(options.seed);
  Eigen::MatrixXd q(side, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < side; ++i) q(i, j) = rng.normal();
  }
  q = orthonormalize(q);

  bool converged = false;
  int iteration = 0;
  while (iteration < options.max_iterations) {
    ++iteration;
    const Eigen::MatrixXd gq = gram_times(q);
    Eigen::MatrixXd t = q.transpose() * gq;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    // Ascending -> descending.
    const Eigen::MatrixXd s = eig.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd theta = eig.eigenvalues().reverse();
    const Eigen::MatrixXd ritz = q * s;
    const Eigen::MatrixXd g_ritz = gq * s;
    const double scale = std::max(theta[0], 0.0);
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      worst = std::max(worst, (g_ritz.col(j) - theta[j] * ritz.col(j)).norm());
    }
    if (scale == 0.0 || worst <= options.residual_tolerance * scale || block == side) {
      q = ritz;
      converged = true;
      break;
    }
    q = orthonormalize(g_ritz);
  }
  if (!converged) {
    throw NumericalError("truncated SVD did not converge after " + std::to_string(iteration) + " iterations");
  }

  // Rayleigh-Ritz on X itself over the converged right subspace, so singular
  // values are not squared and the components come out exactly orthonormal.
  Eigen::MatrixXd right = left ? orthonormalize(Eigen::MatrixXd(x.transpose() * q)) : q;
  const Eigen::MatrixXd projected = x * right;
  Eigen::JacobiSVD<Eigen::MatrixXd> small(projected, Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = small.singularValues();

  int usable = 0;
  const double top = sigma.size() > 0 ? sigma[0] : 0.0;
  while (usable < k && usable < sigma.size() && top > 0.0 && sigma[usable] > options.rank_tolerance * top) ++usable;
  if (usable < k) {
    if (!options.cap_to_rank || usable == 0) {
      throw NumericalError("matrix has usable rank " + std::to_string(usable) + " < requested " + std::to_string(k) +
                           " SVD components");
    }
    model.warnings.push_back("SVD components capped from " + std::to_string(k) + " to usable rank " +
                             std::to_string(usable));
    k = usable;
  }

  model.singular_values = sigma.head(k);
  model.components = (right * small.matrixV().leftCols(k)).transpose();
  for (int j = 0; j < k; ++j) canonical_sign(model.components.row(j));
  return model;
}

}  // namespace

SvdModel fit_truncated_svd(const Eigen::MatrixXd& x, int k, const SvdOptions& options) {
  return truncated_svd(x, k, options);
}

SvdModel fit_truncated_svd(const SparseMatrix& x, int k, const SvdOptions& options) {
  return truncated_svd(x, k, options);
}

Eigen::VectorXd SvdModel::project(const Eigen::VectorXd& x) const {
  if (x.size() != components.cols()) throw ValidationError("SVD projection width mismatch");
  return components * x;
}

Eigen::MatrixXd SvdModel::project_rows(const Eigen::MatrixXd& x) const {
  if (x.cols() != components.cols()) throw ValidationError("SVD projection width mismatch");
  return x * components.transpose();
}

Eigen::MatrixXd SvdModel::project_rows(const SparseMatrix& x) const {
  if (x.cols() != components.cols()) throw ValidationError("SVD projection width mismatch");
  return x * components.transpose();
}

double Kernel::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (type == Type::linear) return a.dot(b);
  return std::exp(-gamma * (a - b).squaredNorm());
}

Eigen::MatrixXd center_kernel(const Eigen::MatrixXd& k) {
  const Eigen::VectorXd col_means = k.colwise().mean().transpose();
  const Eigen::VectorXd row_means = k.rowwise().mean();
  const double grand = k.mean();
  Eigen::MatrixXd c = k;
  c.rowwise() -= col_means.transpose();
  c.colwise() -= row_means;
  c.array() += grand;
  return c;
}

KpcaModel fit_kernel_pca(const Eigen::MatrixXd& x, int m, Kernel kernel, const FitOptions& options) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ValidationError("kernel PCA needs at least 2 points");
  if (m < (options.cap_to_rank ? 1 : 2)) throw ValidationError("kernel PCA component count must be >= 2");
  KpcaModel model;
  if (m > n) {
    if (!options.cap_to_rank) {
      throw ValidationError("kernel PCA component count " + std::to_string(m) + " exceeds n = " + std::to_string(n));
    }
    model.warnings.push_back("kernel PCA components capped from " + std::to_string(m) + " to " + std::to_string(n));
    m = static_cast<int>(n);
  }
  if (kernel.type == Kernel::Type::rbf && kernel.gamma <= 0.0) {
    kernel.gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(x.cols(), 1));
  }

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = x.row(i).transpose();
    for (Eigen::Index j = i; j < n; ++j) {
      k(i, j) = k(j, i) = kernel(xi, x.row(j).transpose());
    }
  }
  const Eigen::MatrixXd centered = center_kernel(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered);
  const Eigen::VectorXd lambda = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  const double tolerance = kKpcaEigenTolerance * std::max(1.0, lambda[0]);
  int usable = 0;
  while (usable < n && lambda[usable] > tolerance) ++usable;
  if (usable < m) {
    if (!options.cap_to_rank || usable == 0) {
      throw NumericalError("centered kernel has usable rank " + std::to_string(usable) + " < requested " +
                           std::to_string(m) + " components");
    }
    model.warnings.push_back("kernel PCA components capped from " + std::to_string(m) + " to usable rank " +
                             std::to_string(usable));
    m = usable;
  }

  model.training_points = x;
  model.kernel = kernel;
  model.eigenvalues = lambda.head(m);
  model.centered_eigenvectors.resize(n, m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd v = vectors.col(j);
    canonical_sign(v);
    model.centered_eigenvectors.col(j) = v / std::sqrt(lambda[j]);
  }
  model.kernel_column_means = k.colwise().mean().transpose();
  model.kernel_grand_mean = k.mean();
  return model;
}

Eigen::VectorXd KpcaModel::project(const Eigen::VectorXd& x) const {
  if (x.size() != training_points.cols()) throw ValidationError("kernel PCA projection width mismatch");
  const Eigen::Index n = training_points.rows();
  Eigen::VectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) row[i] = kernel(x, training_points.row(i).transpose());
  const double row_mean = row.mean();
  row.array() += kernel_grand_mean - row_mean;
  row -= kernel_column_means;
  return centered_eigenvectors.transpose() * row;
}

Eigen::MatrixXd KpcaModel::project_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), components());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = project(x.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXd concat_reduced(const Eigen::VectorXd& text_proj, const Eigen::VectorXd& dense_proj) {
  Eigen::VectorXd out(text_proj.size() + dense_proj.size());
  out << text_proj, dense_proj;
  return out;
}

Eigen::MatrixXd concat_reduced_rows(const Eigen::MatrixXd& text_proj, const Eigen::MatrixXd& dense_proj) {
  if (text_proj.rows() != dense_proj.rows()) throw ValidationError("row count mismatch in concat_reduced_rows");
  Eigen::MatrixXd out(text_proj.rows(), text_proj.cols() + dense_proj.cols());
  out << text_proj, dense_proj;
  return out;
}

}  // namespace sessionscreen
