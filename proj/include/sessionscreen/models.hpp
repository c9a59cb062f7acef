#pragma once

#include "sessionscreen/reduce.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sessionscreen {

// Binary labels throughout: +1 bullying, -1 not bullying.
using Labels = std::vector<int>;

struct Prediction {
  int label = -1;
  double posterior = 0.0;  // P(bullying | x); NB only
};

// Gaussian Naive Bayes.
struct NbModel {
  double prior_positive = 0.5;
  double prior_negative = 0.5;
  Eigen::VectorXd mean_positive, mean_negative;
  Eigen::VectorXd var_positive, var_negative;
  double variance_floor = 0.0;

  // Joint log density log P(x, c) for c = +1 and c = -1.
  std::pair<double, double> log_joint(const Eigen::VectorXd& x) const;
  Prediction predict(const Eigen::VectorXd& x) const;
};

// Floor on per-class variances, as a fraction of the largest feature variance.
inline constexpr double kNbVarianceFloorFraction = 1e-9;

// Maximum likelihood means and variances per class. Each class needs at
// least two samples.
NbModel nb_fit(const Eigen::MatrixXd& x, std::span<const int> y);
Prediction nb_predict(const NbModel& model, const Eigen::VectorXd& x);

struct SvmOptions {
  double C = 1.0;
  // Stop when the maximal KKT violation of the dual falls below this.
  double tolerance = 1e-4;
  int max_epochs = 20000;  // one epoch = n pair updates
};

struct SvmModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double C = 1.0;
  double objective = 0.0;
  // Objective of the incumbent (best primal point seen) after each epoch.
  std::vector<double> objective_history;
  int epochs = 0;

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  // Zero decision maps to not bullying.
  int predict(const Eigen::VectorXd& x) const { return decision(x) > 0.0 ? 1 : -1; }
};

// (1/2)|w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))
double svm_objective(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& w, double b,
                     double C);

// Soft-margin linear SVM with unregularized bias, solved in the dual by SMO
// with second-order working-set selection. The bias is taken as the midpoint
// of the interval minimizing the primal for the final weights.
SvmModel svm_fit(const Eigen::MatrixXd& x, std::span<const int> y, const SvmOptions& options = {});
SvmModel svm_fit(const SparseMatrix& x, std::span<const int> y, const SvmOptions& options = {});

double svm_decision(const SvmModel& model, const Eigen::VectorXd& x);
int svm_predict(const SvmModel& model, const Eigen::VectorXd& x);

}  // namespace sessionscreen
