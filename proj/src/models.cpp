#include "sessionscreen/models.hpp"

#include "sessionscreen/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sessionscreen {
namespace {

void check_labels(Eigen::Index rows, std::span<const int> y) {
  if (static_cast<std::size_t>(rows) != y.size()) throw ValidationError("feature rows and labels differ in length");
  for (int v : y) {
    if (v != 1 && v != -1) throw ValidationError("labels must be +1 or -1");
  }
}

}  // namespace

NbModel nb_fit(const Eigen::MatrixXd& x, std::span<const int> y) {
  check_labels(x.rows(), y);
  const auto n_pos = std::count(y.begin(), y.end(), 1);
  const auto n_neg = static_cast<long>(y.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ValidationError("naive Bayes needs both classes in the training set");
  if (n_pos < 2 || n_neg < 2) throw ValidationError("naive Bayes needs at least 2 samples per class");

  const Eigen::Index d = x.cols();
  NbModel m;
  m.prior_positive = static_cast<double>(n_pos) / static_cast<double>(y.size());
  m.prior_negative = static_cast<double>(n_neg) / static_cast<double>(y.size());
  m.mean_positive = m.mean_negative = m.var_positive = m.var_negative = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    (y[static_cast<std::size_t>(i)] == 1 ? m.mean_positive : m.mean_negative) += x.row(i).transpose();
  }
  m.mean_positive /= static_cast<double>(n_pos);
  m.mean_negative /= static_cast<double>(n_neg);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const bool pos = y[static_cast<std::size_t>(i)] == 1;
    const Eigen::VectorXd diff = x.row(i).transpose() - (pos ? m.mean_positive : m.mean_negative);
    (pos ? m.var_positive : m.var_negative) += diff.cwiseProduct(diff);
  }
  m.var_positive /= static_cast<double>(n_pos);
  m.var_negative /= static_cast<double>(n_neg);

  double max_var = 0.0;
  const Eigen::RowVectorXd overall = x.colwise().mean();
  for (Eigen::Index j = 0; j < d; ++j) {
    max_var = std::max(max_var, (x.col(j).array() - overall[j]).square().mean());
  }
  m.variance_floor = kNbVarianceFloorFraction * (max_var > 0.0 ? max_var : 1.0);
  m.var_positive = m.var_positive.cwiseMax(m.variance_floor);
  m.var_negative = m.var_negative.cwiseMax(m.variance_floor);
  return m;
}

std::pair<double, double> NbModel::log_joint(const Eigen::VectorXd& x) const {
  if (x.size() != mean_positive.size()) throw ValidationError("naive Bayes feature width mismatch");
  auto log_likelihood = [&](const Eigen::VectorXd& mean, const Eigen::VectorXd& var) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double z = x[j] - mean[j];
      s += -0.5 * std::log(2.0 * std::numbers::pi * var[j]) - z * z / (2.0 * var[j]);
    }
    return s;
  };
  return {std::log(prior_positive) + log_likelihood(mean_positive, var_positive),
          std::log(prior_negative) + log_likelihood(mean_negative, var_negative)};
}

Prediction NbModel::predict(const Eigen::VectorXd& x) const {
  const auto [lp, ln] = log_joint(x);
  // Logistic of the log-odds, evaluated on the stable side.
  const double odds = lp - ln;
  Prediction p;
  p.posterior = odds >= 0 ? 1.0 / (1.0 + std::exp(-odds)) : std::exp(odds) / (1.0 + std::exp(odds));
  p.label = p.posterior > 0.5 ? 1 : -1;
  return p;
}

Prediction nb_predict(const NbModel& model, const Eigen::VectorXd& x) { return model.predict(x); }

namespace {

struct HingeFit {
  double bias = 0.0;
  double hinge = 0.0;  // sum of hinge losses at bias
};

// Minimizes sum_i max(0, 1 - y_i (s_i + b)) over b. The loss is convex and
// piecewise linear with breakpoints 1 - s_i (positives) and -1 - s_i
// (negatives); its minimizers form an interval whose midpoint is returned.
HingeFit best_bias(const Eigen::VectorXd& s, std::span<const int> y) {
  std::vector<double> pos, neg, points;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double si = s[static_cast<Eigen::Index>(i)];
    (y[i] == 1 ? pos : neg).push_back(y[i] == 1 ? 1.0 - si : -1.0 - si);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  points.reserve(pos.size() + neg.size());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(points));

  std::vector<double> pos_suffix(pos.size() + 1, 0.0), neg_prefix(neg.size() + 1, 0.0);
  for (std::size_t i = pos.size(); i-- > 0;) pos_suffix[i] = pos_suffix[i + 1] + pos[i];
  for (std::size_t i = 0; i < neg.size(); ++i) neg_prefix[i + 1] = neg_prefix[i] + neg[i];

  // Positives with breakpoint p > b contribute p - b; negatives with q < b contribute b - q.
  auto loss = [&](double b) {
    const auto up = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), b) - pos.begin());
    const auto lo = static_cast<std::size_t>(std::lower_bound(neg.begin(), neg.end(), b) - neg.begin());
    const double pos_part = pos_suffix[up] - b * static_cast<double>(pos.size() - up);
    const double neg_part = b * static_cast<double>(lo) - neg_prefix[lo];
    return std::max(0.0, pos_part) + std::max(0.0, neg_part);
  };

  std::vector<double> values(points.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = loss(points[i]);
    best = std::min(best, values[i]);
  }
  const double slack = 1e-12 * (1.0 + best);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (values[i] <= best + slack) {
      lo = std::min(lo, points[i]);
      hi = std::max(hi, points[i]);
    }
  }
  HingeFit fit;
  fit.bias = 0.5 * (lo + hi);
  fit.hinge = loss(fit.bias);
  return fit;
}

struct DualSolution {
  Eigen::VectorXd alpha;
  double objective = 0.0;
  std::vector<double> history;
  int epochs = 0;
};

// SMO over the dual min 1/2 a'Qa - e'a, y'a = 0, 0 <= a <= C, with
// Q_ij = y_i y_j K_ij, following the second-order working-set selection of
// Fan, Chen and Lin (2005).
DualSolution smo(const Eigen::MatrixXd& gram, std::span<const int> y, const SvmOptions& opt) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const double C = opt.C;
  constexpr double tau = 1e-12;
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd q = yv.asDiagonal() * gram * yv.asDiagonal();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = -Eigen::VectorXd::Ones(n);

  auto in_up = [&](Eigen::Index t) { return (yv[t] > 0 && alpha[t] < C) || (yv[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (yv[t] > 0 && alpha[t] > 0) || (yv[t] < 0 && alpha[t] < C); };

  // Primal value of the current iterate with its best bias:
  // 1/2 |w|^2 = 1/2 sum a_i (G_i + 1), and w.x_i = y_i (G_i + 1).
  auto primal = [&]() {
    const Eigen::VectorXd margin = grad.array() + 1.0;
    const Eigen::VectorXd s = yv.cwiseProduct(margin);
    return 0.5 * alpha.dot(margin) + C * best_bias(s, y).hinge;
  };

  DualSolution out;
  double incumbent = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_alpha = alpha;
  auto record = [&] {
    const double p = primal();
    if (p < incumbent) {
      incumbent = p;
      best_alpha = alpha;
    }
    out.history.push_back(incumbent);
  };

  bool converged = false;
  long long iteration = 0;
  const long long per_epoch = std::max<Eigen::Index>(n, 1);
  while (out.epochs < opt.max_epochs) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -yv[t] * grad[t] >= gmax) {
        if (-yv[t] * grad[t] > gmax || i < 0) i = t;
        gmax = -yv[t] * grad[t];
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -yv[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i >= 0 && v < gmax) {
        const double b = gmax - v;
        double a = q(i, i) + q(t, t) - 2.0 * yv[i] * yv[t] * q(i, t);
        if (a <= 0) a = tau;
        const double obj = -(b * b) / a;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax - gmin < opt.tolerance) {
      converged = true;
      break;
    }

    const double old_i = alpha[i], old_j = alpha[j];
    if (yv[i] != yv[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    grad += q.col(i) * di + q.col(j) * dj;

    if (++iteration % per_epoch == 0) {
      ++out.epochs;
      record();
    }
  }
  if (!converged) {
    throw NumericalError("SVM did not converge within " + std::to_string(opt.max_epochs) +
                         " epochs; final objective " + std::to_string(std::min(incumbent, primal())));
  }
  ++out.epochs;
  record();
  out.alpha = best_alpha;
  out.objective = incumbent;
  return out;
}

template <typename Matrix>
SvmModel fit_linear_svm(const Matrix& x, std::span<const int> y, const SvmOptions& opt) {
  check_labels(x.rows(), y);
  if (!(opt.C > 0.0) || !std::isfinite(opt.C)) throw ConfigError("SVM C must be positive and finite");
  if (std::find(y.begin(), y.end(), 1) == y.end() || std::find(y.begin(), y.end(), -1) == y.end()) {
    throw ValidationError("SVM needs both classes in the training set");
  }
  const Eigen::MatrixXd gram = Eigen::MatrixXd(x * x.transpose());
  const DualSolution dual = smo(gram, y, opt);

  Eigen::VectorXd coef(static_cast<Eigen::Index>(y.size()));
  for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = dual.alpha[i] * y[static_cast<std::size_t>(i)];
  SvmModel m;
  m.C = opt.C;
  m.weights = x.transpose() * coef;
  const Eigen::VectorXd s = x * m.weights;
  const HingeFit fit = best_bias(s, y);
  m.bias = fit.bias;
  m.objective = 0.5 * m.weights.squaredNorm() + opt.C * fit.hinge;
  m.objective_history = dual.history;
  m.epochs = dual.epochs;
  if (!m.weights.allFinite() || !std::isfinite(m.bias)) throw NumericalError("SVM produced non-finite weights");
  return m;
}

}  // namespace

double svm_objective(const Eigen::MatrixXd& x, std::span<const int> y, const Eigen::VectorXd& w, double b, double C) {
  check_labels(x.rows(), y);
  const Eigen::VectorXd s = x * w;
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * (s[i] + b));
  return 0.5 * w.squaredNorm() + C * hinge;
}

SvmModel svm_fit(const Eigen::MatrixXd& x, std::span<const int> y, const SvmOptions& options) {
  return fit_linear_svm(x, y, options);
}

SvmModel svm_fit(const SparseMatrix& x, std::span<const int> y, const SvmOptions& options) {
  return fit_linear_svm(x, y, options);
}

double svm_decision(const SvmModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.weights.size()) throw ValidationError("SVM feature width mismatch");
  return model.decision(x);
}

int svm_predict(const SvmModel& model, const Eigen::VectorXd& x) { return svm_decision(model, x) > 0.0 ? 1 : -1; }

}  // namespace sessionscreen
