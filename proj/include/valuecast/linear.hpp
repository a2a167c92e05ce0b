#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

// Baseline regressors: least squares, lasso, elastic net and kernel ridge.
// Every model standardizes the design internally (zero mean, unit population
// variance per column). Constant columns get weight 0.
namespace valuecast::linear {

struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // 1 for constant columns
  std::vector<bool> constant;

  static Standardizer fit(const Eigen::MatrixXd& X);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct LinearModel {
  Standardizer standardizer;
  Eigen::VectorXd weights;  // on standardized columns, target units
  double intercept = 0;
  bool converged = true;
  int sweeps = 0;
  // Penalized objective after each full sweep, when requested.
  std::vector<double> objective_trace;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
  // Weights and intercept expressed on the raw (unstandardized) columns.
  Eigen::VectorXd raw_weights() const;
  double raw_intercept() const;
};

// Normal equations with a Cholesky solve. Throws Error(kSingularDesign) when
// the standardized Gram matrix is numerically rank deficient.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Minimizes (1/2n)|y - Zw|^2 + (alpha/2)|w|^2 in closed form.
LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double alpha);

struct CoordinateDescentOptions {
  double alpha = 1.0;
  double l1_ratio = 1.0;
  double tol = 1e-7;
  int max_iter = 10000;
  bool record_objective = false;
};

// Cyclic coordinate descent on
//   (1/2n)|y~ - Zw|^2 + alpha (l1_ratio |w|_1 + (1 - l1_ratio)/2 |w|^2)
// where y~ is the centered target divided by its standard deviation, so
// alpha is scale free. Converged when the largest coordinate change in one
// sweep is below tol. Hitting max_iter leaves `converged` false.
LinearModel fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const CoordinateDescentOptions& options);
LinearModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double alpha, double tol = 1e-7, int max_iter = 10000);

double soft_threshold(double x, double t);

struct Kernel {
  enum class Type { kPolynomial, kRbf };
  Type type = Type::kPolynomial;
  double gamma = 1.0;
  double coef0 = 1.0;
  int degree = 2;

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) const;
  std::string describe() const;
};

Eigen::MatrixXd gram(const Kernel& k, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B);

struct KernelModel {
  Standardizer standardizer;
  Eigen::MatrixXd training_points;  // standardized
  Eigen::VectorXd dual;
  double intercept = 0;  // mean of the training target
  Kernel kernel;
  double alpha = 1.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// dual = (K + alpha I)^-1 (y - mean(y)) by Cholesky. Throws
// Error(kNotPositiveDefinite) if the factorization fails.
KernelModel fit_krr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double alpha, const Kernel& kernel);

void write_model(std::ostream& os, const LinearModel& m);
void write_model(std::ostream& os, const KernelModel& m);
LinearModel read_linear_model(std::istream& is);
KernelModel read_kernel_model(std::istream& is);

}  // namespace valuecast::linear
