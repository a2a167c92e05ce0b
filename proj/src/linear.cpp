#include "valuecast/linear.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "valuecast/error.hpp"
#include "valuecast/text.hpp"

namespace valuecast::linear {

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
  Standardizer s;
  const auto n = static_cast<double>(X.rows());
  s.mean = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  s.constant.assign(static_cast<std::size_t>(X.cols()), false);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    // Relative test so columns with large offsets still count as constant.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))))) {
      s.scale(j) = 1.0;
      s.constant[static_cast<std::size_t>(j)] = true;
    } else {
      s.scale(j) = sd;
    }
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "expected " + std::to_string(mean.size()) + " columns, got " +
                    std::to_string(X.cols()));
  }
  Eigen::MatrixXd Z = (X.rowwise() - mean.transpose()).array().rowwise() /
                      scale.transpose().array();
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    if (constant[static_cast<std::size_t>(j)]) Z.col(j).setZero();
  }
  return Z;
}

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
  return (standardizer.apply(X) * weights).array() + intercept;
}

Eigen::VectorXd LinearModel::raw_weights() const {
  return weights.cwiseQuotient(standardizer.scale);
}

double LinearModel::raw_intercept() const {
  return intercept - standardizer.mean.dot(raw_weights());
}

namespace {

void check_shapes(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "X and y disagree on row count");
  }
  if (X.rows() < 2) throw Error(ErrorCode::kTooSmall, "need at least 2 rows");
}

// Indices of the non-constant columns.
std::vector<Eigen::Index> active_columns(const Standardizer& s) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < s.constant.size(); ++j) {
    if (!s.constant[j]) cols.push_back(static_cast<Eigen::Index>(j));
  }
  return cols;
}

Eigen::MatrixXd take_columns(const Eigen::MatrixXd& Z,
                             const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(Z.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = Z.col(cols[k]);
  }
  return out;
}

}  // namespace

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  check_shapes(X, y);
  LinearModel m;
  m.standardizer = Standardizer::fit(X);
  m.intercept = y.mean();
  m.weights = Eigen::VectorXd::Zero(X.cols());
  const auto cols = active_columns(m.standardizer);
  if (cols.empty()) return m;
  const Eigen::MatrixXd Z = take_columns(m.standardizer.apply(X), cols);
  const Eigen::VectorXd yc = y.array() - m.intercept;

  const Eigen::MatrixXd G = Z.transpose() * Z;
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
    throw Error(ErrorCode::kSingularDesign,
                "design is rank deficient (reciprocal condition " +
                    text::format_double(llt.info() == Eigen::Success ? llt.rcond() : 0.0) +
                    ")");
  }
  const Eigen::VectorXd w = llt.solve(Z.transpose() * yc);
  for (std::size_t k = 0; k < cols.size(); ++k) m.weights(cols[k]) = w(static_cast<Eigen::Index>(k));
  return m;
}

LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double alpha) {
  check_shapes(X, y);
  if (!(alpha >= 0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  LinearModel m;
  m.standardizer = Standardizer::fit(X);
  m.intercept = y.mean();
  m.weights = Eigen::VectorXd::Zero(X.cols());
  const auto cols = active_columns(m.standardizer);
  if (cols.empty()) return m;
  const Eigen::MatrixXd Z = take_columns(m.standardizer.apply(X), cols);
  const double n = static_cast<double>(X.rows());
  const Eigen::VectorXd yc = y.array() - m.intercept;
  Eigen::MatrixXd A = Z.transpose() * Z / n;
  A.diagonal().array() += alpha;
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw Error(ErrorCode::kSingularDesign, "ridge system is singular");
  }
  const Eigen::VectorXd w = llt.solve(Z.transpose() * yc / n);
  for (std::size_t k = 0; k < cols.size(); ++k) m.weights(cols[k]) = w(static_cast<Eigen::Index>(k));
  return m;
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

LinearModel fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const CoordinateDescentOptions& opt) {
  check_shapes(X, y);
  if (!(opt.alpha >= 0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  if (!(opt.l1_ratio >= 0 && opt.l1_ratio <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "l1_ratio must lie in [0, 1]");
  }
  LinearModel m;
  m.standardizer = Standardizer::fit(X);
  m.intercept = y.mean();
  m.weights = Eigen::VectorXd::Zero(X.cols());
  const auto cols = active_columns(m.standardizer);
  const double n = static_cast<double>(X.rows());
  const Eigen::VectorXd yc = y.array() - m.intercept;
  const double y_scale = std::sqrt(yc.squaredNorm() / n);
  if (cols.empty() || y_scale == 0) return m;

  const Eigen::MatrixXd Z = take_columns(m.standardizer.apply(X), cols);
  const auto p = Z.cols();
  Eigen::VectorXd col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = Z.col(j).squaredNorm() / n;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = yc / y_scale;
  const double l1 = opt.alpha * opt.l1_ratio;
  const double l2 = opt.alpha * (1.0 - opt.l1_ratio);

  const auto objective = [&] {
    return r.squaredNorm() / (2 * n) + l1 * w.lpNorm<1>() + 0.5 * l2 * w.squaredNorm();
  };
  // One pass over `which`; returns the largest coordinate change.
  const auto sweep = [&](bool active_only) {
    double max_delta = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = w(j);
      if (active_only && old == 0.0) continue;
      const double rho = Z.col(j).dot(r) / n + col_sq(j) * old;
      const double updated = soft_threshold(rho, l1) / (col_sq(j) + l2);
      const double delta = updated - old;
      if (delta != 0.0) {
        r.noalias() -= delta * Z.col(j);
        w(j) = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    return max_delta;
  };

  m.converged = false;
  int sweeps = 0;
  while (sweeps < opt.max_iter) {
    const double full = sweep(false);
    ++sweeps;
    if (opt.record_objective) m.objective_trace.push_back(objective());
    if (full < opt.tol) {
      m.converged = true;
      break;
    }
    // Settle the current support before the next full pass.
    while (sweeps < opt.max_iter) {
      const double partial = sweep(true);
      ++sweeps;
      if (opt.record_objective) m.objective_trace.push_back(objective());
      if (partial < opt.tol) break;
    }
  }
  m.sweeps = sweeps;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    m.weights(cols[k]) = w(static_cast<Eigen::Index>(k)) * y_scale;
  }
  return m;
}

LinearModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double alpha, double tol, int max_iter) {
  return fit_elastic_net(X, y, {alpha, 1.0, tol, max_iter, false});
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) const {
  if (type == Type::kRbf) return std::exp(-gamma * (a - b).squaredNorm());
  return std::pow(gamma * a.dot(b) + coef0, degree);
}

std::string Kernel::describe() const {
  std::ostringstream os;
  if (type == Type::kRbf) {
    os << "rbf gamma " << text::format_double(gamma);
  } else {
    os << "polynomial gamma " << text::format_double(gamma) << " coef0 "
       << text::format_double(coef0) << " degree " << degree;
  }
  return os.str();
}

Eigen::MatrixXd gram(const Kernel& k, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  if (k.type == Kernel::Type::kPolynomial) {
    K.noalias() = A * B.transpose();
    K = (k.gamma * K.array() + k.coef0).pow(k.degree);
    return K;
  }
  const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
  K.noalias() = -2.0 * A * B.transpose();
  K.colwise() += a2;
  K.rowwise() += b2.transpose();
  return (-k.gamma * K.array().max(0.0)).exp();
}

Eigen::VectorXd KernelModel::predict(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd Z = standardizer.apply(X);
  return (gram(kernel, Z, training_points) * dual).array() + intercept;
}

KernelModel fit_krr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double alpha, const Kernel& kernel) {
  check_shapes(X, y);
  if (!(alpha > 0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be > 0");
  KernelModel m;
  m.standardizer = Standardizer::fit(X);
  m.training_points = m.standardizer.apply(X);
  m.intercept = y.mean();
  m.kernel = kernel;
  m.alpha = alpha;
  Eigen::MatrixXd K = gram(kernel, m.training_points, m.training_points);
  K.diagonal().array() += alpha;
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "K + alpha I is not positive definite for kernel " + kernel.describe());
  }
  m.dual = llt.solve((y.array() - m.intercept).matrix());
  return m;
}

namespace {

void write_vector(std::ostream& os, const char* tag, const Eigen::VectorXd& v) {
  os << tag;
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << text::format_double(v(i));
  os << '\n';
}

void write_standardizer(std::ostream& os, const Standardizer& s) {
  write_vector(os, "mean", s.mean);
  write_vector(os, "scale", s.scale);
  os << "constant";
  for (bool c : s.constant) os << ' ' << (c ? 1 : 0);
  os << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::istringstream line(const std::string& tag) {
    std::string l;
    while (std::getline(is_, l)) {
      if (l.empty()) continue;
      std::istringstream ss(l);
      std::string got;
      ss >> got;
      if (got != tag) {
        throw Error(ErrorCode::kParse, "expected '" + tag + "', found '" + got + "'");
      }
      return ss;
    }
    throw Error(ErrorCode::kParse, "unexpected end of model, wanted '" + tag + "'");
  }

  static double number(std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) throw Error(ErrorCode::kParse, "missing number");
    const auto v = text::parse_double(tok);
    if (!v) throw Error(ErrorCode::kParse, "bad number '" + tok + "'");
    return *v;
  }

  Eigen::VectorXd vector(const std::string& tag, Eigen::Index n) {
    auto ss = line(tag);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = number(ss);
    return v;
  }

  Standardizer standardizer(Eigen::Index p) {
    Standardizer s;
    s.mean = vector("mean", p);
    s.scale = vector("scale", p);
    auto ss = line("constant");
    for (Eigen::Index i = 0; i < p; ++i) s.constant.push_back(number(ss) != 0);
    return s;
  }

 private:
  std::istream& is_;
};

}  // namespace

void write_model(std::ostream& os, const LinearModel& m) {
  os << "linear_model 1\n";
  os << "features " << m.weights.size() << '\n';
  os << "intercept " << text::format_double(m.intercept) << '\n';
  os << "converged " << (m.converged ? 1 : 0) << '\n';
  write_standardizer(os, m.standardizer);
  write_vector(os, "weights", m.weights);
}

void write_model(std::ostream& os, const KernelModel& m) {
  os << "kernel_model 1\n";
  os << "kernel " << m.kernel.describe() << '\n';
  os << "alpha " << text::format_double(m.alpha) << '\n';
  os << "intercept " << text::format_double(m.intercept) << '\n';
  os << "shape " << m.training_points.rows() << ' ' << m.training_points.cols() << '\n';
  write_standardizer(os, m.standardizer);
  write_vector(os, "dual", m.dual);
  for (Eigen::Index i = 0; i < m.training_points.rows(); ++i) {
    write_vector(os, "point", m.training_points.row(i).transpose());
  }
}

LinearModel read_linear_model(std::istream& is) {
  Reader r(is);
  r.line("linear_model");
  auto fs = r.line("features");
  const auto p = static_cast<Eigen::Index>(Reader::number(fs));
  LinearModel m;
  auto is_ = r.line("intercept");
  m.intercept = Reader::number(is_);
  auto cs = r.line("converged");
  m.converged = Reader::number(cs) != 0;
  m.standardizer = r.standardizer(p);
  m.weights = r.vector("weights", p);
  return m;
}

KernelModel read_kernel_model(std::istream& is) {
  Reader r(is);
  r.line("kernel_model");
  KernelModel m;
  auto ks = r.line("kernel");
  std::string type, key;
  ks >> type;
  if (type == "rbf") {
    m.kernel.type = Kernel::Type::kRbf;
    ks >> key;
    m.kernel.gamma = Reader::number(ks);
  } else if (type == "polynomial") {
    m.kernel.type = Kernel::Type::kPolynomial;
    ks >> key;
    m.kernel.gamma = Reader::number(ks);
    ks >> key;
    m.kernel.coef0 = Reader::number(ks);
    ks >> key;
    m.kernel.degree = static_cast<int>(Reader::number(ks));
  } else {
    throw Error(ErrorCode::kParse, "unknown kernel '" + type + "'");
  }
  auto as = r.line("alpha");
  m.alpha = Reader::number(as);
  auto is_ = r.line("intercept");
  m.intercept = Reader::number(is_);
  auto ss = r.line("shape");
  const auto n = static_cast<Eigen::Index>(Reader::number(ss));
  const auto p = static_cast<Eigen::Index>(Reader::number(ss));
  m.standardizer = r.standardizer(p);
  m.dual = r.vector("dual", n);
  m.training_points.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.training_points.row(i) = r.vector("point", p).transpose();
  }
  return m;
}

}  // namespace valuecast::linear
