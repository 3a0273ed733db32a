#include "krrbw/krr.hpp"

#include "krrbw/error.hpp"
#include "krrbw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace krrbw {

KrrModel::KrrModel(Matrix train_features, Vector alpha, double sigma, double lambda)
    : train_features_(std::move(train_features)),
      alpha_(std::move(alpha)),
      sigma_(sigma),
      lambda_(lambda) {
  if (train_features_.rows() != alpha_.size() || train_features_.rows() < 1) {
    throw std::invalid_argument("KrrModel: alpha length must equal the number of training rows");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("KrrModel: lambda must be finite and >= 0");
  }
}

Vector KrrModel::predict(const Matrix& x_new) const {
  if (x_new.rows() == 0) return Vector(0);
  if (x_new.cols() != train_features_.cols()) {
    throw std::invalid_argument("predict: input has " + std::to_string(x_new.cols()) +
                                " columns, model expects " +
                                std::to_string(train_features_.cols()));
  }
  return kernel_matrix(x_new, train_features_, sigma_.value()) * alpha_;
}

double KrrModel::predict_one(const Vector& x_star) const {
  const Matrix row = x_star.transpose();
  return predict(row)(0);
}

KrrModel fit(const Dataset& data, double sigma, double lambda) {
  const Matrix k = kernel_matrix(data.features(), sigma);
  try {
    const SpdSolve s = factor_spd(k, lambda);
    return KrrModel(data.features(), s.solve(data.response()), sigma, lambda);
  } catch (const FactorizationError& e) {
    throw FactorizationError(e.pivot(), std::string(e.what()) +
                                            " (sigma may be too large for this lambda)");
  }
}

Vector predict(const KrrModel& model, const Matrix& x_new) { return model.predict(x_new); }

Vector gradient_fd(const KrrModel& model, const Vector& x_star, std::optional<double> step) {
  if (x_star.size() != static_cast<Eigen::Index>(model.p())) {
    throw std::invalid_argument("gradient_fd: point dimension does not match the model");
  }
  const double h = step.value_or(1e-5 * std::max(1.0, x_star.cwiseAbs().maxCoeff()));
  if (!(h > 0.0)) throw std::invalid_argument("gradient_fd: step must be > 0");
  const Eigen::Index p = x_star.size();
  Matrix probes(2 * p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    probes.row(2 * j) = x_star.transpose();
    probes.row(2 * j + 1) = x_star.transpose();
    probes(2 * j, j) += h;
    probes(2 * j + 1, j) -= h;
  }
  const Vector f = model.predict(probes);
  Vector grad(p);
  for (Eigen::Index j = 0; j < p; ++j) grad(j) = (f(2 * j) - f(2 * j + 1)) / (2.0 * h);
  return grad;
}

void write_model(std::ostream& out, const KrrModel& model) {
  out << "# krr-model\n";
  out << "p,n,sigma,lambda\n";
  out << model.p() << ',' << model.n() << ',' << format_double(model.sigma()) << ','
      << format_double(model.lambda()) << '\n';
  out << "# train_features\n";
  const Matrix& x = model.train_features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << format_double(x(i, j));
    }
    out << '\n';
  }
  out << "# alpha\n";
  for (Eigen::Index i = 0; i < model.alpha().size(); ++i) {
    out << format_double(model.alpha()(i)) << '\n';
  }
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t expected, const char* section) {
  std::vector<double> values;
  std::istringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || !std::isfinite(v)) {
      throw InputError(std::string("model file: bad number in section ") + section);
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw InputError(std::string("model file: wrong field count in section ") + section);
  }
  return values;
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("model file: unexpected end of file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void expect(std::istream& in, const std::string& tag) {
  if (next_line(in) != tag) throw InputError("model file: expected '" + tag + "'");
}

}  // namespace

KrrModel read_model(std::istream& in) {
  expect(in, "# krr-model");
  expect(in, "p,n,sigma,lambda");
  const auto meta = parse_row(next_line(in), 4, "krr-model");
  const auto p = static_cast<Eigen::Index>(meta[0]);
  const auto n = static_cast<Eigen::Index>(meta[1]);
  if (p < 1 || n < 1 || static_cast<double>(p) != meta[0] || static_cast<double>(n) != meta[1]) {
    throw InputError("model file: p and n must be positive integers");
  }
  expect(in, "# train_features");
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = parse_row(next_line(in), static_cast<std::size_t>(p), "train_features");
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
  }
  expect(in, "# alpha");
  Vector alpha(n);
  for (Eigen::Index i = 0; i < n; ++i) alpha(i) = parse_row(next_line(in), 1, "alpha")[0];
  try {
    return KrrModel(std::move(x), std::move(alpha), meta[2], meta[3]);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const KrrModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_model(out, model);
}

KrrModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace krrbw
