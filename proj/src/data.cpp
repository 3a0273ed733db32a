#include "krrbw/data.hpp"

#include "krrbw/error.hpp"
#include "krrbw/rng.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace krrbw {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_number(const std::string& text, double& value) {
  if (text.empty()) return false;
  char* end = nullptr;
  errno = 0;
  value = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && errno != ERANGE;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
}

// Numeric rows of a CSV stream; all rows share one width.
std::vector<std::vector<double>> read_rows(std::istream& in, bool has_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first_line = true;
  std::size_t width = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (first_line) {
      strip_bom(line);
      first_line = false;
      if (has_header) continue;
    }
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (rows.empty()) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw InputError("ragged CSV: row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_number(fields[c], values[c])) {
        throw InputError("CSV parse error at row " + std::to_string(row) + ", column " +
                         std::to_string(c + 1) + ": '" + fields[c] + "' is not a number");
      }
      if (!std::isfinite(values[c])) {
        throw InputError("non-finite value at row " + std::to_string(row) + ", column " +
                         std::to_string(c + 1));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("CSV contains no data rows");
  return rows;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset::Dataset(Matrix features, Vector response)
    : features_(std::move(features)), response_(std::move(response)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw std::invalid_argument("Dataset requires n >= 1 and p >= 1");
  }
  if (features_.rows() != response_.size()) {
    throw std::invalid_argument("Dataset: feature rows and response length differ");
  }
  if (!features_.allFinite() || !response_.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entries");
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  return Dataset(select_rows(features_, rows), select_rows(response_, rows));
}

Matrix select_rows(const Matrix& m, std::span<const Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Vector select_rows(const Vector& v, std::span<const Index> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Dataset read_csv(std::istream& in, bool has_header) {
  const auto rows = read_rows(in, has_header);
  const std::size_t width = rows.front().size();
  if (width < 2) throw InputError("CSV needs at least one feature column and a response column");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(width - 1);
  Matrix x(n, p);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = r[static_cast<std::size_t>(j)];
    y(i) = r.back();
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  return read_csv(in, has_header);
}

bool csv_has_header(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      strip_bom(line);
      first = false;
    }
    if (trim(line).empty()) continue;
    double v = 0.0;
    for (const auto& f : split_fields(line)) {
      if (!parse_number(f, v)) return true;
    }
    return false;
  }
  return false;
}

Matrix read_matrix_csv(std::istream& in, bool has_header) {
  const auto rows = read_rows(in, has_header);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_input(path);
  return read_matrix_csv(in, has_header);
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  const auto& x = data.features();
  const auto& y = data.response();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << format_double(x(i, j)) << ',';
    out << format_double(y(i)) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_csv(out, data);
}

Dataset generate_synthetic(Index n, double noise_sd, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_synthetic: n must be >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw std::invalid_argument("generate_synthetic: noise_sd must be finite and >= 0");
  }
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), 1);
  Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.uniform(-5.0, 5.0);
    const double clean = std::sin(2.0 * std::numbers::pi * x(i, 0));
    y(i) = noise_sd == 0.0 ? clean : clean + noise_sd * rng.normal();
  }
  return Dataset(std::move(x), std::move(y));
}

std::vector<Index> permutation(Index n, std::uint64_t seed) {
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (Index i = n; i > 1; --i) {
    const Index j = static_cast<Index>(rng.index(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<SplitPlan> make_kfold(Index n, Index k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw std::invalid_argument("make_kfold: need 2 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
  const auto perm = permutation(n, seed);
  std::vector<Index> fold_of(n);
  const Index base = n / k;
  const Index extra = n % k;
  Index pos = 0;
  for (Index f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index t = 0; t < size; ++t) fold_of[perm[pos++]] = f;
  }
  std::vector<SplitPlan> plans(k);
  for (Index f = 0; f < k; ++f) plans[f].seed = seed;
  for (Index i = 0; i < n; ++i) {
    for (Index f = 0; f < k; ++f) {
      (fold_of[i] == f ? plans[f].test_indices : plans[f].train_indices).push_back(i);
    }
  }
  return plans;
}

std::vector<SplitPlan> make_jackknife(Index n) {
  if (n < 2) throw std::invalid_argument("make_jackknife: need n >= 2");
  std::vector<SplitPlan> plans(n);
  for (Index i = 0; i < n; ++i) {
    plans[i].test_indices = {i};
    plans[i].train_indices.reserve(n - 1);
    for (Index j = 0; j < n; ++j) {
      if (j != i) plans[i].train_indices.push_back(j);
    }
  }
  return plans;
}

SplitPlan make_random_split(Index n, Index train_size, Index test_size, std::uint64_t seed) {
  if (train_size < 1 || test_size < 1 || train_size + test_size > n) {
    throw std::invalid_argument("make_random_split: need train + test <= n with both >= 1");
  }
  const auto perm = permutation(n, seed);
  SplitPlan plan;
  plan.seed = seed;
  plan.test_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(test_size));
  plan.train_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(test_size),
                            perm.begin() + static_cast<std::ptrdiff_t>(test_size + train_size));
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  return plan;
}

}  // namespace krrbw
