#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace krrbw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = std::size_t;

// Training data: n rows of p features plus one response per row.
// Construction validates shape and finiteness; the object is immutable.
class Dataset {
 public:
  Dataset(Matrix features, Vector response);

  const Matrix& features() const noexcept { return features_; }
  const Vector& response() const noexcept { return response_; }
  Index n() const noexcept { return static_cast<Index>(features_.rows()); }
  Index p() const noexcept { return static_cast<Index>(features_.cols()); }

  // Rows selected by `rows`, in the given order.
  Dataset subset(std::span<const Index> rows) const;

 private:
  Matrix features_;
  Vector response_;
};

// Rows of `m` selected by `rows`, in order.
Matrix select_rows(const Matrix& m, std::span<const Index> rows);
Vector select_rows(const Vector& v, std::span<const Index> rows);

struct SplitPlan {
  std::vector<Index> train_indices;
  std::vector<Index> test_indices;
  std::uint64_t seed = 0;
};

// CSV layout: every column but the last is a feature, the last is the
// response. Throws InputError naming the 1-based data row and column on
// parse failures, non-finite values and ragged rows.
Dataset read_csv(std::istream& in, bool has_header);
Dataset load_csv(const std::filesystem::path& path, bool has_header);

// True when the first non-empty line of the file has a non-numeric field.
bool csv_has_header(const std::filesystem::path& path);

// Plain numeric matrix (no response column), e.g. prediction inputs.
Matrix read_matrix_csv(std::istream& in, bool has_header);
Matrix load_matrix_csv(const std::filesystem::path& path, bool has_header);

// Writes "x1,...,xp,y" then one row per observation at 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

// Shortest round-trip-safe text for a double ("%.17g").
std::string format_double(double value);

// x ~ U[-5, 5], y = sin(2 pi x) + N(0, noise_sd^2).
Dataset generate_synthetic(Index n, double noise_sd, std::uint64_t seed);

// Uniform random permutation of [0, n) (Fisher-Yates on Rng).
std::vector<Index> permutation(Index n, std::uint64_t seed);

// k disjoint test folds covering [0, n); fold sizes differ by at most one.
// Index lists are sorted ascending.
std::vector<SplitPlan> make_kfold(Index n, Index k, std::uint64_t seed);

// Leave-one-out plans; plan i tests on {i}.
std::vector<SplitPlan> make_jackknife(Index n);

// Random split with `test_size` test rows and `train_size` training rows
// drawn without replacement from [0, n).
SplitPlan make_random_split(Index n, Index train_size, Index test_size, std::uint64_t seed);

}  // namespace krrbw
