#include "doctest.h"

#include "krrbw/data.hpp"
#include "krrbw/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace krrbw;

TEST_SUITE("data") {

TEST_CASE("csv without header") {
  std::istringstream in("0,1\n1,3\n2,5\n");
  const Dataset d = read_csv(in, false);
  CHECK(d.n() == 3);
  CHECK(d.p() == 1);
  CHECK(d.response()(0) == 1.0);
  CHECK(d.response()(1) == 3.0);
  CHECK(d.response()(2) == 5.0);
  CHECK(d.features()(2, 0) == 2.0);
}

TEST_CASE("csv header is skipped") {
  std::istringstream in("x1,y\n0,1\n");
  const Dataset d = read_csv(in, true);
  CHECK(d.n() == 1);
  CHECK(d.p() == 1);
}

TEST_CASE("csv parse error names row and column") {
  std::istringstream in("0,abc\n");
  try {
    read_csv(in, false);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("csv ragged rows and non-finite values are rejected") {
  std::istringstream ragged("0,1\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(ragged, false), InputError);
  std::istringstream nan("0,nan\n");
  CHECK_THROWS_AS(read_csv(nan, false), InputError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty, false), InputError);
}

TEST_CASE("header detection") {
  const auto dir = std::filesystem::temp_directory_path() / "krrbw_data_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "h.csv") << "x1,y\n0,1\n";
    std::ofstream(dir / "n.csv") << "0,1\n1,2\n";
  }
  CHECK(csv_has_header(dir / "h.csv"));
  CHECK_FALSE(csv_has_header(dir / "n.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("write then read reproduces values") {
  const Dataset d = generate_synthetic(25, 0.3, 11);
  std::stringstream buf;
  write_csv(buf, d);
  const Dataset back = read_csv(buf, true);
  REQUIRE(back.n() == d.n());
  for (Index i = 0; i < d.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    CHECK(back.features()(r, 0) == d.features()(r, 0));
    CHECK(back.response()(r) == d.response()(r));
  }
}

TEST_CASE("csv round trip keeps 15 significant digits on arbitrary text") {
  std::istringstream in("0.123456789012345678,-3.14159265358979\n1e-300,2.5e10\n");
  const Dataset d = read_csv(in, false);
  std::stringstream out;
  write_csv(out, d);
  const Dataset back = read_csv(out, true);
  CHECK(std::abs(back.features()(0, 0) - 0.123456789012345678) <= 1e-15 * 0.1234);
  CHECK(back.features()(1, 0) == 1e-300);
  CHECK(back.response()(1) == 2.5e10);
}

TEST_CASE("zero-noise synthetic data is exactly on the sine") {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const Dataset d = generate_synthetic(1000, 0.0, seed);
    for (Eigen::Index i = 0; i < d.features().rows(); ++i) {
      const double x = d.features()(i, 0);
      CHECK(x >= -5.0);
      CHECK(x <= 5.0);
      CHECK(d.response()(i) == std::sin(2.0 * std::numbers::pi * x));
    }
  }
}

TEST_CASE("synthetic data is deterministic per seed") {
  const Dataset a = generate_synthetic(40, 0.1, 7);
  const Dataset b = generate_synthetic(40, 0.1, 7);
  CHECK(a.features() == b.features());
  CHECK(a.response() == b.response());
  const Dataset c = generate_synthetic(40, 0.1, 8);
  CHECK(a.response() != c.response());
}

TEST_CASE("synthetic noise variance") {
  const Dataset d = generate_synthetic(10000, 0.1, 3);
  double mean = 0.0;
  std::vector<double> r;
  for (Eigen::Index i = 0; i < d.features().rows(); ++i) {
    r.push_back(d.response()(i) - std::sin(2.0 * std::numbers::pi * d.features()(i, 0)));
    mean += r.back();
  }
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= static_cast<double>(r.size() - 1);
  CHECK(var >= 0.008);
  CHECK(var <= 0.012);
}

TEST_CASE("kfold shapes") {
  const auto loo = make_kfold(10, 10, 0);
  CHECK(loo.size() == 10);
  for (const auto& p : loo) {
    CHECK(p.test_indices.size() == 1);
    CHECK(p.train_indices.size() == 9);
  }
  const auto three = make_kfold(10, 3, 0);
  std::multiset<std::size_t> sizes;
  for (const auto& p : three) sizes.insert(p.test_indices.size());
  CHECK(sizes == std::multiset<std::size_t>{3, 3, 4});
  CHECK_THROWS_AS(make_kfold(5, 6, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_kfold(5, 1, 0), std::invalid_argument);
}

TEST_CASE("kfold partitions the index range for any seed") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index n = 3 + seed % 40;
    const Index k = 2 + seed % (n - 1);
    const auto plans = make_kfold(n, k, seed);
    REQUIRE(plans.size() == k);
    std::vector<int> hits(n, 0);
    for (const auto& p : plans) {
      CHECK(std::is_sorted(p.test_indices.begin(), p.test_indices.end()));
      CHECK(p.test_indices.size() + p.train_indices.size() == n);
      std::set<Index> train(p.train_indices.begin(), p.train_indices.end());
      for (Index t : p.test_indices) {
        ++hits[t];
        CHECK(train.count(t) == 0);
      }
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("jackknife plans") {
  const auto three = make_jackknife(3);
  CHECK(three.size() == 3);
  for (Index i = 0; i < 3; ++i) {
    CHECK(three[i].train_indices.size() == 2);
    CHECK(three[i].test_indices == std::vector<Index>{i});
  }
  CHECK(make_jackknife(2).size() == 2);
  CHECK_THROWS_AS(make_jackknife(1), std::invalid_argument);
}

TEST_CASE("random split is disjoint") {
  const SplitPlan s = make_random_split(50, 30, 15, 4);
  CHECK(s.train_indices.size() == 30);
  CHECK(s.test_indices.size() == 15);
  std::set<Index> all(s.train_indices.begin(), s.train_indices.end());
  all.insert(s.test_indices.begin(), s.test_indices.end());
  CHECK(all.size() == 45);
  CHECK(*all.rbegin() < 50);
}

TEST_CASE("permutation is a permutation") {
  auto p = permutation(100, 5);
  std::sort(p.begin(), p.end());
  for (Index i = 0; i < 100; ++i) CHECK(p[i] == i);
}

TEST_CASE("dataset validation") {
  Matrix x(2, 1);
  x << 0, 1;
  Vector y(3);
  y << 1, 2, 3;
  CHECK_THROWS_AS(Dataset(x, y), std::invalid_argument);
  Vector y2(2);
  y2 << 1, std::nan("");
  CHECK_THROWS_AS(Dataset(x, y2), std::invalid_argument);
}

}
