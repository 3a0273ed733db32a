#pragma once

#include "krrbw/bandwidth.hpp"
#include "krrbw/data.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace krrbw {

// 1 - SS_res / SS_tot with the mean of y_true as reference. Throws
// std::invalid_argument for length mismatch, n < 2 or constant y_true.
double r_squared(const Vector& y_true, const Vector& y_pred);

// Linear interpolation between order statistics (R type 7), q in [0, 1].
double percentile(std::vector<double> values, double q);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for fewer than two values
  double p05 = 0.0;
  double p95 = 0.0;
};

Summary summarize(const std::vector<double>& values);

// ---- jackknife ----------------------------------------------------------

struct JackknifeMethodStats {
  Method method = Method::Jacobian;
  Index replicates = 0;  // successful leave-one-out fits
  Index excluded = 0;    // replicates dropped after a selector/fit error
  std::vector<double> mean_prediction;
  std::vector<double> sd_prediction;
  double mean_sigma = 0.0;
  double sd_sigma = 0.0;
  std::vector<double> sigmas;  // per successful replicate, in replicate order
};

struct JackknifeReport {
  Matrix grid;
  std::vector<JackknifeMethodStats> methods;
};

// For each i, drops observation i, selects sigma with every method, fits and
// predicts on eval_grid. CV fold seeds derive from (settings.seed, i).
JackknifeReport run_jackknife(const Dataset& data, const std::vector<Method>& methods,
                              const Matrix& eval_grid, const SelectorSettings& settings);

// Columns: method,point,x1..xp,mean_prediction,sd_prediction,mean_sigma,sd_sigma,replicates,excluded
void write_jackknife_csv(std::ostream& out, const JackknifeReport& report);

// ---- sweeps -------------------------------------------------------------

enum class SweepAxis { SampleSize, Lambda };

std::string_view axis_name(SweepAxis axis);

// Fresh synthetic draws: `n` training rows plus `test_size` test rows.
struct SyntheticSource {
  double noise_sd = 0.1;
  Index test_size = 1000;
};

// A fixed dataset split at random per repeat. Sample-size sweeps hold out
// round(test_fraction * N) rows for testing and draw n training rows from
// the rest; lambda sweeps train on `n` rows and test on all remaining rows.
struct DatasetSource {
  Dataset data;
  double test_fraction = 0.15;
};

using DataSource = std::variant<SyntheticSource, DatasetSource>;

struct SweepConfig {
  SweepAxis axis = SweepAxis::SampleSize;
  std::vector<double> axis_values;
  double fixed_lambda = 1e-3;  // used when sweeping n
  Index fixed_n = 40;          // used when sweeping lambda
  Index repeats = 100;
  std::vector<Method> methods{Method::Jacobian, Method::CV};
  // lambda is overwritten per point; seed and threads are managed per replicate.
  SelectorSettings selector;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct SweepMethodStats {
  Method method = Method::Jacobian;
  Summary r2;
  Summary sigma;
  Index successes = 0;
  Index failures = 0;
  std::vector<double> r2_values;     // per successful repeat, in repeat order
  std::vector<double> sigma_values;
};

struct SweepPoint {
  double axis_value = 0.0;
  std::vector<SweepMethodStats> methods;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::SampleSize;
  std::vector<SweepPoint> points;
  Index repeats = 0;
  std::uint64_t seed = 0;
};

// Repeat r draws its data (or split) from derive_seed(seed, r), the same for
// every axis value, so the axis comparison is paired across repeats.
SweepReport run_sweep(const DataSource& source, const SweepConfig& config);

// Columns: axis,axis_value,method,mean_r2,p05_r2,p95_r2,mean_sigma,p05_sigma,p95_sigma,sd_sigma,successes,failures
void write_sweep_csv(std::ostream& out, const SweepReport& report);

// Parsed back from write_sweep_csv output; used by the plotter.
struct SweepRow {
  std::string axis;
  double axis_value = 0.0;
  std::string method;
  double mean_r2 = 0.0, p05_r2 = 0.0, p95_r2 = 0.0;
  double mean_sigma = 0.0, p05_sigma = 0.0, p95_sigma = 0.0, sd_sigma = 0.0;
  Index successes = 0, failures = 0;
};

std::vector<SweepRow> read_sweep_csv(std::istream& in);

}  // namespace krrbw
