#include "krrbw/eval.hpp"

#include "krrbw/error.hpp"
#include "krrbw/krr.hpp"
#include "krrbw/parallel.hpp"
#include "krrbw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace krrbw {

double r_squared(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("r_squared: length mismatch");
  if (y_true.size() < 2) throw std::invalid_argument("r_squared: need at least 2 values");
  const double mean = y_true.mean();
  const double ss_tot = (y_true.array() - mean).square().sum();
  if (!(ss_tot > 0.0)) throw std::invalid_argument("r_squared: y_true is constant");
  return 1.0 - (y_true - y_pred).squaredNorm() / ss_tot;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) {
    s.mean = s.sd = s.p05 = s.p95 = std::nan("");
    return s;
  }
  const double n = static_cast<double>(values.size());
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    s.mean = s.p05 = s.p95 = values.front();
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  s.p05 = percentile(values, 0.05);
  s.p95 = percentile(values, 0.95);
  return s;
}

// ---- jackknife ----------------------------------------------------------

JackknifeReport run_jackknife(const Dataset& data, const std::vector<Method>& methods,
                              const Matrix& eval_grid, const SelectorSettings& settings) {
  if (data.n() < 3) throw std::invalid_argument("run_jackknife: need n >= 3");
  if (eval_grid.cols() != static_cast<Eigen::Index>(data.p())) {
    throw std::invalid_argument("run_jackknife: evaluation grid has the wrong column count");
  }
  const auto plans = make_jackknife(data.n());
  struct Outcome {
    double sigma = 0.0;
    Vector prediction;
  };
  // outcomes[i][m]
  std::vector<std::vector<std::optional<Outcome>>> outcomes(
      plans.size(), std::vector<std::optional<Outcome>>(methods.size()));

  parallel_for(plans.size(), settings.threads, [&](std::size_t i) {
    const Dataset train = data.subset(plans[i].train_indices);
    SelectorSettings local = settings;
    local.seed = derive_seed(settings.seed, i);
    local.threads = 1;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      try {
        const double sigma = select_bandwidth(methods[m], train, local).sigma;
        const KrrModel model = fit(train, sigma, settings.lambda);
        outcomes[i][m] = Outcome{sigma, model.predict(eval_grid)};
      } catch (const std::exception&) {
      }
    }
  });

  JackknifeReport report;
  report.grid = eval_grid;
  const auto points = static_cast<std::size_t>(eval_grid.rows());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    JackknifeMethodStats stats;
    stats.method = methods[m];
    std::vector<std::vector<double>> per_point(points);
    for (const auto& row : outcomes) {
      if (!row[m]) {
        ++stats.excluded;
        continue;
      }
      ++stats.replicates;
      stats.sigmas.push_back(row[m]->sigma);
      for (std::size_t g = 0; g < points; ++g) {
        per_point[g].push_back(row[m]->prediction(static_cast<Eigen::Index>(g)));
      }
    }
    const Summary sigma = summarize(stats.sigmas);
    stats.mean_sigma = sigma.mean;
    stats.sd_sigma = sigma.sd;
    for (const auto& values : per_point) {
      const Summary s = summarize(values);
      stats.mean_prediction.push_back(s.mean);
      stats.sd_prediction.push_back(s.sd);
    }
    report.methods.push_back(std::move(stats));
  }
  return report;
}

void write_jackknife_csv(std::ostream& out, const JackknifeReport& report) {
  out << "method,point";
  for (Eigen::Index j = 0; j < report.grid.cols(); ++j) out << ",x" << (j + 1);
  out << ",mean_prediction,sd_prediction,mean_sigma,sd_sigma,replicates,excluded\n";
  for (const auto& m : report.methods) {
    for (Eigen::Index g = 0; g < report.grid.rows(); ++g) {
      out << method_name(m.method) << ',' << g;
      for (Eigen::Index j = 0; j < report.grid.cols(); ++j) {
        out << ',' << format_double(report.grid(g, j));
      }
      const auto gi = static_cast<std::size_t>(g);
      out << ',' << format_double(m.mean_prediction[gi]) << ','
          << format_double(m.sd_prediction[gi]) << ',' << format_double(m.mean_sigma) << ','
          << format_double(m.sd_sigma) << ',' << m.replicates << ',' << m.excluded << '\n';
    }
  }
}

// ---- sweeps -------------------------------------------------------------

std::string_view axis_name(SweepAxis axis) { return axis == SweepAxis::SampleSize ? "n" : "lambda"; }

namespace {

struct TrainTest {
  Dataset train;
  Dataset test;
};

Index as_count(double value) {
  const double r = std::round(value);
  if (!(r >= 1.0) || std::abs(r - value) > 1e-9) {
    throw std::invalid_argument("sample-size axis values must be positive integers");
  }
  return static_cast<Index>(r);
}

TrainTest draw(const DataSource& source, Index n, SweepAxis axis, std::uint64_t seed) {
  if (const auto* synth = std::get_if<SyntheticSource>(&source)) {
    return {generate_synthetic(n, synth->noise_sd, derive_seed(seed, 1)),
            generate_synthetic(synth->test_size, synth->noise_sd, derive_seed(seed, 2))};
  }
  const auto& ds = std::get<DatasetSource>(source);
  const Index total = ds.data.n();
  Index test = 0;
  if (axis == SweepAxis::SampleSize) {
    test = static_cast<Index>(std::llround(ds.test_fraction * static_cast<double>(total)));
  } else {
    test = total > n ? total - n : 0;
  }
  const SplitPlan plan = make_random_split(total, n, test, seed);
  return {ds.data.subset(plan.train_indices), ds.data.subset(plan.test_indices)};
}

}  // namespace

SweepReport run_sweep(const DataSource& source, const SweepConfig& config) {
  if (config.axis_values.empty()) throw std::invalid_argument("run_sweep: no axis values");
  if (config.repeats < 2) throw std::invalid_argument("run_sweep: repeats must be >= 2");
  if (config.methods.empty()) throw std::invalid_argument("run_sweep: no methods");
  if (config.axis == SweepAxis::SampleSize) {
    for (double v : config.axis_values) as_count(v);
  }

  struct Outcome {
    double r2 = 0.0;
    double sigma = 0.0;
  };
  const std::size_t points = config.axis_values.size();
  const std::size_t repeats = config.repeats;
  const std::size_t n_methods = config.methods.size();
  std::vector<std::optional<Outcome>> outcomes(points * repeats * n_methods);

  parallel_for(points * repeats, config.threads, [&](std::size_t job) {
    const std::size_t k = job / repeats;
    const std::size_t r = job % repeats;
    const double value = config.axis_values[k];
    const std::uint64_t rep_seed = derive_seed(config.seed, r);
    const Index n = config.axis == SweepAxis::SampleSize ? as_count(value) : config.fixed_n;
    SelectorSettings settings = config.selector;
    settings.lambda = config.axis == SweepAxis::Lambda ? value : config.fixed_lambda;
    settings.seed = derive_seed(rep_seed, 3);
    settings.threads = 1;
    std::optional<TrainTest> split;
    try {
      split = draw(source, n, config.axis, rep_seed);
    } catch (const std::exception&) {
      return;
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      try {
        const double sigma = select_bandwidth(config.methods[m], split->train, settings).sigma;
        const KrrModel model = fit(split->train, sigma, settings.lambda);
        const double r2 = r_squared(split->test.response(), model.predict(split->test.features()));
        if (std::isfinite(r2)) outcomes[(job * n_methods) + m] = Outcome{r2, sigma};
      } catch (const std::exception&) {
      }
    }
  });

  SweepReport report;
  report.axis = config.axis;
  report.repeats = config.repeats;
  report.seed = config.seed;
  for (std::size_t k = 0; k < points; ++k) {
    SweepPoint point;
    point.axis_value = config.axis_values[k];
    for (std::size_t m = 0; m < n_methods; ++m) {
      SweepMethodStats stats;
      stats.method = config.methods[m];
      for (std::size_t r = 0; r < repeats; ++r) {
        const auto& o = outcomes[((k * repeats + r) * n_methods) + m];
        if (!o) {
          ++stats.failures;
          continue;
        }
        ++stats.successes;
        stats.r2_values.push_back(o->r2);
        stats.sigma_values.push_back(o->sigma);
      }
      stats.r2 = summarize(stats.r2_values);
      stats.sigma = summarize(stats.sigma_values);
      point.methods.push_back(std::move(stats));
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "axis,axis_value,method,mean_r2,p05_r2,p95_r2,mean_sigma,p05_sigma,p95_sigma,sd_sigma,"
         "successes,failures\n";
  for (const auto& point : report.points) {
    for (const auto& m : point.methods) {
      out << axis_name(report.axis) << ',' << format_double(point.axis_value) << ','
          << method_name(m.method) << ',' << format_double(m.r2.mean) << ','
          << format_double(m.r2.p05) << ',' << format_double(m.r2.p95) << ','
          << format_double(m.sigma.mean) << ',' << format_double(m.sigma.p05) << ','
          << format_double(m.sigma.p95) << ',' << format_double(m.sigma.sd) << ','
          << m.successes << ',' << m.failures << '\n';
    }
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("sweep CSV is empty");
  std::vector<SweepRow> rows;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    ++row_index;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 12) {
      throw InputError("sweep CSV row " + std::to_string(row_index) + ": expected 12 fields");
    }
    auto num = [&](std::size_t c) {
      try {
        return std::stod(f[c]);
      } catch (const std::exception&) {
        throw InputError("sweep CSV row " + std::to_string(row_index) + ", column " +
                         std::to_string(c + 1) + ": not a number");
      }
    };
    SweepRow r;
    r.axis = f[0];
    r.axis_value = num(1);
    r.method = f[2];
    r.mean_r2 = num(3);
    r.p05_r2 = num(4);
    r.p95_r2 = num(5);
    r.mean_sigma = num(6);
    r.p05_sigma = num(7);
    r.p95_sigma = num(8);
    r.sd_sigma = num(9);
    r.successes = static_cast<Index>(num(10));
    r.failures = static_cast<Index>(num(11));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace krrbw
