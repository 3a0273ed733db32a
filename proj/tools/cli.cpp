#include "cli.hpp"

#include "krrbw/bandwidth.hpp"
#include "krrbw/data.hpp"
#include "krrbw/error.hpp"
#include "krrbw/eval.hpp"
#include "krrbw/kernel.hpp"
#include "krrbw/krr.hpp"
#include "krrbw/rng.hpp"
#include "krrbw/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace krrbw::cli {

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string model;
  std::string eval;
  std::string method = "jacobian";
  std::string methods = "jacobian,silverman,cv,seeded-cv";
  std::string claim = "all";
  std::string axis = "n";
  std::string values;
  double lambda = 1e-3;
  std::size_t folds = 10;
  std::size_t grid_size = 100;
  double grid_min = 0.01;
  std::optional<double> grid_max;
  std::optional<double> sigma;
  std::uint64_t seed = 0;
  std::size_t repeats = 100;
  std::size_t threads = 1;
  double noise_sd = 0.1;
  std::size_t n = 40;
  std::size_t p = 1;
  double l_max = 1.0;
  double delta = 0.5;
  std::size_t trials = 100;
  std::size_t test_size = 1000;
  double test_fraction = 0.15;
  std::size_t grid_points = 0;
  double holdout = 0.0;
};

Dataset read_dataset(const std::string& path) { return load_csv(path, csv_has_header(path)); }

// Runs `write` against the output file, or `fallback` when no path is set.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError("cannot write '" + path + "'");
  write(file);
}

Method method_or_throw(const std::string& text) {
  const auto m = parse_method(text);
  if (!m) throw InputError("unknown method '" + text + "'");
  return *m;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<Method> method_list(const std::string& text) {
  std::vector<Method> out;
  for (const auto& item : split_list(text)) out.push_back(method_or_throw(item));
  if (out.empty()) throw InputError("no methods given");
  return out;
}

std::vector<double> value_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--values: '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw InputError("--values is empty");
  return out;
}

SelectorSettings selector_settings(const Options& o) {
  SelectorSettings s;
  s.lambda = o.lambda;
  s.folds = o.folds;
  s.grid_size = o.grid_size;
  s.grid_min = o.grid_min;
  s.grid_max = o.grid_max;
  s.seed = o.seed;
  s.threads = o.threads;
  return s;
}

void print_selection(std::ostream& out, const BandwidthResult& r) {
  out << "method=" << method_name(r.method) << '\n';
  out << "sigma=" << format_double(r.sigma) << '\n';
  if (r.regime) out << "regime=" << regime_name(*r.regime) << '\n';
  if (r.method == Method::Jacobian) out << "clamped=" << (r.clamped ? "true" : "false") << '\n';
  if (r.j2a_at_sigma) out << "j2a=" << format_double(*r.j2a_at_sigma) << '\n';
  if (!r.cv_curve.empty()) {
    std::size_t failed = 0;
    for (const auto& p : r.cv_curve) failed += p.failed_folds > 0 ? 1 : 0;
    out << "grid_points=" << r.cv_curve.size() << '\n';
    out << "grid_points_with_failed_folds=" << failed << '\n';
  }
}

void write_cv_curve(std::ostream& out, const BandwidthResult& r) {
  out << "sigma,loss,failed_folds\n";
  for (const auto& p : r.cv_curve) {
    out << format_double(p.sigma) << ',' << format_double(p.loss) << ',' << p.failed_folds << '\n';
  }
}

int cmd_synth(const Options& o, std::ostream& out) {
  const Dataset d = generate_synthetic(o.n, o.noise_sd, o.seed);
  emit(o.output, out, [&](std::ostream& s) { write_csv(s, d); });
  return kOk;
}

int cmd_select(const Options& o, std::ostream& out) {
  const Dataset d = read_dataset(o.input);
  const BandwidthResult r = select_bandwidth(method_or_throw(o.method), d, selector_settings(o));
  print_selection(out, r);
  if (!o.output.empty() && !r.cv_curve.empty()) {
    emit(o.output, out, [&](std::ostream& s) { write_cv_curve(s, r); });
  }
  return kOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  if (o.output.empty()) throw InputError("fit: --output (model file) is required");
  const Dataset d = read_dataset(o.input);
  double sigma = 0.0;
  if (o.sigma) {
    sigma = *o.sigma;
  } else {
    const BandwidthResult r = select_bandwidth(method_or_throw(o.method), d, selector_settings(o));
    print_selection(out, r);
    sigma = r.sigma;
  }
  const KrrModel model = fit(d, sigma, o.lambda);
  emit(o.output, out, [&](std::ostream& s) { write_model(s, model); });
  return kOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  if (o.model.empty()) throw InputError("predict: --model is required");
  const KrrModel model = load_model(o.model);
  const Matrix x = load_matrix_csv(o.input, csv_has_header(o.input));
  if (x.cols() != static_cast<Eigen::Index>(model.p())) {
    throw InputError("predict: input has " + std::to_string(x.cols()) + " columns, model expects " +
                     std::to_string(model.p()));
  }
  const Vector y = model.predict(x);
  emit(o.output, out, [&](std::ostream& s) {
    s << "prediction\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) s << format_double(y(i)) << '\n';
  });
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  SweepConfig config;
  if (o.axis == "n") {
    config.axis = SweepAxis::SampleSize;
  } else if (o.axis == "lambda") {
    config.axis = SweepAxis::Lambda;
  } else {
    throw InputError("--axis must be 'n' or 'lambda'");
  }
  config.axis_values = value_list(o.values);
  config.fixed_lambda = o.lambda;
  config.fixed_n = o.n;
  config.repeats = o.repeats;
  config.methods = method_list(o.methods);
  config.selector = selector_settings(o);
  config.seed = o.seed;
  config.threads = o.threads;
  DataSource source = SyntheticSource{o.noise_sd, o.test_size};
  if (!o.input.empty()) source = DatasetSource{read_dataset(o.input), o.test_fraction};
  const SweepReport report = run_sweep(source, config);
  emit(o.output, out, [&](std::ostream& s) { write_sweep_csv(s, report); });
  return kOk;
}

int cmd_jackknife(const Options& o, std::ostream& out) {
  Dataset d = read_dataset(o.input);
  std::optional<Matrix> reference;
  if (o.holdout > 0.0) {
    if (o.holdout >= 1.0) throw InputError("--holdout must lie in [0, 1)");
    const auto hold = static_cast<Index>(std::llround(o.holdout * static_cast<double>(d.n())));
    const SplitPlan plan = make_random_split(d.n(), d.n() - hold, hold, o.seed);
    reference = d.subset(plan.test_indices).features();
    d = d.subset(plan.train_indices);
  }
  Matrix grid;
  if (!o.eval.empty()) {
    grid = load_matrix_csv(o.eval, csv_has_header(o.eval));
  } else if (o.grid_points > 0) {
    if (d.p() != 1) throw InputError("--grid-points needs one-dimensional features");
    const double lo = d.features().minCoeff();
    const double hi = d.features().maxCoeff();
    grid.resize(static_cast<Eigen::Index>(o.grid_points), 1);
    for (std::size_t i = 0; i < o.grid_points; ++i) {
      const double t = o.grid_points == 1 ? 0.5 : static_cast<double>(i) / (o.grid_points - 1.0);
      grid(static_cast<Eigen::Index>(i), 0) = lo + t * (hi - lo);
    }
  } else {
    grid = reference ? *reference : d.features();
  }
  const JackknifeReport report = run_jackknife(d, method_list(o.methods), grid, selector_settings(o));
  emit(o.output, out, [&](std::ostream& s) { write_jackknife_csv(s, report); });
  return kOk;
}

Matrix verify_points(const Options& o) {
  if (!o.input.empty()) return read_dataset(o.input).features();
  Matrix x(static_cast<Eigen::Index>(o.n), static_cast<Eigen::Index>(o.p));
  if (o.p == 1) {
    for (std::size_t i = 0; i < o.n; ++i) {
      x(static_cast<Eigen::Index>(i), 0) =
          o.n == 1 ? 0.0 : o.l_max * static_cast<double>(i) / (o.n - 1.0);
    }
  } else {
    Rng rng(o.seed);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(0.0, o.l_max);
    }
  }
  return x;
}

int cmd_verify(const Options& o, std::ostream& out) {
  static const std::vector<std::string> kAll{"prop1", "prop2", "prop3", "prop4", "bermanis"};
  std::vector<std::string> claims = o.claim == "all" ? kAll : split_list(o.claim);
  std::vector<BoundReport> reports;
  for (const auto& claim : claims) {
    if (claim == "prop1") {
      double l_max = o.l_max;
      Index n = o.n;
      Index p = o.p;
      if (!o.input.empty()) {
        const Matrix x = verify_points(o);
        l_max = max_pairwise_distance(x);
        n = static_cast<Index>(x.rows());
        p = static_cast<Index>(x.cols());
      }
      reports.push_back(check_prop1_regimes(JacobianParams(n, p, l_max, o.lambda)));
    } else if (claim == "prop2") {
      Dataset d = o.input.empty() ? generate_synthetic(o.n, o.noise_sd, o.seed) : read_dataset(o.input);
      const double sigma = o.sigma ? *o.sigma : select_jacobian(d.features(), o.lambda).sigma;
      Prop2Options opt;
      opt.trials = o.trials;
      opt.seed = o.seed;
      opt.threads = o.threads;
      reports.push_back(check_prop2_chain(d, sigma, o.lambda, opt));
    } else if (claim == "prop3") {
      reports.push_back(check_prop3(o.sigma.value_or(1.0)));
    } else if (claim == "prop4" || claim == "bermanis") {
      const Matrix x = verify_points(o);
      double sigma = 0.0;
      if (o.sigma) {
        sigma = *o.sigma;
      } else {
        sigma = select_jacobian(x, o.lambda).sigma;
      }
      reports.push_back(claim == "prop4" ? check_prop4(x, sigma, o.lambda)
                                         : check_bermanis_count(x, sigma, o.delta));
    } else {
      throw InputError("unknown claim '" + claim + "'");
    }
  }
  bool all_pass = true;
  for (const auto& r : reports) {
    all_pass = all_pass && r.passed();
    out << (r.passed() ? "PASS" : "FAIL") << " claim=" << claim_name(r.claim)
        << " trials=" << r.trials << " violations=" << r.violations
        << " worst_margin=" << format_double(r.worst_margin) << " seed=" << r.seed << " ["
        << r.config << "]\n";
  }
  if (!o.output.empty()) emit(o.output, out, [&](std::ostream& s) { write_reports_csv(s, reports); });
  return all_pass ? kOk : kCheckFailed;
}

int cmd_plot(const Options& o, std::ostream& out) {
  std::ifstream in(o.input);
  if (!in) throw InputError("cannot open '" + o.input + "'");
  std::ostringstream svg;
  plot_sweep_svg(in, svg);
  emit(o.output, out, [&](std::ostream& s) { s << svg.str(); });
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian kernel ridge regression with Jacobian-control bandwidth selection",
               "krrbw"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Options o;

  auto add_input = [&](CLI::App* c, bool required, const std::string& what) {
    auto* opt = c->add_option("--input", o.input, what);
    if (required) opt->required()->check(CLI::ExistingFile);
  };
  auto add_output = [&](CLI::App* c, const std::string& what) {
    c->add_option("--output", o.output, what);
  };
  auto add_selector = [&](CLI::App* c) {
    c->add_option("--lambda", o.lambda, "Regularization strength")->capture_default_str();
    c->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
    c->add_option("--grid-size", o.grid_size, "Cross-validation grid size")->capture_default_str();
    c->add_option("--grid-min", o.grid_min, "Smallest CV bandwidth")->capture_default_str();
    c->add_option("--grid-max", o.grid_max, "Largest CV bandwidth (default: l_max of the data)");
    c->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    c->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  };
  const std::string method_help = "Bandwidth selector: jacobian|silverman|cv|seeded-cv";
  const std::string methods_help = "Comma-separated selectors from jacobian|silverman|cv|seeded-cv";

  auto* synth = app.add_subcommand("synth", "Generate x ~ U[-5,5], y = sin(2 pi x) + noise");
  synth->add_option("--n", o.n, "Number of observations")->capture_default_str();
  synth->add_option("--noise-sd", o.noise_sd, "Noise standard deviation")->capture_default_str();
  synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  add_output(synth, "Output CSV (default: stdout)");

  auto* select = app.add_subcommand("select", "Select a bandwidth for a training CSV");
  add_input(select, true, "Training CSV (last column is the response)");
  select->add_option("--method", o.method, method_help)->capture_default_str();
  add_selector(select);
  add_output(select, "CV curve CSV (CV methods only)");

  auto* fitc = app.add_subcommand("fit", "Select a bandwidth and fit a KRR model");
  add_input(fitc, true, "Training CSV (last column is the response)");
  fitc->add_option("--method", o.method, method_help)->capture_default_str();
  fitc->add_option("--sigma", o.sigma, "Use this bandwidth instead of a selector");
  add_selector(fitc);
  add_output(fitc, "Model file");

  auto* predictc = app.add_subcommand("predict", "Predict with a saved model");
  predictc->add_option("--model", o.model, "Model file written by fit")->required()->check(
      CLI::ExistingFile);
  add_input(predictc, true, "Feature CSV with the model's column count");
  add_output(predictc, "Prediction CSV (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Repeated-split sweep over n or lambda");
  add_input(sweep, false, "Dataset CSV (default: synthetic draws)");
  sweep->add_option("--axis", o.axis, "Swept quantity: n|lambda")->capture_default_str();
  sweep->add_option("--values", o.values, "Comma-separated axis values")->required();
  sweep->add_option("--method", o.methods, methods_help)->capture_default_str();
  sweep->add_option("--n", o.n, "Training size when sweeping lambda")->capture_default_str();
  sweep->add_option("--repeats", o.repeats, "Repeats per axis value")->capture_default_str();
  sweep->add_option("--noise-sd", o.noise_sd, "Synthetic noise sd")->capture_default_str();
  sweep->add_option("--test-size", o.test_size, "Synthetic test rows")->capture_default_str();
  sweep->add_option("--test-fraction", o.test_fraction, "Dataset test fraction for n sweeps")
      ->capture_default_str();
  add_selector(sweep);
  add_output(sweep, "Sweep CSV (default: stdout)");

  auto* jack = app.add_subcommand("jackknife", "Leave-one-out prediction and bandwidth statistics");
  add_input(jack, true, "Dataset CSV");
  jack->add_option("--method", o.methods, methods_help)->capture_default_str();
  jack->add_option("--eval", o.eval, "Evaluation points CSV (features only)");
  jack->add_option("--grid-points", o.grid_points, "Evenly spaced evaluation points (p = 1)")
      ->capture_default_str();
  jack->add_option("--holdout", o.holdout, "Fraction set aside as reference points")
      ->capture_default_str();
  add_selector(jack);
  add_output(jack, "Jackknife CSV (default: stdout)");

  auto* verify = app.add_subcommand("verify", "Numerically check the bounds behind the selector");
  verify->add_option("--claim", o.claim, "prop1|prop2|prop3|prop4|bermanis|all (comma list)")
      ->capture_default_str();
  add_input(verify, false, "Dataset CSV (default: generated points)");
  verify->add_option("--n", o.n, "Number of points")->capture_default_str();
  verify->add_option("--p", o.p, "Feature dimension")->capture_default_str();
  verify->add_option("--l-max", o.l_max, "Extent of generated points")->capture_default_str();
  verify->add_option("--lambda", o.lambda, "Regularization strength")->capture_default_str();
  verify->add_option("--sigma", o.sigma, "Bandwidth (default: Jacobian sigma_0)");
  verify->add_option("--delta", o.delta, "Singular value ratio for the counting bound")
      ->capture_default_str();
  verify->add_option("--trials", o.trials, "Random probes for prop2")->capture_default_str();
  verify->add_option("--noise-sd", o.noise_sd, "Synthetic noise sd for prop2")->capture_default_str();
  verify->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  verify->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  add_output(verify, "Report CSV");

  auto* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  add_input(plot, true, "Sweep CSV");
  add_output(plot, "SVG file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
      out << '\n' << sub->help();
    }
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (o.threads < 1) throw InputError("--threads must be >= 1");
    if (*synth) return cmd_synth(o, out);
    if (*select) return cmd_select(o, out);
    if (*fitc) return cmd_fit(o, out);
    if (*predictc) return cmd_predict(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*jack) return cmd_jackknife(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*plot) return cmd_plot(o, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ComputeError& e) {
    err << "computation error: " << e.what() << '\n';
    return kComputeError;
  } catch (const std::domain_error& e) {
    err << "computation error: " << e.what() << '\n';
    return kComputeError;
  }
  err << "error: no subcommand\n";
  return kInputError;
}

}  // namespace krrbw::cli
