// Command-line front end: fit, simulate, roc, cv, classify, predict-error.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 solver non-convergence.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cholband/apps.hpp"
#include "cholband/csv.hpp"
#include "cholband/estimator.hpp"
#include "cholband/modelselect.hpp"
#include "cholband/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cholband;

namespace {

struct Common {
  std::string output_dir = ".";
  std::string scheme = "quadratic";
  int threads = 1;
  std::uint64_t seed = 1;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 10000;
  bool center = false;

  WeightScheme weight_scheme() const {
    return scheme == "unit" ? WeightScheme::Unit : WeightScheme::Quadratic;
  }
  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.eps_abs = eps_abs;
    cfg.eps_rel = eps_rel;
    cfg.max_iter = max_iter;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_solver = true) {
  cmd->add_option("--output-dir", c.output_dir, "Directory for output files");
  cmd->add_option("--scheme", c.scheme, "Weight scheme")
      ->check(CLI::IsMember({"quadratic", "unit"}));
  cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--seed", c.seed, "Random seed");
  if (with_solver) {
    cmd->add_option("--eps-abs", c.eps_abs, "ADMM absolute tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--eps-rel", c.eps_rel, "ADMM relative tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", c.max_iter, "ADMM iteration cap")->check(CLI::PositiveNumber);
    cmd->add_flag("--center", c.center, "Subtract column means before fitting");
  }
}

fs::path prepare_dir(const std::string& dir) {
  fs::path out(dir);
  fs::create_directories(out);
  return out;
}

void write_cv_files(const fs::path& dir, const CVResult& cv) {
  {
    std::ofstream out(dir / "cv.csv");
    for (std::size_t i = 0; i < cv.lambdas.size(); ++i)
      out << format_double(cv.lambdas[i]) << ',' << format_double(cv.mean_score[i]) << ','
          << format_double(cv.se_score[i]) << '\n';
  }
  json sel{{"best_idx", cv.best_idx},
           {"one_se_idx", cv.one_se_idx},
           {"lambda_best", cv.lambdas[std::size_t(cv.best_idx)]},
           {"lambda_one_se", cv.lambdas[std::size_t(cv.one_se_idx)]}};
  std::ofstream(dir / "cv_selected.json") << sel.dump(2) << '\n';
}

int run_fit(const Common& c, const std::string& input, bool skip_header, double lambda,
            bool use_lambda_max) {
  const auto t0 = std::chrono::steady_clock::now();
  const SampleMatrix X = read_sample_csv(input, skip_header);
  const SolverConfig cfg = c.solver();
  const WeightScheme ws = c.weight_scheme();
  if (use_lambda_max) lambda = lambda_max(X, ws, cfg, c.threads, c.center);

  const FitResult f = fit(X, lambda, ws, cfg, c.threads, c.center);
  const SymMatrix O = omega(f);

  const fs::path dir = prepare_dir(c.output_dir);
  write_lower_triangular_csv(dir / "L_hat.csv", f.L_hat);
  write_sym_csv(dir / "omega_hat.csv", O);
  {
    std::ofstream out(dir / "bandwidths.csv");
    for (int k : f.bandwidths) out << k << '\n';
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json diag{{"n", X.rows()},
            {"p", X.cols()},
            {"lambda", f.lambda},
            {"scheme", c.scheme},
            {"threads", c.threads},
            {"converged_rows", f.converged_rows},
            {"kkt_max", f.kkt_max},
            {"iterations", f.total_iterations},
            {"wall_time_seconds", secs}};
  std::ofstream(dir / "diagnostics.json") << diag.dump(2) << '\n';

  if (f.converged_rows < X.cols()) {
    std::cerr << "fit: " << (X.cols() - f.converged_rows) << " row(s) hit the iteration cap\n";
    return 3;
  }
  return 0;
}

int run_simulate(const Common& c, int model, int p, int n) {
  SimulationSpec spec{Model(model), p, n, c.seed};
  const GroundTruth truth = make_truth(spec);
  const SampleMatrix X = sample_gaussian(truth.L, n, c.seed);

  const fs::path dir = prepare_dir(c.output_dir);
  write_lower_triangular_csv(dir / "L_true.csv", truth.L);
  {
    std::ofstream out(dir / "K_true.csv");
    for (int k : truth.bandwidth) out << k << '\n';
  }
  write_sample_csv(dir / "X.csv", X);
  return 0;
}

int run_roc(const Common& c, int model, int p, int n, int grid_count, double grid_ratio) {
  SimulationSpec spec{Model(model), p, n, c.seed};
  const GroundTruth truth = make_truth(spec);
  const SampleMatrix X = sample_gaussian(truth.L, n, c.seed);
  const SolverConfig cfg = c.solver();
  const WeightScheme ws = c.weight_scheme();
  const std::vector<double> grid = lambda_grid(X, ws, cfg, grid_count, grid_ratio, c.threads);
  const std::vector<RocPoint> roc = roc_curve(X, truth.L, grid, ws, cfg, c.threads);

  const fs::path dir = prepare_dir(c.output_dir);
  std::ofstream out(dir / "roc.csv");
  for (const RocPoint& pt : roc)
    out << format_double(pt.lambda) << ',' << format_double(pt.sensitivity) << ','
        << format_double(pt.specificity) << '\n';
  return 0;
}

int run_cv(const Common& c, const std::string& input, bool skip_header, int folds, int grid_count,
           double grid_ratio) {
  const SampleMatrix X = read_sample_csv(input, skip_header);
  const SolverConfig cfg = c.solver();
  const WeightScheme ws = c.weight_scheme();
  const std::vector<double> grid =
      lambda_grid(X, ws, cfg, grid_count, grid_ratio, c.threads, c.center);
  const CVResult cv = cross_validate(X, grid, folds, ws, cfg, c.seed, c.threads, c.center);
  write_cv_files(prepare_dir(c.output_dir), cv);
  return 0;
}

int run_classify(const Common& c, const std::string& train_path, const std::string& test_path,
                 bool skip_header, const std::string& mode_name, int folds, int grid_count,
                 double grid_ratio) {
  const LabeledData train = read_labeled_csv(train_path, skip_header);
  const LabeledData test = read_labeled_csv(test_path, skip_header);
  if (test.X.cols() != train.X.cols())
    throw std::invalid_argument("classify: train/test feature dimension mismatch");

  ClassifierOptions opt;
  opt.cv_folds = folds;
  opt.grid_count = grid_count;
  opt.grid_ratio = grid_ratio;
  opt.scheme = c.weight_scheme();
  opt.solver = c.solver();
  opt.seed = c.seed;
  opt.threads = c.threads;
  const ClassifierMode mode = mode_name == "qda" ? ClassifierMode::QDA : ClassifierMode::LDA;
  const ClassModel model = fit_classifier(train.X, train.labels, mode, opt);

  std::vector<int> labels;
  for (const auto& cls : model.classes) labels.push_back(cls.label);
  auto label_index = [&](int lab) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == lab) return int(i);
    return -1;
  };

  const int nc = int(labels.size());
  std::vector<long> confusion(std::size_t(nc) * nc, 0);
  long wrong = 0;
  for (int i = 0; i < test.X.rows(); ++i) {
    const int pred = classify(model, test.X.row(i));
    const int ti = label_index(test.labels[std::size_t(i)]);
    if (ti < 0) throw std::invalid_argument("classify: test label not seen in training data");
    confusion[std::size_t(ti) * nc + label_index(pred)] += 1;
    if (pred != test.labels[std::size_t(i)]) ++wrong;
  }

  const fs::path dir = prepare_dir(c.output_dir);
  {
    std::ofstream out(dir / "confusion.csv");
    for (int i = 0; i < nc; ++i) {
      for (int j = 0; j < nc; ++j) {
        if (j) out << ',';
        out << confusion[std::size_t(i) * nc + j];
      }
      out << '\n';
    }
  }
  json rep{{"error_rate", double(wrong) / double(test.X.rows())},
           {"n_test", test.X.rows()},
           {"mode", mode_name},
           {"labels", labels}};
  std::ofstream(dir / "classify_report.json") << rep.dump(2) << '\n';
  return 0;
}

int run_predict_error(const Common& c, const std::string& train_path, const std::string& test_path,
                      bool skip_header, double lambda, bool has_lambda, int grid_count,
                      double grid_ratio) {
  const SampleMatrix train = read_sample_csv(train_path, skip_header);
  const SampleMatrix test = read_sample_csv(test_path, skip_header);
  if (test.cols() != train.cols())
    throw std::invalid_argument("predict-error: train/test dimension mismatch");
  const SolverConfig cfg = c.solver();
  const WeightScheme ws = c.weight_scheme();

  std::vector<FitResult> fits;
  if (has_lambda) {
    fits.push_back(fit(train, lambda, ws, cfg, c.threads, c.center));
  } else {
    const std::vector<double> grid =
        lambda_grid(train, ws, cfg, grid_count, grid_ratio, c.threads, c.center);
    fits = fit_path(train, grid, ws, cfg, c.threads, c.center);
  }

  const fs::path dir = prepare_dir(c.output_dir);
  std::ofstream out(dir / "prederr.csv");
  for (const FitResult& f : fits) {
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < test.rows(); ++i) {
      const double e = prediction_error(f.L_hat, test.row(i));
      const double d = e - mean;
      mean += d / double(i + 1);
      m2 += d * (e - mean);
    }
    const double sd = test.rows() > 1 ? std::sqrt(m2 / double(test.rows() - 1)) : 0.0;
    out << format_double(f.lambda) << ',' << format_double(mean) << ',' << format_double(sd)
        << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptively banded inverse-Cholesky estimation of precision matrices"};
  app.require_subcommand(1);

  Common c_fit, c_sim, c_roc, c_cv, c_cls, c_pe;
  std::string input, test_path;
  bool skip_header = false;
  double lambda = 0.0;
  bool use_lambda_max = false;
  int model = 1, p = 10, n = 100;
  int grid_count = 100, folds = 5;
  double grid_ratio = 1e-3;
  std::string mode_name = "lda";

  auto* fit_cmd = app.add_subcommand("fit", "Fit L-hat and Omega-hat to a data matrix");
  fit_cmd->add_option("--input", input, "CSV data matrix (n x p)")->required();
  fit_cmd->add_flag("--header", skip_header, "Skip the first input line");
  auto* lam_opt = fit_cmd->add_option("--lambda", lambda, "Penalty level");
  auto* lmax_opt = fit_cmd->add_flag("--lambda-max", use_lambda_max,
                                     "Fit at the numerically determined lambda_max");
  lam_opt->excludes(lmax_opt);
  add_common(fit_cmd, c_fit);

  auto* sim_cmd = app.add_subcommand("simulate", "Generate ground truth and Gaussian samples");
  sim_cmd->add_option("--model", model, "Model 1-4")->required()->check(CLI::Range(1, 4));
  sim_cmd->add_option("--p", p, "Dimension")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n", n, "Sample count")->required()->check(CLI::PositiveNumber);
  add_common(sim_cmd, c_sim, false);

  auto* roc_cmd = app.add_subcommand("roc", "Support-recovery curve along a lambda path");
  roc_cmd->add_option("--model", model, "Model 1-4")->required()->check(CLI::Range(1, 4));
  roc_cmd->add_option("--p", p, "Dimension")->required()->check(CLI::PositiveNumber);
  roc_cmd->add_option("--n", n, "Sample count")->required()->check(CLI::PositiveNumber);
  roc_cmd->add_option("--grid-count", grid_count, "Grid size")->check(CLI::PositiveNumber);
  roc_cmd->add_option("--grid-ratio", grid_ratio, "Smallest/largest lambda ratio");
  add_common(roc_cmd, c_roc);

  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate the lambda path");
  cv_cmd->add_option("--input", input, "CSV data matrix")->required();
  cv_cmd->add_flag("--header", skip_header, "Skip the first input line");
  cv_cmd->add_option("--folds", folds, "Fold count")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--grid-count", grid_count, "Grid size")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--grid-ratio", grid_ratio, "Smallest/largest lambda ratio");
  add_common(cv_cmd, c_cv);

  auto* cls_cmd = app.add_subcommand("classify", "Discriminant analysis with estimated factors");
  cls_cmd->add_option("--input", input, "Labeled training CSV (last column = label)")->required();
  cls_cmd->add_option("--test", test_path, "Labeled test CSV")->required();
  cls_cmd->add_flag("--header", skip_header, "Skip the first line of each file");
  cls_cmd->add_option("--mode", mode_name, "lda or qda")->check(CLI::IsMember({"lda", "qda"}));
  cls_cmd->add_option("--folds", folds, "CV fold count")->check(CLI::PositiveNumber);
  cls_cmd->add_option("--grid-count", grid_count, "Grid size")->check(CLI::PositiveNumber);
  cls_cmd->add_option("--grid-ratio", grid_ratio, "Smallest/largest lambda ratio");
  add_common(cls_cmd, c_cls);

  auto* pe_cmd = app.add_subcommand("predict-error", "Held-out row-regression prediction error");
  pe_cmd->add_option("--input", input, "Training CSV")->required();
  pe_cmd->add_option("--test", test_path, "Held-out CSV")->required();
  pe_cmd->add_flag("--header", skip_header, "Skip the first line of each file");
  auto* pe_lam = pe_cmd->add_option("--lambda", lambda, "Single penalty level");
  pe_cmd->add_option("--grid-count", grid_count, "Grid size")->check(CLI::PositiveNumber);
  pe_cmd->add_option("--grid-ratio", grid_ratio, "Smallest/largest lambda ratio");
  add_common(pe_cmd, c_pe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_cmd->parsed()) {
      if (!use_lambda_max && lam_opt->count() == 0) {
        std::cerr << "fit: one of --lambda or --lambda-max is required\n";
        return 1;
      }
      return run_fit(c_fit, input, skip_header, lambda, use_lambda_max);
    }
    if (sim_cmd->parsed()) return run_simulate(c_sim, model, p, n);
    if (roc_cmd->parsed()) return run_roc(c_roc, model, p, n, grid_count, grid_ratio);
    if (cv_cmd->parsed()) return run_cv(c_cv, input, skip_header, folds, grid_count, grid_ratio);
    if (cls_cmd->parsed())
      return run_classify(c_cls, input, test_path, skip_header, mode_name, folds, grid_count,
                          grid_ratio);
    if (pe_cmd->parsed())
      return run_predict_error(c_pe, input, test_path, skip_header, lambda, pe_lam->count() > 0,
                               grid_count, grid_ratio);
  } catch (const CsvError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ProxError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const RowSolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    // row failures are wrapped with context; treat anything else as data error
    const std::string msg = e.what();
    std::cerr << (msg.find("row ") != std::string::npos ? "solver error: " : "error: ") << msg
              << '\n';
    return msg.find("row ") != std::string::npos ? 3 : 2;
  }
  return 0;
}
