#pragma once

#include <string>
#include <vector>

namespace lq {

enum class FitModel { biexponential, exponential, double_gaussian };

const char* to_string(FitModel m);
FitModel parse_fit_model(const std::string& s);
int parameter_count(FitModel m);
std::vector<std::string> parameter_names(FitModel m);

// Model value at x for positive parameters in natural order:
//   biexponential   A, tau1, B, tau2
//   exponential     A3, x3
//   double_gaussian A1, C1, C2, B1, D1, D2
double evaluate(FitModel m, const std::vector<double>& params, double x);

inline constexpr int kFitStarts = 16;

struct FitResult {
  FitModel model = FitModel::exponential;
  std::vector<double> params;
  double ssr = 0.0;
  double r2 = 0.0;
  bool converged = false;
  bool degenerate = false;
  int best_start = -1;
  std::vector<std::vector<double>> start_params;  // initial guess per start
  std::vector<double> start_ssr;                  // final SSR per start (NaN if it failed)
  std::vector<double> residuals;                  // model - y at the data points
};

// Levenberg-Marquardt on log-parameters from 16 deterministic starts;
// returns the best. Throws ConfigError on invalid data and ConvergenceError
// if every start fails.
FitResult fit(FitModel model, const std::vector<double>& xs, const std::vector<double>& ys, int jobs = 1);

// Nested-model F-test of `simple` against `full`.
struct ModelComparison {
  double F = 0.0;
  double p_value = 1.0;
  bool extra_terms_justified = false;  // p < alpha
};

ModelComparison compare_models(const FitResult& simple, const FitResult& full, std::size_t n_points,
                               double alpha = 0.05);

std::string fit_report_json(const FitResult& r, const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace lq
