#include "lq/fits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <nlohmann/json.hpp>

#include "lq/error.hpp"

namespace lq {

const char* to_string(FitModel m) {
  switch (m) {
    case FitModel::biexponential: return "biexponential";
    case FitModel::exponential: return "exponential";
    case FitModel::double_gaussian: return "double_gaussian";
  }
  return "?";
}

FitModel parse_fit_model(const std::string& s) {
  for (FitModel m : {FitModel::biexponential, FitModel::exponential, FitModel::double_gaussian})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown fit model: " + s + " (valid: biexponential, exponential, double_gaussian)");
}

int parameter_count(FitModel m) {
  switch (m) {
    case FitModel::biexponential: return 4;
    case FitModel::exponential: return 2;
    case FitModel::double_gaussian: return 6;
  }
  return 0;
}

std::vector<std::string> parameter_names(FitModel m) {
  switch (m) {
    case FitModel::biexponential: return {"A", "tau1", "B", "tau2"};
    case FitModel::exponential: return {"A3", "x3"};
    case FitModel::double_gaussian: return {"A1", "C1", "C2", "B1", "D1", "D2"};
  }
  return {};
}

double evaluate(FitModel m, const std::vector<double>& p, double x) {
  switch (m) {
    case FitModel::biexponential: return p[0] * std::exp(-x / p[1]) + p[2] * std::exp(-x / p[3]);
    case FitModel::exponential: return p[0] * std::exp(-x / p[1]);
    case FitModel::double_gaussian: {
      const double u = (x - p[1]) / p[2], v = (x - p[4]) / p[5];
      return p[0] * std::exp(-u * u) + p[3] * std::exp(-v * v);
    }
  }
  return 0.0;
}

namespace {

struct Data {
  FitModel model;
  const std::vector<double>& x;
  const std::vector<double>& y;
};

Eigen::VectorXd residual(const Data& d, const Eigen::VectorXd& q) {
  std::vector<double> p(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) p[i] = std::exp(q(i));
  Eigen::VectorXd r(d.x.size());
  for (std::size_t k = 0; k < d.x.size(); ++k) r(k) = evaluate(d.model, p, d.x[k]) - d.y[k];
  return r;
}

Eigen::MatrixXd jacobian(const Data& d, const Eigen::VectorXd& q) {
  Eigen::MatrixXd J(d.x.size(), q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double h = 1e-6;
    Eigen::VectorXd qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    J.col(i) = (residual(d, qp) - residual(d, qm)) / (2 * h);
  }
  return J;
}

struct LmOutcome {
  Eigen::VectorXd q;
  double ssr = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

LmOutcome levenberg_marquardt(const Data& d, Eigen::VectorXd q) {
  LmOutcome out;
  Eigen::VectorXd r = residual(d, q);
  double ssr = r.squaredNorm();
  if (!std::isfinite(ssr)) return out;
  double lambda = 1e-3;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::MatrixXd J = jacobian(d, q);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd grad = J.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, ssr)) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(-grad);
      Eigen::VectorXd qn = q + step;
      if (qn.cwiseAbs().maxCoeff() > 700) {
        lambda *= 10;
        continue;
      }
      const Eigen::VectorXd rn = residual(d, qn);
      const double sn = rn.squaredNorm();
      if (std::isfinite(sn) && sn <= ssr) {
        const double rel = (ssr - sn) / std::max(ssr, 1e-300);
        const double step_norm = step.norm();
        q = qn;
        r = rn;
        ssr = sn;
        lambda = std::max(lambda / 10, 1e-12);
        accepted = true;
        if (rel < 1e-15 || step_norm < 1e-12 * (1.0 + q.norm())) out.converged = true;
        break;
      }
      lambda *= 10;
    }
    if (!accepted) {
      // no descent direction left: local minimum to working precision
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  out.q = q;
  out.ssr = ssr;
  return out;
}

// Nonnegative amplitudes for fixed shape parameters: least squares, clamped.
std::vector<double> linear_amplitudes(const std::vector<std::vector<double>>& basis, const std::vector<double>& y) {
  const std::size_t n = y.size(), m = basis.size();
  Eigen::MatrixXd B(n, m);
  Eigen::VectorXd Y(n);
  for (std::size_t k = 0; k < n; ++k) {
    Y(k) = y[k];
    for (std::size_t j = 0; j < m; ++j) B(k, j) = basis[j][k];
  }
  Eigen::VectorXd a = B.colPivHouseholderQr().solve(Y);
  const double scale = std::max(1e-12, Y.cwiseAbs().maxCoeff());
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = std::isfinite(a(j)) && a(j) > 1e-3 * scale ? a(j) : 1e-2 * scale;
  return out;
}

std::vector<std::vector<double>> initial_guesses(FitModel model, const std::vector<double>& x,
                                                 const std::vector<double>& y) {
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double span = std::max(*mx - *mn, 1e-12);
  std::vector<std::vector<double>> starts;
  auto decay = [&](double s) {
    std::vector<double> v(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) v[k] = std::exp(-x[k] / s);
    return v;
  };
  switch (model) {
    case FitModel::exponential:
      for (int i = 0; i < kFitStarts; ++i) {
        const double s = span * std::pow(10.0, -3.0 + 4.5 * i / (kFitStarts - 1));
        starts.push_back({linear_amplitudes({decay(s)}, y)[0], s});
      }
      break;
    case FitModel::biexponential:
      for (double f1 : {1e-3, 1e-2, 1e-1, 1.0})
        for (double ratio : {3.0, 10.0, 30.0, 100.0}) {
          const double s1 = span * f1, s2 = s1 * ratio;
          const auto a = linear_amplitudes({decay(s1), decay(s2)}, y);
          starts.push_back({a[0], s1, a[1], s2});
        }
      break;
    case FitModel::double_gaussian: {
      const double q[4][2] = {{0.2, 0.6}, {0.3, 0.8}, {0.1, 0.5}, {0.4, 0.9}};
      for (const auto& c : q)
        for (double w : {0.05, 0.1, 0.2, 0.4}) {
          const double c1 = *mn + c[0] * span, d1 = *mn + c[1] * span, width = w * span;
          auto bump = [&](double c0) {
            std::vector<double> v(x.size());
            for (std::size_t k = 0; k < x.size(); ++k) v[k] = std::exp(-std::pow((x[k] - c0) / width, 2));
            return v;
          };
          const auto a = linear_amplitudes({bump(c1), bump(d1)}, y);
          starts.push_back({a[0], std::max(c1, 1e-6 * span), width, a[1], std::max(d1, 1e-6 * span), width});
        }
      break;
    }
  }
  return starts;
}

void canonicalize(FitModel model, std::vector<double>& p) {
  if (model == FitModel::biexponential && p[1] > p[3]) {
    std::swap(p[0], p[2]);
    std::swap(p[1], p[3]);
  }
  if (model == FitModel::double_gaussian && p[1] > p[4]) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[4]);
    std::swap(p[2], p[5]);
  }
}

}  // namespace

FitResult fit(FitModel model, const std::vector<double>& xs, const std::vector<double>& ys, int jobs) {
  const int np = parameter_count(model);
  if (xs.size() != ys.size()) throw ConfigError("fit: xs and ys differ in length");
  if (xs.size() < static_cast<std::size_t>(2 * np)) {
    throw ConfigError("fit: need at least " + std::to_string(2 * np) + " points for " + to_string(model));
  }
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (!std::isfinite(xs[k]) || !std::isfinite(ys[k])) throw ConfigError("fit: non-finite data");
    if (ys[k] < 0) throw ConfigError("fit: ys must be nonnegative");
  }
  // canonical ordering makes the result independent of input order
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] != xs[b] ? xs[a] < xs[b] : ys[a] < ys[b]; });
  std::vector<double> x(xs.size()), y(ys.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    x[k] = xs[order[k]];
    y[k] = ys[order[k]];
  }

  FitResult res;
  res.model = model;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - ybar) * (v - ybar);

  auto finish = [&](FitResult& r) {
    r.residuals.clear();
    for (std::size_t k = 0; k < xs.size(); ++k) r.residuals.push_back(evaluate(model, r.params, xs[k]) - ys[k]);
    r.ssr = 0.0;
    for (double e : r.residuals) r.ssr += e * e;
    r.r2 = sst > 0 ? 1.0 - r.ssr / sst : 1.0;
  };

  if (sst <= 1e-30 * std::max(1.0, ybar * ybar) * static_cast<double>(y.size())) {
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    const double huge = 1e12 * std::max(1.0, *mx - *mn);
    res.degenerate = true;
    res.converged = true;
    switch (model) {
      case FitModel::exponential: res.params = {ybar, huge}; break;
      case FitModel::biexponential: res.params = {0.0, 1.0, ybar, huge}; break;
      case FitModel::double_gaussian: res.params = {ybar, 0.5 * (*mn + *mx), huge, 0.0, 0.5 * (*mn + *mx), 1.0}; break;
    }
    finish(res);
    return res;
  }

  res.start_params = initial_guesses(model, x, y);
  const std::size_t ns = res.start_params.size();
  std::vector<LmOutcome> outcomes(ns);
  const Data d{model, x, y};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ns; i = next++) {
      Eigen::VectorXd q(np);
      for (int j = 0; j < np; ++j) q(j) = std::log(std::max(res.start_params[i][j], 1e-300));
      outcomes[i] = levenberg_marquardt(d, q);
    }
  };
  {
    const int nt = std::clamp(jobs, 1, static_cast<int>(ns));
    if (nt == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns; ++i) {
    res.start_ssr.push_back(outcomes[i].ssr);
    if (std::isfinite(outcomes[i].ssr) && outcomes[i].ssr < best) {
      best = outcomes[i].ssr;
      res.best_start = static_cast<int>(i);
    }
  }
  if (res.best_start < 0) throw ConvergenceError(std::string("fit: every start failed for ") + to_string(model));
  const auto& o = outcomes[res.best_start];
  res.converged = o.converged;
  res.params.resize(np);
  for (int j = 0; j < np; ++j) res.params[j] = std::exp(o.q(j));
  canonicalize(model, res.params);
  finish(res);
  return res;
}

ModelComparison compare_models(const FitResult& simple, const FitResult& full, std::size_t n_points, double alpha) {
  ModelComparison c;
  const int p1 = parameter_count(simple.model), p2 = parameter_count(full.model);
  if (p2 <= p1) throw ConfigError("compare_models: full model must have more parameters");
  if (n_points <= static_cast<std::size_t>(p2)) throw ConfigError("compare_models: too few points");
  const double dof2 = static_cast<double>(n_points - p2);
  if (full.ssr <= 0.0) {
    c.F = std::numeric_limits<double>::infinity();
    c.p_value = simple.ssr > 0.0 ? 0.0 : 1.0;
  } else {
    c.F = std::max(0.0, (simple.ssr - full.ssr) / (p2 - p1)) / (full.ssr / dof2);
    boost::math::fisher_f dist(p2 - p1, dof2);
    c.p_value = boost::math::cdf(boost::math::complement(dist, c.F));
  }
  c.extra_terms_justified = c.p_value < alpha;
  return c;
}

std::string fit_report_json(const FitResult& r, const std::vector<double>& xs, const std::vector<double>& ys) {
  nlohmann::json j;
  j["model"] = to_string(r.model);
  const auto names = parameter_names(r.model);
  for (std::size_t i = 0; i < names.size(); ++i) j["parameters"][names[i]] = r.params[i];
  j["ssr"] = r.ssr;
  j["R2"] = r.r2;
  j["converged"] = r.converged;
  j["degenerate"] = r.degenerate;
  j["best_start"] = r.best_start;
  j["x"] = xs;
  j["y"] = ys;
  j["residuals"] = r.residuals;
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t i = 0; i < r.start_params.size(); ++i) {
    nlohmann::json s;
    s["initial"] = r.start_params[i];
    const double ssr = i < r.start_ssr.size() ? r.start_ssr[i] : std::nan("");
    s["final_ssr"] = std::isfinite(ssr) ? nlohmann::json(ssr) : nlohmann::json(nullptr);
    seeds.push_back(s);
  }
  j["seeds"] = seeds;
  if (r.model == FitModel::biexponential && !r.degenerate) j["tau_ratio"] = r.params[3] / r.params[1];
  return j.dump(2);
}

}  // namespace lq
