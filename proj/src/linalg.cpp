#include "lq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lq/error.hpp"

namespace lq {

Eigenpairs dense_lowest(const Eigen::MatrixXd& a, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  Eigenpairs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    const double r = (a * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

namespace {

// Orthogonalize w against the first n columns of v (two passes of classical
// Gram-Schmidt) and return the remaining norm.
double orthogonalize(const Eigen::MatrixXd& v, Eigen::Index n, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (n == 0) break;
    const Eigen::VectorXd c = v.leftCols(n).transpose() * w;
    w.noalias() -= v.leftCols(n) * c;
  }
  return w.norm();
}

}  // namespace

Eigenpairs lanczos_lowest(const RealOperator& op, std::size_t dim_u, int k, const EigenOptions& opt) {
  const auto dim = static_cast<Eigen::Index>(dim_u);
  if (k < 1 || k >= dim) throw ConfigError("requested eigenpair count must satisfy 1 <= K < dimension");
  const Eigen::Index maxb = std::min<Eigen::Index>(dim, opt.basis_size > 0 ? opt.basis_size : std::max(2 * k + 40, 100));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    Eigen::VectorXd r(dim);
    for (Eigen::Index i = 0; i < dim; ++i) r(i) = normal(rng);
    return r;
  };

  Eigen::MatrixXd v(dim, maxb), av(dim, maxb);
  Eigen::Index nb = 0;
  Eigen::VectorXd next = random_vector();
  next.normalize();
  Eigen::VectorXd w(dim);

  Eigenpairs out;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    // expand
    while (nb < maxb) {
      v.col(nb) = next;
      op(next, w);
      av.col(nb) = w;
      ++nb;
      if (nb == maxb) break;
      double nrm = orthogonalize(v, nb, w);
      if (nrm < 1e-10 * std::max(1.0, std::abs(next.dot(av.col(nb - 1))))) {
        // invariant subspace; continue with a fresh direction
        w = random_vector();
        nrm = orthogonalize(v, nb, w);
        if (nrm < 1e-12) break;
      }
      next = w / nrm;
    }

    // Rayleigh-Ritz
    Eigen::MatrixXd t = v.leftCols(nb).transpose() * av.leftCols(nb);
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz eigensolve failed");
    const Eigen::Index keep = std::min<Eigen::Index>(nb, std::min<Eigen::Index>(maxb - 1, k + std::max(k, 10)));
    const Eigen::MatrixXd s = es.eigenvectors().leftCols(keep);
    Eigen::MatrixXd x = v.leftCols(nb) * s;
    Eigen::MatrixXd ax = av.leftCols(nb) * s;

    double worst = 0.0;
    int first_bad = -1;
    for (int i = 0; i < k; ++i) {
      const double r = (ax.col(i) - es.eigenvalues()(i) * x.col(i)).norm();
      if (r > worst) worst = r;
      if (r >= opt.tol && first_bad < 0) first_bad = i;
    }
    if (first_bad < 0 || nb >= dim) {
      out.values = es.eigenvalues().head(k);
      out.vectors = x.leftCols(k);
      out.max_residual = worst;
      if (worst >= opt.tol && nb < dim) break;
      return out;
    }

    // thick restart: keep Ritz vectors plus the residual direction
    Eigen::VectorXd res = ax.col(first_bad) - es.eigenvalues()(first_bad) * x.col(first_bad);
    v.leftCols(keep) = x;
    av.leftCols(keep) = ax;
    nb = keep;
    double nrm = orthogonalize(v, nb, res);
    if (nrm < 1e-14) {
      res = random_vector();
      nrm = orthogonalize(v, nb, res);
    }
    next = res / nrm;
  }
  throw ConvergenceError("Lanczos did not converge: residual above tolerance after restarts");
}

Eigenpairs lowest_eigenpairs(const HamiltonianPair& h, double g, int k, const EigenOptions& opt) {
  if (k < 1 || static_cast<std::size_t>(k) >= h.dimension()) {
    throw ConfigError("requested eigenpair count must satisfy 1 <= K < dimension");
  }
  Eigenpairs out;
  if (h.dimension() < opt.dense_threshold) {
    out = dense_lowest(h.dense(g), k);
  } else {
    RealOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.apply(g, x, y); };
    out = lanczos_lowest(op, h.dimension(), k, opt);
  }
  // fixed sign convention: largest component positive
  for (int i = 0; i < k; ++i) {
    Eigen::Index imax = 0;
    out.vectors.col(i).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, i) < 0) out.vectors.col(i) *= -1.0;
  }
  if (!(out.max_residual < opt.tol)) {
    throw ConvergenceError("eigenpair residual " + std::to_string(out.max_residual) + " above tolerance");
  }
  return out;
}

namespace {

using ComplexOperator = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

// One attempt at exp(-i A dt) psi. Returns false when max_dim is reached
// without meeting the error estimate.
bool krylov_attempt(const ComplexOperator& op, double dt, Eigen::VectorXcd& psi, const KrylovOptions& opt) {
  const Eigen::Index n = psi.size();
  const double beta0 = psi.norm();
  if (beta0 == 0.0) return true;
  const int mmax = static_cast<int>(std::min<Eigen::Index>(opt.max_dim, n));
  Eigen::MatrixXcd v(n, mmax);
  std::vector<double> alpha, beta;
  v.col(0) = psi / beta0;
  Eigen::VectorXcd w(n);
  Eigen::VectorXcd coeff;

  for (int j = 0; j < mmax; ++j) {
    op(v.col(j), w);
    const double a = v.col(j).dot(w).real();
    alpha.push_back(a);
    w -= a * v.col(j);
    if (j > 0) w -= beta[j - 1] * v.col(j - 1);
    // full reorthogonalization
    const Eigen::VectorXcd c = v.leftCols(j + 1).adjoint() * w;
    w.noalias() -= v.leftCols(j + 1) * c;
    const double b = w.norm();

    const int m = j + 1;
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    const Eigen::MatrixXd& s = es.eigenvectors();
    Eigen::VectorXcd phase(m);
    for (int i = 0; i < m; ++i) phase(i) = std::polar(1.0, -es.eigenvalues()(i) * dt) * s(0, i);
    coeff = s.cast<std::complex<double>>() * phase;

    const bool breakdown = b < 1e-13 * std::max(1.0, std::abs(a));
    const double err = b * std::abs(coeff(m - 1));
    if (breakdown || (m >= 3 && err < opt.tol) || m == n) {
      psi = beta0 * (v.leftCols(m) * coeff);
      return true;
    }
    if (m == mmax) return false;
    beta.push_back(b);
    v.col(j + 1) = w / b;
  }
  return false;
}

int propagate_adaptive(const ComplexOperator& op, double dt, Eigen::VectorXcd& psi, const KrylovOptions& opt) {
  if (dt == 0.0) return 0;
  Eigen::VectorXcd trial = psi;
  if (krylov_attempt(op, dt, trial, opt)) {
    psi = std::move(trial);
    return 1;
  }
  if (std::abs(dt) / 2 < opt.min_step) {
    throw NumericalError("Krylov step-size underflow");
  }
  int steps = propagate_adaptive(op, dt / 2, psi, opt);
  steps += propagate_adaptive(op, dt / 2, psi, opt);
  return steps;
}

}  // namespace

int krylov_propagate(const HamiltonianPair& h, double g, double dt, Eigen::VectorXcd& psi,
                     const KrylovOptions& opt) {
  ComplexOperator op = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { h.apply(g, x, y); };
  return propagate_adaptive(op, dt, psi, opt);
}

int krylov_propagate(const ComplexOperator& op, double dt, Eigen::VectorXcd& psi, const KrylovOptions& opt) {
  return propagate_adaptive(op, dt, psi, opt);
}

}  // namespace lq
