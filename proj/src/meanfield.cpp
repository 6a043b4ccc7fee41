#include "lq/meanfield.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "lq/error.hpp"

namespace lq {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Orthonormal DST-I on n points (its own inverse).
class SineTransform {
 public:
  explicit SineTransform(int n) : n_(n), buf_(fftw_alloc_real(n)), scale_(std::sqrt(0.5 / (n + 1))) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_r2r_1d(n, buf_, buf_, FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan_) throw NumericalError("FFTW plan creation failed");
  }
  ~SineTransform() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  void apply(Eigen::VectorXd& v) {
    std::copy(v.data(), v.data() + n_, buf_);
    fftw_execute(plan_);
    for (int i = 0; i < n_; ++i) v(i) = scale_ * buf_[i];
  }

  void apply(Eigen::VectorXcd& v) {
    re_ = v.real();
    im_ = v.imag();
    apply(re_);
    apply(im_);
    v.real() = re_;
    v.imag() = im_;
  }

 private:
  int n_;
  double* buf_;
  double scale_;
  fftw_plan plan_ = nullptr;
  Eigen::VectorXd re_, im_;
};

Eigen::VectorXd potential(const Grid& grid, double V0) {
  Eigen::VectorXd v(grid.n_points);
  for (int a = 0; a < grid.n_points; ++a) {
    const double s = std::sin(grid.points[a]);
    v(a) = V0 * s * s;
  }
  return v;
}

Eigen::VectorXd kinetic_diag(const Grid& grid) {
  Eigen::VectorXd k2(grid.n_points);
  const double L = grid.box_length();
  for (int n = 1; n <= grid.n_points; ++n) {
    const double k = n * std::numbers::pi / L;
    k2(n - 1) = k * k;
  }
  return k2;
}

}  // namespace

MfState mf_ground_state(const Grid& grid, double V0, double g, int n_particles, const MfOptions& opt) {
  if (n_particles < 1) throw ConfigError("N must be >= 1");
  const Eigen::MatrixXd h0 = sp_hamiltonian(grid, V0);
  const double coupling = g * (n_particles - 1) / grid.dx;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0);
  Eigen::VectorXd c = es.eigenvectors().col(0);
  Eigen::VectorXd rho = c.cwiseAbs2();
  // Anderson mixing on the density; plain damping sloshes between wells.
  constexpr int kHistory = 6;
  constexpr double kBeta = 0.3;
  std::vector<Eigen::VectorXd> xs, rs;
  for (int it = 0; it < opt.scf_max_iter; ++it) {
    Eigen::MatrixXd h = h0;
    h.diagonal() += coupling * rho;
    es.compute(h);
    Eigen::VectorXd next = es.eigenvectors().col(0);
    if (next.sum() < 0) next = -next;
    Eigen::VectorXd hc = h0 * next;
    hc += coupling * next.cwiseAbs2().cwiseProduct(next);
    const double mu = next.dot(hc);
    const double res = (hc - mu * next).norm();
    c = next;
    if (res < opt.scf_tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
      MfState s;
      s.c = c.cast<std::complex<double>>();
      s.n_particles = n_particles;
      return s;
    }
    const Eigen::VectorXd r = next.cwiseAbs2() - rho;
    xs.push_back(rho);
    rs.push_back(r);
    if (static_cast<int>(xs.size()) > kHistory) {
      xs.erase(xs.begin());
      rs.erase(rs.begin());
    }
    Eigen::VectorXd step = kBeta * r;
    const int k = static_cast<int>(xs.size()) - 1;
    if (k > 0) {
      Eigen::MatrixXd dx(rho.size(), k), dr(rho.size(), k);
      for (int i = 0; i < k; ++i) {
        dx.col(i) = xs[i + 1] - xs[i];
        dr.col(i) = rs[i + 1] - rs[i];
      }
      const Eigen::VectorXd gamma = dr.completeOrthogonalDecomposition().solve(r);
      step -= (dx + kBeta * dr) * gamma;
    }
    rho += step;
  }
  throw ConvergenceError("mean-field ground state did not converge");
}

double mf_energy(const Grid& grid, double V0, double g, const MfState& s) {
  const Eigen::MatrixXd h0 = sp_hamiltonian(grid, V0);
  const double e1 = (s.c.adjoint() * h0 * s.c)(0).real();
  const double e2 = 0.5 * g * (s.n_particles - 1) / grid.dx * s.c.cwiseAbs2().squaredNorm();
  return e1 + e2;
}

MfStats evolve_mf(const Grid& grid, double V0, const QuenchProtocol& p, const MfState& phi0,
                  const MfObserver& observer, const MfOptions& opt) {
  p.validate();
  if (phi0.c.size() != grid.n_points) throw ConfigError("orbital does not match the grid");
  if (!(opt.dt > 0.0)) throw ConfigError("mean-field dt must be > 0");
  MfStats st;
  SineTransform dst(grid.n_points);
  const Eigen::VectorXd v = potential(grid, V0);
  const Eigen::VectorXd k2 = kinetic_diag(grid);
  const double nl = (phi0.n_particles - 1) / grid.dx;

  MfState s = phi0;
  auto half_potential = [&](double g, double h) {
    for (int a = 0; a < grid.n_points; ++a) {
      const double e = v(a) + g * nl * std::norm(s.c(a));
      s.c(a) *= std::polar(1.0, -e * h);
    }
  };
  auto kinetic = [&](double h) {
    dst.apply(s.c);
    for (int n = 0; n < grid.n_points; ++n) s.c(n) *= std::polar(1.0, -k2(n) * h);
    dst.apply(s.c);
  };

  const int ns = p.n_samples();
  if (observer) observer(0.0, s);
  double t = 0.0;
  for (int k = 1; k < ns; ++k) {
    const double t_next = p.sample_time(k);
    const long n = static_cast<long>(std::ceil((t_next - t) / opt.dt - 1e-9));
    const double h = (t_next - t) / static_cast<double>(n);
    for (long j = 0; j < n; ++j) {
      const double g = p.g_at(t + (j + 0.5) * h);
      half_potential(g, 0.5 * h);
      kinetic(h);
      half_potential(g, 0.5 * h);
    }
    st.steps += n;
    t = t_next;
    const double drift = std::abs(s.c.norm() - 1.0);
    st.max_norm_drift = std::max(st.max_norm_drift, drift);
    if (drift > opt.norm_limit) {
      throw NumericalError("mean-field norm drift " + std::to_string(drift) + " at t = " + std::to_string(t));
    }
    if (observer) observer(t, s);
  }
  return st;
}

double mf_fidelity(const MfState& phi0, const MfState& phi) {
  return std::pow(std::norm(phi0.c.dot(phi.c)), phi0.n_particles);
}

double mf_excited_fraction(const Eigen::MatrixXd& band0, const MfState& phi) {
  const Eigen::VectorXcd proj = band0.transpose().cast<std::complex<double>>() * phi.c;
  const double w = std::min(1.0, proj.squaredNorm());
  return 1.0 - std::pow(w, phi.n_particles);
}

}  // namespace lq
