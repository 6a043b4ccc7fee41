#include "lq/mbham.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <limits>
#include <thread>

#include "lq/error.hpp"

namespace lq {

OneBodyTensor one_body_elements(const WannierSet& wan, const Eigen::MatrixXd& h_sp) {
  OneBodyTensor h = wan.orbitals.transpose() * h_sp * wan.orbitals;
  return 0.5 * (h + h.transpose());
}

TwoBodyTensor two_body_elements(const WannierSet& wan, const Grid& grid) {
  const int n = wan.size();
  const Eigen::Index np = wan.orbitals.rows();
  // pair densities p_ij(x) = w_i(x) w_j(x); W_ijkl = <p_ij, p_kl> / dx
  std::vector<Eigen::VectorXd> pairs(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pairs[i * n + j] = wan.orbitals.col(i).cwiseProduct(wan.orbitals.col(j));
  (void)np;
  TwoBodyTensor w(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = pairs[i * n + j].dot(pairs[k * n + l]) / grid.dx;
          if (std::abs(v) < kTensorDropTolerance) v = 0.0;
          w(i, j, k, l) = v;
        }
  return w;
}

void write_tensor_csv(std::ostream& os, const TwoBodyTensor& w) {
  os << "i,j,k,l,value\n";
  os.precision(15);
  const int n = w.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) os << i << ',' << j << ',' << k << ',' << l << ',' << w(i, j, k, l) << '\n';
}

HamiltonianPair::HamiltonianPair(std::size_t dim, std::vector<std::int64_t> row_ptr,
                                 std::vector<std::int32_t> cols, std::vector<double> h0,
                                 std::vector<double> w)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), h0_(std::move(h0)), w_(std::move(w)) {}

double HamiltonianPair::expectation(double g, const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y;
  apply(g, x, y);
  return x.dot(y).real();
}

Eigen::MatrixXd HamiltonianPair::dense(double g) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, cols_[k]) = h0_[k] + g * w_[k];
  return m;
}

Eigen::MatrixXd HamiltonianPair::dense_component(bool interaction) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, cols_[k]) = interaction ? w_[k] : h0_[k];
  return m;
}

double HamiltonianPair::w_row_sum_bound() const {
  double best = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(w_[k]);
    best = std::max(best, s);
  }
  return best;
}

double HamiltonianPair::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(cols_[k]);
      const auto begin = cols_.begin() + row_ptr_[c];
      const auto end = cols_.begin() + row_ptr_[c + 1];
      const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(r));
      double h0t = 0.0, wt = 0.0;
      if (it != end && *it == static_cast<std::int32_t>(r)) {
        h0t = h0_[it - cols_.begin()];
        wt = w_[it - cols_.begin()];
      }
      worst = std::max({worst, std::abs(h0_[k] - h0t), std::abs(w_[k] - wt)});
    }
  }
  return worst;
}

namespace {

struct Entry {
  std::int32_t col;
  double h0;
  double w;
};

// Column `idx` of H0 and W, i.e. the action on basis state idx. By symmetry
// this is also row idx.
void build_row(const FockBasis& basis, const OneBodyTensor& h, const TwoBodyTensor& w, std::size_t idx,
               std::vector<Entry>& out, std::vector<int>& work) {
  out.clear();
  const int m = basis.n_orbitals();
  const auto occ = basis.occupations(idx);
  work.assign(occ.begin(), occ.end());

  for (int i = 0; i < m; ++i) {
    if (work[i] == 0) continue;
    const double a1 = std::sqrt(static_cast<double>(work[i]));
    --work[i];
    for (int j = 0; j < m; ++j) {
      const double hji = h(j, i);
      if (hji == 0.0) continue;
      const double amp = a1 * std::sqrt(static_cast<double>(work[j] + 1));
      ++work[j];
      out.push_back({static_cast<std::int32_t>(basis.rank(std::span<const int>(work))), hji * amp, 0.0});
      --work[j];
    }
    ++work[i];
  }

  for (int l = 0; l < m; ++l) {
    if (work[l] == 0) continue;
    const double al = std::sqrt(static_cast<double>(work[l]));
    --work[l];
    for (int k = 0; k < m; ++k) {
      if (work[k] == 0) continue;
      const double ak = al * std::sqrt(static_cast<double>(work[k]));
      --work[k];
      for (int j = 0; j < m; ++j) {
        const double aj = ak * std::sqrt(static_cast<double>(work[j] + 1));
        ++work[j];
        for (int i = 0; i < m; ++i) {
          const double wijkl = w(i, j, k, l);
          if (wijkl == 0.0) continue;
          const double amp = aj * std::sqrt(static_cast<double>(work[i] + 1));
          ++work[i];
          out.push_back({static_cast<std::int32_t>(basis.rank(std::span<const int>(work))), 0.0, 0.5 * wijkl * amp});
          --work[i];
        }
        --work[j];
      }
      ++work[k];
    }
    ++work[l];
  }

  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  std::size_t w_pos = 0;
  for (std::size_t r = 0; r < out.size();) {
    Entry acc = out[r];
    std::size_t s = r + 1;
    for (; s < out.size() && out[s].col == acc.col; ++s) {
      acc.h0 += out[s].h0;
      acc.w += out[s].w;
    }
    if (acc.h0 != 0.0 || acc.w != 0.0) out[w_pos++] = acc;
    r = s;
  }
  out.resize(w_pos);
}

}  // namespace

HamiltonianPair assemble(const FockBasis& basis, const OneBodyTensor& h, const TwoBodyTensor& w, int jobs) {
  const int m = basis.n_orbitals();
  if (h.rows() != m || h.cols() != m || w.size() != m) {
    throw ConfigError("tensor dimensions do not match the basis orbital count");
  }
  const std::size_t dim = basis.dimension();
  if (dim > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ConfigError("basis too large for 32-bit column indices");
  }
  std::vector<std::vector<Entry>> rows(dim);
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(dim)));
  auto worker = [&](int t) {
    std::vector<int> work;
    for (std::size_t r = static_cast<std::size_t>(t); r < dim; r += static_cast<std::size_t>(n_threads)) {
      build_row(basis, h, w, r, rows[r], work);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
  }

  // Symmetrize to remove rounding-level asymmetry between (r,c) and (c,r).
  for (std::size_t r = 0; r < dim; ++r) {
    for (auto& e : rows[r]) {
      const auto c = static_cast<std::size_t>(e.col);
      if (c <= r) continue;
      auto& other = rows[c];
      auto it = std::lower_bound(other.begin(), other.end(), static_cast<std::int32_t>(r),
                                 [](const Entry& a, std::int32_t v) { return a.col < v; });
      if (it == other.end() || it->col != static_cast<std::int32_t>(r)) {
        throw NumericalError("many-body operator is structurally asymmetric");
      }
      const double h0 = 0.5 * (e.h0 + it->h0);
      const double wv = 0.5 * (e.w + it->w);
      e.h0 = it->h0 = h0;
      e.w = it->w = wv;
    }
  }

  for (auto& row : rows) {
    for (auto& e : row) {
      if (std::abs(e.h0) < kTensorDropTolerance) e.h0 = 0.0;
      if (std::abs(e.w) < kTensorDropTolerance) e.w = 0.0;
    }
    std::erase_if(row, [](const Entry& e) { return e.h0 == 0.0 && e.w == 0.0; });
  }

  std::vector<std::int64_t> row_ptr(dim + 1, 0);
  for (std::size_t r = 0; r < dim; ++r) row_ptr[r + 1] = row_ptr[r] + static_cast<std::int64_t>(rows[r].size());
  std::vector<std::int32_t> cols(row_ptr[dim]);
  std::vector<double> h0(row_ptr[dim]), wv(row_ptr[dim]);
  for (std::size_t r = 0; r < dim; ++r) {
    std::int64_t k = row_ptr[r];
    for (const auto& e : rows[r]) {
      cols[k] = e.col;
      h0[k] = e.h0;
      wv[k] = e.w;
      ++k;
    }
  }
  return HamiltonianPair(dim, std::move(row_ptr), std::move(cols), std::move(h0), std::move(wv));
}

}  // namespace lq
