#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lq/dvr.hpp"
#include "lq/fock.hpp"
#include "lq/spbands.hpp"

namespace lq {

using OneBodyTensor = Eigen::MatrixXd;

// Contact-interaction integrals W_ijkl = int w_i w_j w_k w_l dx over real
// orbitals, stored densely (n_orb <= ~15).
class TwoBodyTensor {
 public:
  TwoBodyTensor() = default;
  explicit TwoBodyTensor(int n_orb) : n_(n_orb), data_(static_cast<std::size_t>(n_orb) * n_orb * n_orb * n_orb, 0.0) {}

  int size() const { return n_; }
  double operator()(int i, int j, int k, int l) const { return data_[index(i, j, k, l)]; }
  double& operator()(int i, int j, int k, int l) { return data_[index(i, j, k, l)]; }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  std::vector<double> data_;
};

inline constexpr double kTensorDropTolerance = 1e-12;

// h_ij = w_i^T H_sp w_j on the grid.
OneBodyTensor one_body_elements(const WannierSet& wan, const Eigen::MatrixXd& h_sp);

// DVR node quadrature; elements below kTensorDropTolerance are stored as zero.
TwoBodyTensor two_body_elements(const WannierSet& wan, const Grid& grid);

void write_tensor_csv(std::ostream& os, const TwoBodyTensor& w);

// H(g) = H0 + g W on a Fock basis. Both operators share one CSR sparsity
// pattern so that H(g) x costs a single pass over the nonzeros.
class HamiltonianPair {
 public:
  HamiltonianPair() = default;
  HamiltonianPair(std::size_t dim, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> cols,
                  std::vector<double> h0, std::vector<double> w);

  std::size_t dimension() const { return dim_; }
  std::size_t nonzeros() const { return cols_.size(); }

  // y = (H0 + g W) x
  template <class Scalar>
  void apply(double g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    y.resize(static_cast<Eigen::Index>(dim_));
    const Scalar* xp = x.data();
    for (std::size_t r = 0; r < dim_; ++r) {
      Scalar acc(0);
      for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        acc += (h0_[k] + g * w_[k]) * xp[cols_[k]];
      }
      y(static_cast<Eigen::Index>(r)) = acc;
    }
  }

  template <class Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(double g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
    apply(g, x, y);
    return y;
  }

  // Expectation <x|H(g)|x> for a normalized state.
  double expectation(double g, const Eigen::VectorXcd& x) const;

  Eigen::MatrixXd dense(double g) const;
  Eigen::MatrixXd dense_h0() const { return dense_component(false); }
  Eigen::MatrixXd dense_w() const { return dense_component(true); }

  // Crude upper bound on the spectral radius of W (max absolute row sum).
  double w_row_sum_bound() const;
  double max_asymmetry() const;

 private:
  Eigen::MatrixXd dense_component(bool interaction) const;

  std::size_t dim_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> cols_;
  std::vector<double> h0_;
  std::vector<double> w_;
};

// Second-quantized assembly: H0 = sum h_ij a+_i a_j,
// W = 1/2 sum W_ijkl a+_i a+_j a_k a_l. Rows are independent and are split
// across `jobs` threads.
HamiltonianPair assemble(const FockBasis& basis, const OneBodyTensor& h, const TwoBodyTensor& w,
                         int jobs = 1);

}  // namespace lq
