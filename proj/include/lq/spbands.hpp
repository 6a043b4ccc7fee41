#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "lq/dvr.hpp"

namespace lq {

enum class Parity { even, odd };

const char* to_string(Parity p);

// Lowest single-particle eigenpairs. Columns of `states` are unit-norm DVR
// coefficient vectors; the continuum orbital at node a is states(a, i) / sqrt(dx).
struct SpSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXd states;
  std::vector<Parity> parity;

  int size() const { return static_cast<int>(energies.size()); }
};

SpSpectrum solve_sp(const Eigen::MatrixXd& h, int n_states);

struct BandInfo {
  int first_state = 0;
  double lower = 0.0;
  double upper = 0.0;
  double bandwidth = 0.0;
  double gap_above = 0.0;  // NaN for the topmost block
};

struct BandPartition {
  int m_wells = 0;
  std::vector<BandInfo> bands;
};

// Consecutive blocks of m_wells states. Every block below the topmost must be
// narrower than the gap to the next block, otherwise ShallowLatticeError
// (unless allow_shallow).
BandPartition group_bands(const SpSpectrum& spec, int m_wells, bool allow_shallow = false);

struct OrbitalLabel {
  int band = 0;
  int site = 0;  // 0-based, left to right
  friend bool operator==(const OrbitalLabel&, const OrbitalLabel&) = default;
};

// Localized orbitals, one per (band, site), ordered band-major then by site.
struct WannierSet {
  int m_wells = 0;
  std::vector<OrbitalLabel> labels;
  Eigen::MatrixXd orbitals;  // DVR coefficients, one column per orbital
  std::vector<double> centers;
  std::vector<int> parity_phase;  // w_{b,s}(-x) = phase * w_{b,mirror(s)}(x)

  int size() const { return static_cast<int>(labels.size()); }
  int n_bands() const { return m_wells > 0 ? size() / m_wells : 0; }
  int index_of(OrbitalLabel l) const;
  int mirror_index(int orbital) const;
};

// Diagonalizes the position operator inside one band. Throws DegeneracyError
// when two centers coincide within 1e-8.
WannierSet build_wannier(const SpSpectrum& spec, int band, const Grid& grid);

WannierSet build_wannier_bands(const SpSpectrum& spec, int n_bands, const Grid& grid);

// Projector onto the span of band `band` eigenstates.
Eigen::MatrixXd band_projector(const SpSpectrum& spec, int band, int m_wells);

// CSV with columns x, w_{b,s}(x)... (continuum normalization).
void write_orbitals_csv(std::ostream& os, const Grid& grid, const WannierSet& wan);

}  // namespace lq
