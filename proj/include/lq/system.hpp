#pragma once

#include <cstddef>
#include <vector>

#include "lq/dvr.hpp"
#include "lq/fock.hpp"
#include "lq/mbham.hpp"
#include "lq/spbands.hpp"

namespace lq {

struct SystemParams {
  int m_wells = 3;
  int n_points = 0;     // 0: 100 points per well (300 / 500 for m = 3 / 5)
  double V0 = 10.0;
  int n_bands = 0;      // 0: default_bands(m_wells)
  int n_particles = 0;  // 0: unit filling
  bool allow_shallow = false;
  int jobs = 1;
};

int default_points(int m_wells);
int default_bands(int m_wells);

// Everything derived from (m, n_points, V0, bands, N): single-particle data,
// Wannier orbitals, Fock basis and the operator pair H0, W. Immutable after
// construction and safe to share between threads.
struct System {
  SystemParams params;
  Grid grid;
  Eigen::MatrixXd h_sp;
  SpSpectrum sp;
  BandPartition bands;
  WannierSet wannier;
  OneBodyTensor h1;
  TwoBodyTensor w2;
  FockBasis basis;
  HamiltonianPair ham;
  SignedPermutation parity;
  std::vector<ClassTag> tags;
  std::vector<char> band0;  // 1 if the basis state has every boson in band 0

  int m_wells() const { return grid.m_wells; }
  int n_particles() const { return basis.n_particles(); }
  std::string ket(std::size_t index) const {
    return format_ket(basis.occupations(index), basis.orbitals(), grid.m_wells);
  }
};

// Resolves defaults and validates; throws ConfigError.
SystemParams resolve(const SystemParams& p);

System build_system(const SystemParams& params);

}  // namespace lq
