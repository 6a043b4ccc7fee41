#include "lq/spbands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "lq/error.hpp"

namespace lq {

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

namespace {

double reflection_overlap(const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  const Eigen::Index n = a.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += a(i) * b(n - 1 - i);
  return s;
}

}  // namespace

SpSpectrum solve_sp(const Eigen::MatrixXd& h, int n_states) {
  if (n_states <= 0 || n_states > h.rows()) {
    throw ConfigError("n_states must be in [1, n_points]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("single-particle eigensolver failed");
  }
  SpSpectrum out;
  out.energies = es.eigenvalues().head(n_states);
  out.states = es.eigenvectors().leftCols(n_states);
  out.parity.resize(n_states);
  for (int i = 0; i < n_states; ++i) {
    auto v = out.states.col(i);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    out.parity[i] = reflection_overlap(v, v) >= 0.0 ? Parity::even : Parity::odd;
  }
  return out;
}

BandPartition group_bands(const SpSpectrum& spec, int m_wells, bool allow_shallow) {
  if (m_wells <= 0 || spec.size() % m_wells != 0) {
    throw ConfigError("number of single-particle states must be a multiple of m_wells");
  }
  BandPartition part;
  part.m_wells = m_wells;
  const int nb = spec.size() / m_wells;
  for (int b = 0; b < nb; ++b) {
    BandInfo info;
    info.first_state = b * m_wells;
    info.lower = spec.energies(b * m_wells);
    info.upper = spec.energies(b * m_wells + m_wells - 1);
    info.bandwidth = info.upper - info.lower;
    info.gap_above = (b + 1 < nb) ? spec.energies((b + 1) * m_wells) - info.upper
                                  : std::numeric_limits<double>::quiet_NaN();
    part.bands.push_back(info);
  }
  if (!allow_shallow) {
    for (int b = 0; b + 1 < nb; ++b) {
      const auto& info = part.bands[b];
      if (info.bandwidth >= info.gap_above) {
        std::ostringstream msg;
        msg << "no band structure: band " << b << " width " << info.bandwidth
            << " >= gap " << info.gap_above
            << "; use a deeper lattice (larger V0), fewer bands, or allow_shallow";
        throw ShallowLatticeError(msg.str());
      }
    }
  }
  return part;
}

int WannierSet::index_of(OrbitalLabel l) const {
  for (int i = 0; i < size(); ++i)
    if (labels[i] == l) return i;
  return -1;
}

int WannierSet::mirror_index(int orbital) const {
  const auto& l = labels.at(orbital);
  return index_of({l.band, m_wells - 1 - l.site});
}

WannierSet build_wannier(const SpSpectrum& spec, int band, const Grid& grid) {
  const int m = grid.m_wells;
  if (band < 0 || (band + 1) * m > spec.size()) {
    throw ConfigError("band " + std::to_string(band) + " is not present in the spectrum");
  }
  const Eigen::MatrixXd block = spec.states.middleCols(band * m, m);
  const Eigen::Map<const Eigen::VectorXd> x(grid.points.data(), grid.n_points);
  const Eigen::MatrixXd xproj = block.transpose() * x.asDiagonal() * block;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xproj);
  if (es.info() != Eigen::Success) throw NumericalError("position-operator eigensolve failed");
  const Eigen::VectorXd& centers = es.eigenvalues();
  for (int s = 0; s + 1 < m; ++s) {
    if (centers(s + 1) - centers(s) < 1e-8) {
      throw DegeneracyError("degenerate Wannier centers in band " + std::to_string(band));
    }
  }

  WannierSet wan;
  wan.m_wells = m;
  wan.orbitals = block * es.eigenvectors();
  for (int s = 0; s < m; ++s) {
    auto w = wan.orbitals.col(s);
    const double c = centers(s);
    double probe = 0.0;
    if (band % 2 == 0) {
      const int node = std::clamp(static_cast<int>(std::lround((c + grid.half_length) / grid.dx)) - 1,
                                  0, grid.n_points - 1);
      probe = w(node);
    } else {
      // first moment over the home well: right lobe positive
      for (int a = 0; a < grid.n_points; ++a) {
        const double d = grid.points[a] - c;
        if (std::abs(d) < std::numbers::pi / 2) probe += w(a) * d;
      }
    }
    if (probe < 0) w = -w;
    wan.labels.push_back({band, s});
    wan.centers.push_back(c);
  }
  for (int s = 0; s < m; ++s) {
    const double ov = reflection_overlap(wan.orbitals.col(s), wan.orbitals.col(m - 1 - s));
    if (std::abs(std::abs(ov) - 1.0) > 1e-6) {
      throw NumericalError("Wannier orbitals of band " + std::to_string(band) +
                           " are not mirror images of each other");
    }
    wan.parity_phase.push_back(ov > 0 ? 1 : -1);
  }
  return wan;
}

WannierSet build_wannier_bands(const SpSpectrum& spec, int n_bands, const Grid& grid) {
  WannierSet all;
  all.m_wells = grid.m_wells;
  all.orbitals.resize(grid.n_points, n_bands * grid.m_wells);
  for (int b = 0; b < n_bands; ++b) {
    WannierSet one = build_wannier(spec, b, grid);
    all.orbitals.middleCols(b * grid.m_wells, grid.m_wells) = one.orbitals;
    all.labels.insert(all.labels.end(), one.labels.begin(), one.labels.end());
    all.centers.insert(all.centers.end(), one.centers.begin(), one.centers.end());
    all.parity_phase.insert(all.parity_phase.end(), one.parity_phase.begin(),
                            one.parity_phase.end());
  }
  return all;
}

Eigen::MatrixXd band_projector(const SpSpectrum& spec, int band, int m_wells) {
  const Eigen::MatrixXd block = spec.states.middleCols(band * m_wells, m_wells);
  return block * block.transpose();
}

void write_orbitals_csv(std::ostream& os, const Grid& grid, const WannierSet& wan) {
  os << "x";
  for (const auto& l : wan.labels) os << ",w_" << l.band << "_" << (l.site + 1);
  os << '\n';
  const double scale = 1.0 / std::sqrt(grid.dx);
  os.precision(12);
  for (int a = 0; a < grid.n_points; ++a) {
    os << grid.points[a];
    for (int i = 0; i < wan.size(); ++i) os << ',' << wan.orbitals(a, i) * scale;
    os << '\n';
  }
}

}  // namespace lq
