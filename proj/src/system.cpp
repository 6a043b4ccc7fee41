#include "lq/system.hpp"

#include "lq/error.hpp"

namespace lq {

int default_points(int m_wells) { return 100 * m_wells; }

int default_bands(int m_wells) { return m_wells <= 3 ? 3 : 2; }

SystemParams resolve(const SystemParams& p) {
  SystemParams r = p;
  if (r.n_points == 0) r.n_points = default_points(r.m_wells);
  if (r.n_bands == 0) r.n_bands = default_bands(r.m_wells);
  if (r.n_particles == 0) r.n_particles = r.m_wells;
  if (r.n_bands < 1) throw ConfigError("bands must be >= 1");
  if (r.n_particles < 1) throw ConfigError("N must be >= 1");
  if (r.jobs < 1) r.jobs = 1;
  return r;
}

System build_system(const SystemParams& params) {
  System s;
  s.params = resolve(params);
  const auto& p = s.params;
  s.grid = build_grid(p.m_wells, p.n_points);
  s.h_sp = sp_hamiltonian(s.grid, p.V0);
  const int n_states = p.n_bands * p.m_wells;
  if (n_states > p.n_points) throw ConfigError("more bands requested than grid points");
  s.sp = solve_sp(s.h_sp, n_states);
  s.bands = group_bands(s.sp, p.m_wells, p.allow_shallow);
  s.wannier = build_wannier_bands(s.sp, p.n_bands, s.grid);
  s.h1 = one_body_elements(s.wannier, s.h_sp);
  s.w2 = two_body_elements(s.wannier, s.grid);
  s.basis = FockBasis(p.n_particles, s.wannier.labels);
  s.ham = assemble(s.basis, s.h1, s.w2, p.jobs);
  s.parity = parity_map(s.basis, s.wannier);
  s.tags.reserve(s.basis.dimension());
  s.band0.resize(s.basis.dimension());
  for (std::size_t i = 0; i < s.basis.dimension(); ++i) {
    s.tags.push_back(classify_state(s.basis.occupations(i), s.basis.orbitals(), p.m_wells));
    s.band0[i] = s.tags.back().quanta == 0 ? 1 : 0;
  }
  return s;
}

}  // namespace lq
