#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lq/spbands.hpp"

namespace lq {

inline constexpr std::size_t kMaxFockDimension = 50'000'000;

struct NumberState {
  std::vector<int> occupations;
  int total() const;
  friend bool operator==(const NumberState&, const NumberState&) = default;
};

// All N-boson occupation vectors over a fixed orbital list, in ascending
// lexicographic order (index 0 is |0,...,0,N>). rank/unrank are combinatorial
// and cost O(n_orb + N).
class FockBasis {
 public:
  FockBasis() = default;
  FockBasis(int n_particles, std::vector<OrbitalLabel> orbitals);

  int n_particles() const { return n_particles_; }
  int n_orbitals() const { return static_cast<int>(orbitals_.size()); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<OrbitalLabel>& orbitals() const { return orbitals_; }

  std::size_t rank(std::span<const int> occupations) const;
  std::size_t rank(std::span<const std::uint8_t> occupations) const;
  NumberState unrank(std::size_t index) const;

  // Cached occupation row of state `index`.
  std::span<const std::uint8_t> occupations(std::size_t index) const {
    return {table_.data() + index * orbitals_.size(), orbitals_.size()};
  }

  // Number of ways to place p bosons in o orbitals.
  std::size_t count(int orbitals, int particles) const;

 private:
  template <class T>
  std::size_t rank_impl(std::span<const T> occ) const;

  int n_particles_ = 0;
  std::vector<OrbitalLabel> orbitals_;
  std::size_t dimension_ = 0;
  std::vector<std::vector<std::size_t>> binom_;  // binom_[n][k]
  std::vector<std::uint8_t> table_;
};

// Convenience: bands 0..n_bands-1 times sites 0..m_wells-1, band-major.
std::vector<OrbitalLabel> lattice_orbitals(int n_bands, int m_wells);

enum class ClassLabel { S, SP, T, SE, HE, OTHER };

const char* to_string(ClassLabel c);
ClassLabel parse_class_label(std::string_view s);

// Energetic class of a number state. `site_occupancy` is the descending
// multiset of per-site totals, `quanta` is the sum of band index times
// occupation.
struct ClassTag {
  ClassLabel label = ClassLabel::OTHER;
  std::vector<int> site_occupancy;
  int quanta = 0;

  std::string key() const;
  friend bool operator==(const ClassTag&, const ClassTag&) = default;
};

ClassTag classify_state(std::span<const std::uint8_t> occupations,
                        const std::vector<OrbitalLabel>& orbitals, int m_wells);
ClassTag classify_state(const NumberState& n, const std::vector<OrbitalLabel>& orbitals,
                        int m_wells);

// Site reflection as a signed permutation of basis indices:
// Pi |n> = sign[i] |n_target[i]>.
struct SignedPermutation {
  std::vector<std::size_t> target;
  std::vector<signed char> sign;

  std::size_t size() const { return target.size(); }

  template <class Vec>
  Vec apply(const Vec& v) const {
    Vec out(v.size());
    for (std::size_t i = 0; i < target.size(); ++i)
      out(static_cast<Eigen::Index>(target[i])) = static_cast<double>(sign[i]) * v(static_cast<Eigen::Index>(i));
    return out;
  }
};

// Throws ConfigError when the basis orbitals are not closed under mirroring
// or do not match the Wannier labels.
SignedPermutation parity_map(const FockBasis& basis, const WannierSet& wan);

// Ket label in the usual notation, e.g. "1,2^{(1)},0"; several bands on one
// site are joined with "⊗" as in "1⊗1^{(1)},1,0".
std::string format_ket(std::span<const std::uint8_t> occupations,
                       const std::vector<OrbitalLabel>& orbitals, int m_wells);
std::string format_ket(const NumberState& n, const std::vector<OrbitalLabel>& orbitals,
                       int m_wells);

// Inverse of format_ket. Throws ConfigError on malformed input or orbitals
// missing from the list.
NumberState parse_ket(std::string_view ket, const std::vector<OrbitalLabel>& orbitals,
                      int m_wells);

}  // namespace lq
