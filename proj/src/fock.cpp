#include "lq/fock.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "lq/error.hpp"

namespace lq {

int NumberState::total() const {
  int s = 0;
  for (int n : occupations) s += n;
  return s;
}

FockBasis::FockBasis(int n_particles, std::vector<OrbitalLabel> orbitals)
    : n_particles_(n_particles), orbitals_(std::move(orbitals)) {
  if (n_particles_ < 1) throw ConfigError("particle number must be >= 1");
  if (orbitals_.empty()) throw ConfigError("orbital list is empty");
  if (n_particles_ > 255) throw ConfigError("particle number exceeds occupation storage");
  const int top = n_particles_ + n_orbitals();
  binom_.assign(top + 1, std::vector<std::size_t>(top + 1, 0));
  constexpr std::size_t cap = kMaxFockDimension * 16;
  for (int n = 0; n <= top; ++n) {
    binom_[n][0] = 1;
    for (int k = 1; k <= n; ++k) binom_[n][k] = std::min(cap, binom_[n - 1][k - 1] + binom_[n - 1][k]);
  }
  dimension_ = count(n_orbitals(), n_particles_);
  if (dimension_ > kMaxFockDimension) {
    throw ConfigError("Fock space dimension " + std::to_string(dimension_) + " exceeds limit " +
                      std::to_string(kMaxFockDimension));
  }
  const std::size_t m = orbitals_.size();
  table_.resize(dimension_ * m);
  for (std::size_t i = 0; i < dimension_; ++i) {
    const NumberState s = unrank(i);
    for (std::size_t j = 0; j < m; ++j) table_[i * m + j] = static_cast<std::uint8_t>(s.occupations[j]);
  }
}

std::size_t FockBasis::count(int orbitals, int particles) const {
  if (particles < 0) return 0;
  if (orbitals == 0) return particles == 0 ? 1 : 0;
  return binom_[particles + orbitals - 1][orbitals - 1];
}

template <class T>
std::size_t FockBasis::rank_impl(std::span<const T> occ) const {
  if (occ.size() != orbitals_.size()) throw ConfigError("occupation vector has wrong length");
  int remaining = n_particles_;
  std::size_t r = 0;
  const int m = n_orbitals();
  for (int i = 0; i < m; ++i) {
    const int n = static_cast<int>(occ[i]);
    if (n < 0 || n > remaining) throw ConfigError("occupations do not sum to N");
    const int o = m - i - 1;
    if (o == 0) {
      if (n != remaining) throw ConfigError("occupations do not sum to N");
      break;
    }
    // sum_{k<n} count(o, remaining - k), via the hockey-stick identity
    r += binom_[remaining + o][o] - binom_[remaining - n + o][o];
    remaining -= n;
  }
  return r;
}

std::size_t FockBasis::rank(std::span<const int> occ) const { return rank_impl(occ); }
std::size_t FockBasis::rank(std::span<const std::uint8_t> occ) const { return rank_impl(occ); }

NumberState FockBasis::unrank(std::size_t index) const {
  if (index >= dimension_) throw ConfigError("basis index out of range");
  const int m = n_orbitals();
  NumberState s;
  s.occupations.assign(m, 0);
  int remaining = n_particles_;
  for (int i = 0; i < m - 1; ++i) {
    const int o = m - i - 1;
    int n = 0;
    while (true) {
      const std::size_t c = count(o, remaining - n);
      if (index < c) break;
      index -= c;
      ++n;
    }
    s.occupations[i] = n;
    remaining -= n;
  }
  s.occupations[m - 1] = remaining;
  return s;
}

std::vector<OrbitalLabel> lattice_orbitals(int n_bands, int m_wells) {
  std::vector<OrbitalLabel> out;
  for (int b = 0; b < n_bands; ++b)
    for (int s = 0; s < m_wells; ++s) out.push_back({b, s});
  return out;
}

const char* to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::S: return "S";
    case ClassLabel::SP: return "SP";
    case ClassLabel::T: return "T";
    case ClassLabel::SE: return "SE";
    case ClassLabel::HE: return "HE";
    case ClassLabel::OTHER: return "OTHER";
  }
  return "OTHER";
}

ClassLabel parse_class_label(std::string_view s) {
  for (ClassLabel c : {ClassLabel::S, ClassLabel::SP, ClassLabel::T, ClassLabel::SE,
                       ClassLabel::HE, ClassLabel::OTHER}) {
    if (s == to_string(c)) return c;
  }
  throw ConfigError("unknown class label '" + std::string(s) + "'");
}

std::string ClassTag::key() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < site_occupancy.size(); ++i) os << (i ? "," : "") << site_occupancy[i];
  os << "}q" << quanta;
  return os.str();
}

ClassTag classify_state(std::span<const std::uint8_t> occ,
                        const std::vector<OrbitalLabel>& orbitals, int m_wells) {
  ClassTag tag;
  std::vector<int> site(m_wells, 0);
  int band1 = 0;
  for (std::size_t i = 0; i < orbitals.size(); ++i) {
    site[orbitals[i].site] += occ[i];
    tag.quanta += orbitals[i].band * occ[i];
    if (orbitals[i].band == 1) band1 += occ[i];
  }
  std::sort(site.begin(), site.end(), std::greater<>());
  tag.site_occupancy = site;

  // largest site occupancy and how many sites exceed one
  const int top = site.front();
  const int crowded = static_cast<int>(std::count_if(site.begin(), site.end(), [](int n) { return n > 1; }));
  if (tag.quanta == 0) {
    if (top <= 1) tag.label = ClassLabel::S;
    else if (top == 2 && crowded == 1) tag.label = ClassLabel::SP;
    else if (top == 3 && crowded == 1) tag.label = ClassLabel::T;
  } else if (tag.quanta == 1 && band1 == 1) {
    if (top <= 1) tag.label = ClassLabel::SE;
    else if (top == 2 && crowded == 1) tag.label = ClassLabel::HE;
  }
  return tag;
}

ClassTag classify_state(const NumberState& n, const std::vector<OrbitalLabel>& orbitals,
                        int m_wells) {
  std::vector<std::uint8_t> occ(n.occupations.begin(), n.occupations.end());
  return classify_state(std::span<const std::uint8_t>(occ), orbitals, m_wells);
}

SignedPermutation parity_map(const FockBasis& basis, const WannierSet& wan) {
  if (basis.orbitals() != wan.labels) {
    throw ConfigError("basis orbitals do not match the Wannier set");
  }
  const int m = basis.n_orbitals();
  std::vector<int> mirror(m);
  for (int i = 0; i < m; ++i) {
    mirror[i] = wan.mirror_index(i);
    if (mirror[i] < 0) throw ConfigError("orbital set is not closed under site mirroring");
  }
  SignedPermutation p;
  p.target.resize(basis.dimension());
  p.sign.resize(basis.dimension());
  std::vector<int> image(m);
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const auto occ = basis.occupations(idx);
    int sign = 1;
    for (int i = 0; i < m; ++i) {
      image[mirror[i]] = occ[i];
      if (wan.parity_phase[i] < 0 && occ[i] % 2 == 1) sign = -sign;
    }
    p.target[idx] = basis.rank(std::span<const int>(image));
    p.sign[idx] = static_cast<signed char>(sign);
  }
  return p;
}

std::string format_ket(std::span<const std::uint8_t> occ, const std::vector<OrbitalLabel>& orbitals,
                       int m_wells) {
  std::ostringstream os;
  for (int s = 0; s < m_wells; ++s) {
    if (s) os << ',';
    bool any = false;
    // band-ascending within the site
    std::vector<std::pair<int, int>> parts;
    for (std::size_t i = 0; i < orbitals.size(); ++i)
      if (orbitals[i].site == s && occ[i] > 0) parts.emplace_back(orbitals[i].band, occ[i]);
    std::sort(parts.begin(), parts.end());
    for (auto [band, n] : parts) {
      if (any) os << "⊗";
      os << n;
      if (band > 0) os << "^{(" << band << ")}";
      any = true;
    }
    if (!any) os << '0';
  }
  return os.str();
}

std::string format_ket(const NumberState& n, const std::vector<OrbitalLabel>& orbitals,
                       int m_wells) {
  std::vector<std::uint8_t> occ(n.occupations.begin(), n.occupations.end());
  return format_ket(std::span<const std::uint8_t>(occ), orbitals, m_wells);
}

namespace {

std::vector<std::string_view> split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + sep.size();
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '|')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '>')) s.remove_suffix(1);
  return s;
}

int to_int(std::string_view s, std::string_view whole) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw ConfigError("malformed ket '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

NumberState parse_ket(std::string_view ket, const std::vector<OrbitalLabel>& orbitals, int m_wells) {
  const auto sites = split(trim(ket), ",");
  if (static_cast<int>(sites.size()) != m_wells) {
    throw ConfigError("ket '" + std::string(ket) + "' does not list " + std::to_string(m_wells) + " sites");
  }
  NumberState n;
  n.occupations.assign(orbitals.size(), 0);
  for (int s = 0; s < m_wells; ++s) {
    for (std::string_view part : split(trim(sites[s]), "⊗")) {
      part = trim(part);
      int band = 0;
      const std::size_t caret = part.find("^{(");
      std::string_view count = part;
      if (caret != std::string_view::npos) {
        const std::size_t close = part.find(")}", caret);
        if (close == std::string_view::npos) throw ConfigError("malformed ket '" + std::string(ket) + "'");
        band = to_int(part.substr(caret + 3, close - caret - 3), ket);
        count = part.substr(0, caret);
      }
      const int occ = to_int(count, ket);
      if (occ == 0) continue;
      const auto it = std::find(orbitals.begin(), orbitals.end(), OrbitalLabel{band, s});
      if (it == orbitals.end()) {
        throw ConfigError("ket '" + std::string(ket) + "' uses an orbital outside the basis");
      }
      n.occupations[it - orbitals.begin()] += occ;
    }
  }
  return n;
}

}  // namespace lq
