#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lq/fock.hpp"
#include "lq/linalg.hpp"
#include "lq/mbham.hpp"
#include "lq/spbands.hpp"

namespace lq {

inline constexpr int kDefaultLevels = 25;
inline constexpr double kWideCrossingThreshold = 0.01;

// Lowest K levels of H(g) with parity and dominant energetic class.
struct ScanPoint {
  double g = 0.0;
  Eigen::VectorXd energies;
  std::vector<Parity> parity;
  std::vector<ClassLabel> dominant;
  std::vector<double> dominant_weight;
};

struct GScan {
  std::vector<ScanPoint> points;
  int levels = 0;
};

// Weight of each ClassLabel in a state vector, indexed by the enum value.
std::array<double, 6> class_weights(const Eigen::Ref<const Eigen::VectorXd>& v, const std::vector<ClassTag>& tags);

// Diagonalizes at one g. Near-degenerate levels are rotated into parity
// eigenstates before labeling.
ScanPoint analyze_point(const HamiltonianPair& h, const SignedPermutation& parity,
                        const std::vector<ClassTag>& tags, double g, int levels,
                        const EigenOptions& opt = {});

// Spectra over an ascending g grid; points are evaluated on `jobs` threads
// and merged in grid order.
GScan scan_g(const HamiltonianPair& h, const SignedPermutation& parity, const std::vector<ClassTag>& tags,
             const std::vector<double>& g_grid, int levels, int jobs = 1, const EigenOptions& opt = {});

std::vector<double> default_g_grid();

struct AvoidedCrossing {
  double g_star = 0.0;
  double delta_e = 0.0;
  Parity parity = Parity::even;
  int rank = 0;                 // lower level's rank within its parity sector
  int lower_level = 0;          // global level indices at g_star
  int upper_level = 0;
  bool wide = false;
  bool bracketed = true;        // false if the refined minimum hit the bracket edge
  ClassLabel class_left = ClassLabel::OTHER;   // lower level, left of g_star
  ClassLabel class_right = ClassLabel::OTHER;  // lower level, right of g_star
  ClassLabel upper_left = ClassLabel::OTHER;
  ClassLabel upper_right = ClassLabel::OTHER;

  std::string kind() const { return wide ? "wide" : "narrow"; }
  bool involves(ClassLabel c) const {
    return class_left == c || class_right == c || upper_left == c || upper_right == c;
  }
};

// Re-solves the spectrum at an arbitrary g (used for golden-section refinement).
using PointResolver = std::function<ScanPoint(double g)>;

// Local minima of the gap between adjacent same-parity levels. With a
// resolver, each minimum is refined by golden-section search inside its grid
// bracket; otherwise the grid minimum is reported.
std::vector<AvoidedCrossing> detect_crossings(const GScan& scan, const PointResolver& resolver = nullptr,
                                              double g_tol = 1e-6);

void write_scan_csv(std::ostream& os, const GScan& scan);
void write_crossings_csv(std::ostream& os, const std::vector<AvoidedCrossing>& crossings);

}  // namespace lq
