#include "lq/spectra.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "lq/error.hpp"

namespace lq {

std::array<double, 6> class_weights(const Eigen::Ref<const Eigen::VectorXd>& v, const std::vector<ClassTag>& tags) {
  std::array<double, 6> w{};
  for (Eigen::Index i = 0; i < v.size(); ++i) w[static_cast<int>(tags[i].label)] += v(i) * v(i);
  return w;
}

ScanPoint analyze_point(const HamiltonianPair& h, const SignedPermutation& parity,
                        const std::vector<ClassTag>& tags, double g, int levels, const EigenOptions& opt) {
  const int dim = static_cast<int>(h.dimension());
  const int want = std::min(levels + 1, dim - 1);
  Eigenpairs ep = lowest_eigenpairs(h, g, want, opt);

  // rotate near-degenerate groups into parity eigenstates
  const double scale = std::max(1.0, ep.values.cwiseAbs().maxCoeff());
  for (int i = 0; i < want;) {
    int j = i + 1;
    while (j < want && ep.values(j) - ep.values(j - 1) < 1e-9 * scale) ++j;
    if (j - i > 1) {
      const Eigen::MatrixXd block = ep.vectors.middleCols(i, j - i);
      Eigen::MatrixXd pb(block.rows(), block.cols());
      for (int c = 0; c < block.cols(); ++c) pb.col(c) = parity.apply(Eigen::VectorXd(block.col(c)));
      Eigen::MatrixXd proj = block.transpose() * pb;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (proj + proj.transpose()));
      ep.vectors.middleCols(i, j - i) = block * es.eigenvectors();
    }
    i = j;
  }

  ScanPoint pt;
  pt.g = g;
  const int k = std::min(levels, want);
  pt.energies = ep.values.head(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd v = ep.vectors.col(i);
    const double pv = v.dot(parity.apply(v));
    pt.parity.push_back(pv >= 0 ? Parity::even : Parity::odd);
    const auto w = class_weights(v, tags);
    const auto best = std::max_element(w.begin(), w.end());
    pt.dominant.push_back(static_cast<ClassLabel>(best - w.begin()));
    pt.dominant_weight.push_back(*best);
  }
  return pt;
}

GScan scan_g(const HamiltonianPair& h, const SignedPermutation& parity, const std::vector<ClassTag>& tags,
             const std::vector<double>& g_grid, int levels, int jobs, const EigenOptions& opt) {
  if (g_grid.empty()) throw ConfigError("g grid is empty");
  for (std::size_t i = 1; i < g_grid.size(); ++i)
    if (!(g_grid[i] > g_grid[i - 1])) throw ConfigError("g grid must be strictly ascending");
  GScan scan;
  scan.levels = levels;
  scan.points.resize(g_grid.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::optional<std::string>> errors(g_grid.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < g_grid.size(); i = next++) {
      try {
        scan.points[i] = analyze_point(h, parity, tags, g_grid[i], levels, opt);
      } catch (const NumericalError& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(g_grid.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < g_grid.size(); ++i) {
    if (errors[i]) throw NumericalError("at g = " + std::to_string(g_grid[i]) + ": " + *errors[i]);
  }
  return scan;
}

std::vector<double> default_g_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 200; ++i) g.push_back(0.02 * i);
  return g;
}

namespace {

// Global indices of the levels of parity p, ascending.
std::vector<int> sector(const ScanPoint& pt, Parity p) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < pt.parity.size(); ++i)
    if (pt.parity[i] == p) idx.push_back(static_cast<int>(i));
  return idx;
}

std::optional<double> sector_gap(const ScanPoint& pt, Parity p, int rank) {
  const auto idx = sector(pt, p);
  if (rank + 1 >= static_cast<int>(idx.size())) return std::nullopt;
  return pt.energies(idx[rank + 1]) - pt.energies(idx[rank]);
}

}  // namespace

std::vector<AvoidedCrossing> detect_crossings(const GScan& scan, const PointResolver& resolver, double g_tol) {
  std::vector<AvoidedCrossing> out;
  const auto& pts = scan.points;
  const int n = static_cast<int>(pts.size());
  if (n < 3) return out;

  for (Parity p : {Parity::even, Parity::odd}) {
    int max_rank = 0;
    for (const auto& pt : pts) max_rank = std::max(max_rank, static_cast<int>(sector(pt, p).size()));
    for (int r = 0; r + 1 < max_rank; ++r) {
      std::vector<std::optional<double>> gap(n);
      for (int i = 0; i < n; ++i) gap[i] = sector_gap(pts[i], p, r);
      for (int i = 1; i + 1 < n; ++i) {
        if (!gap[i - 1] || !gap[i] || !gap[i + 1]) continue;
        if (!(*gap[i] < *gap[i - 1] && *gap[i] <= *gap[i + 1])) continue;

        AvoidedCrossing c;
        c.parity = p;
        c.rank = r;
        double a = pts[i - 1].g, b = pts[i + 1].g;
        double best_g = pts[i].g, best_gap = *gap[i];
        ScanPoint best_pt = pts[i];
        if (resolver) {
          auto eval = [&](double g) -> std::pair<double, ScanPoint> {
            ScanPoint q = resolver(g);
            const auto d = sector_gap(q, p, r);
            if (!d) throw NumericalError("crossing refinement lost the level pair at g = " + std::to_string(g));
            return {*d, std::move(q)};
          };
          const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
          double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
          auto f1 = eval(x1), f2 = eval(x2);
          int iter = 0;
          while (b - a > g_tol) {
            if (++iter > 200) throw NumericalError("golden-section refinement did not converge");
            if (f1.first < f2.first) {
              b = x2;
              x2 = x1;
              f2 = std::move(f1);
              x1 = b - phi * (b - a);
              f1 = eval(x1);
            } else {
              a = x1;
              x1 = x2;
              f1 = std::move(f2);
              x2 = a + phi * (b - a);
              f2 = eval(x2);
            }
          }
          auto& best = f1.first < f2.first ? f1 : f2;
          best_g = f1.first < f2.first ? x1 : x2;
          if (best.first <= best_gap) {
            best_gap = best.first;
            best_pt = best.second;
          } else {
            best_g = pts[i].g;
          }
          const double edge = 2 * g_tol;
          c.bracketed = (best_g - pts[i - 1].g > edge) && (pts[i + 1].g - best_g > edge);
        }
        c.g_star = best_g;
        c.delta_e = best_gap;
        c.wide = best_gap > kWideCrossingThreshold;
        const auto idx = sector(best_pt, p);
        c.lower_level = idx[r];
        c.upper_level = idx[r + 1];

        // classes two grid steps away on either side
        const auto& left = pts[std::max(0, i - 2)];
        const auto& right = pts[std::min(n - 1, i + 2)];
        const auto li = sector(left, p), ri = sector(right, p);
        c.class_left = left.dominant[li[r]];
        c.upper_left = left.dominant[li[r + 1]];
        c.class_right = right.dominant[ri[r]];
        c.upper_right = right.dominant[ri[r + 1]];
        out.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.g_star < y.g_star; });
  return out;
}

void write_scan_csv(std::ostream& os, const GScan& scan) {
  const int k = scan.levels;
  os << "g";
  for (int i = 1; i <= k; ++i) os << ",E_" << i;
  for (int i = 1; i <= k; ++i) os << ",parity_" << i;
  for (int i = 1; i <= k; ++i) os << ",class_" << i;
  os << '\n';
  os.precision(12);
  for (const auto& pt : scan.points) {
    os << pt.g;
    for (int i = 0; i < k; ++i) os << ',' << (i < pt.energies.size() ? pt.energies(i) : std::nan(""));
    for (int i = 0; i < k; ++i) os << ',' << (i < static_cast<int>(pt.parity.size()) ? to_string(pt.parity[i]) : "");
    for (int i = 0; i < k; ++i) os << ',' << (i < static_cast<int>(pt.dominant.size()) ? to_string(pt.dominant[i]) : "");
    os << '\n';
  }
}

void write_crossings_csv(std::ostream& os, const std::vector<AvoidedCrossing>& crossings) {
  os << "pair,g_star,delta_E,kind,class_left,class_right\n";
  os.precision(10);
  for (const auto& c : crossings) {
    os << (c.lower_level + 1) << '-' << (c.upper_level + 1) << ',' << c.g_star << ',' << c.delta_e << ','
       << c.kind() << ',' << to_string(c.class_left) << ',' << to_string(c.class_right) << '\n';
  }
}

}  // namespace lq
