#pragma once

// Rasterized association cells.
//
// compute_association_map() assigns every pixel center to its serving AP.
// Rather than scoring all N APs at every pixel, the window is split
// recursively into tiles. For a tile with center c and circumradius R, an AP
// at torus distance d from c has, at every pixel of the tile,
//
//   log(P H_lo) - a log(d + R)  <=  score  <=  log(P H_hi) - a log(d - R),
//
// so any AP whose upper bound is below the best lower bound in the tile can
// be dropped for the whole tile. Surviving candidates stay in ascending index
// order and each pixel is scored exactly as serving_ap() would, so the map is
// identical to brute-force evaluation (including the smallest-index
// tie-break).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <vector>

#include "hetcell/association.hpp"
#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/pointprocess.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

struct AssociationMap {
  Window window{1.0, 2};
  std::vector<std::uint32_t> grid;  // row-major AP index per pixel
  std::vector<std::uint64_t> cell_pixel_counts;

  std::size_t resolution() const noexcept { return window.resolution(); }
  double pixel_area() const noexcept { return window.pixel_area(); }
  std::uint32_t at(std::size_t col, std::size_t row) const { return grid[window.pixel_index(col, row)]; }

  friend bool operator==(const AssociationMap& a, const AssociationMap& b) {
    return a.window.side_length() == b.window.side_length() && a.window.resolution() == b.window.resolution() &&
           a.grid == b.grid && a.cell_pixel_counts == b.cell_pixel_counts;
  }
};

struct CellRecord {
  std::size_t ap_index = 0;
  std::size_t tier = 0;
  double area = 0.0;
  bool contains_origin = false;
};

// Gains H_n(y) of one realization, either fixed per AP or drawn afresh for
// every (AP, pixel) pair from the gain stream.
class GainField {
 public:
  GainField(const PointPattern& pattern, std::span<const TierConfig> tiers, GainFieldMode mode, Seed gain_stream)
      : mode_(mode), stream_(gain_stream), tiers_(tiers), marks_(pattern.tier_marks) {
    if (mode == GainFieldMode::kPerAP) {
      if (pattern.gain_marks.size() == pattern.size()) {
        per_ap_ = pattern.gain_marks;
      } else {
        per_ap_.resize(pattern.size());
        for (std::size_t n = 0; n < pattern.size(); ++n) {
          per_ap_[n] = field_gain(tiers[marks_[n]].fading, stream_, n, 0);
        }
      }
    }
  }

  GainFieldMode mode() const noexcept { return mode_; }

  double gain(std::size_t ap, std::size_t pixel) const {
    if (mode_ == GainFieldMode::kPerAP) return per_ap_[ap];
    return field_gain(tiers_[marks_[ap]].fading, stream_, ap, static_cast<std::uint64_t>(pixel) + 1);
  }

  // log H at a pixel, drawn directly in the log domain (per-evaluation-point mode).
  double pixel_log_gain(std::size_t ap, std::size_t pixel) const {
    return field_log_gain(tiers_[marks_[ap]].fading, stream_, ap, static_cast<std::uint64_t>(pixel) + 1);
  }

  std::vector<double> gains_at_pixel(std::size_t pixel) const {
    std::vector<double> g(marks_.size());
    for (std::size_t n = 0; n < g.size(); ++n) g[n] = gain(n, pixel);
    return g;
  }

  // Bounds on log H_n(y) over all y.
  LogGainBounds log_bounds(std::size_t ap) const {
    if (mode_ == GainFieldMode::kPerAP) {
      const double l = std::log(per_ap_[ap]);
      return {l, l};
    }
    return gain_log_bounds(tiers_[marks_[ap]].fading);
  }

 private:
  GainFieldMode mode_;
  Seed stream_;
  std::span<const TierConfig> tiers_;
  std::vector<std::size_t> marks_;
  std::vector<double> per_ap_;
};

// Argmax of SIR over a candidate subset. `power` are absolute received powers
// of the candidates; `far_field` is the interference from all other APs.
inline std::size_t sir_argmax(std::span<const double> power, double far_field) {
  double total = far_field;
  for (std::size_t k = 0; k < power.size(); ++k) {
    if (std::isinf(power[k])) return k;
    total += power[k];
  }
  std::size_t best = 0;
  double best_sir = -1.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double interference = total - power[k];
    const double sir = interference > 0.0 ? power[k] / interference : kInfiniteScore;
    if (sir > best_sir) {
      best_sir = sir;
      best = k;
    }
  }
  return best;
}

namespace detail {

class MapBuilder {
 public:
  MapBuilder(const PointPattern& pattern, std::span<const TierConfig> tiers, AssociationStrategy strategy,
             const GainField& gains, const Window& window)
      : pattern_(pattern), strategy_(strategy), gains_(gains), window_(window) {
    const LinkParameters links = link_parameters(pattern, tiers, strategy);
    const std::size_t n = pattern.size();
    per_pixel_gain_ = strategy != AssociationStrategy::kNearest && gains.mode() == GainFieldMode::kPerEvaluationPoint;
    base_.resize(n);
    lower_base_.resize(n);
    upper_base_.resize(n);
    exponent_ = links.exponent;
    for (std::size_t i = 0; i < n; ++i) {
      if (strategy == AssociationStrategy::kNearest) {
        base_[i] = lower_base_[i] = upper_base_[i] = 0.0;
      } else if (!per_pixel_gain_) {
        base_[i] = links.log_power[i] + std::log(gains.gain(i, 0));
        lower_base_[i] = upper_base_[i] = base_[i];
      } else {
        const LogGainBounds b = gains.log_bounds(i);
        base_[i] = links.log_power[i];
        lower_base_[i] = base_[i] + b.lower;
        upper_base_[i] = base_[i] + b.upper;
      }
    }
  }

  AssociationMap build() {
    AssociationMap map{window_, {}, {}};
    const std::size_t res = window_.resolution();
    map.grid.assign(res * res, 0);
    grid_ = map.grid.data();

    std::vector<std::uint32_t> all(pattern_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    levels_.resize(2 * static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(res)))) + 4);
    visit(0, 0, res, res, all, 0.0, 0);

    map.cell_pixel_counts.assign(pattern_.size(), 0);
    for (std::uint32_t ap : map.grid) ++map.cell_pixel_counts[ap];
    return map;
  }

 private:
  static constexpr std::size_t kLeafSide = 4;

  double score_at(std::uint32_t ap, Point p, std::size_t pixel) const {
    const double d = window_.torus_distance(p, pattern_.points[ap]);
    const double log_pg = per_pixel_gain_ ? base_[ap] + gains_.pixel_log_gain(ap, pixel) : base_[ap];
    return log_received_power(log_pg, exponent_[ap], d);
  }

  void fill(std::size_t col0, std::size_t row0, std::size_t ncols, std::size_t nrows, std::uint32_t ap) {
    const std::size_t res = window_.resolution();
    for (std::size_t r = row0; r < row0 + nrows; ++r) {
      std::fill_n(grid_ + r * res + col0, ncols, ap);
    }
  }

  void evaluate_pixels(std::size_t col0, std::size_t row0, std::size_t ncols, std::size_t nrows,
                       std::span<const std::uint32_t> cand, double far_field) {
    std::vector<double> s(cand.size());
    for (std::size_t r = row0; r < row0 + nrows; ++r) {
      for (std::size_t c = col0; c < col0 + ncols; ++c) {
        const Point p = window_.pixel_center(c, r);
        const std::size_t pixel = window_.pixel_index(c, r);
        for (std::size_t k = 0; k < cand.size(); ++k) s[k] = score_at(cand[k], p, pixel);
        std::size_t best;
        if (strategy_ == AssociationStrategy::kMaxSIR) {
          for (double& v : s) v = std::exp(v);
          best = sir_argmax(s, far_field);
        } else {
          best = first_argmax(s);
        }
        grid_[pixel] = cand[best];
      }
    }
  }

  void visit(std::size_t col0, std::size_t row0, std::size_t ncols, std::size_t nrows,
             std::span<const std::uint32_t> parent, double far_field, std::size_t depth) {
    if (parent.size() == 1) {
      fill(col0, row0, ncols, nrows, parent.front());
      return;
    }
    const double h = window_.pixel_size();
    const Point center{(static_cast<double>(col0) + 0.5 * static_cast<double>(ncols)) * h,
                       (static_cast<double>(row0) + 0.5 * static_cast<double>(nrows)) * h};
    const double ex = 0.5 * static_cast<double>(ncols - 1) * h;
    const double ey = 0.5 * static_cast<double>(nrows - 1) * h;
    const double radius = std::sqrt(ex * ex + ey * ey) * (1.0 + 1e-12) + 1e-12 * window_.side_length();

    // Lower bound of the tile's best score.
    dist_.resize(parent.size());
    double best_lower = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < parent.size(); ++k) {
      const std::uint32_t ap = parent[k];
      const double d = window_.torus_distance(center, pattern_.points[ap]);
      dist_[k] = d;
      best_lower = std::max(best_lower, log_received_power(lower_base_[ap], exponent_[ap], d + radius));
    }
    const double slack = 1e-9 * std::max(1.0, std::fabs(best_lower));

    auto& kept = levels_[depth];
    kept.clear();
    double pruned_power = 0.0;
    for (std::size_t k = 0; k < parent.size(); ++k) {
      const std::uint32_t ap = parent[k];
      const double d = dist_[k];
      const double upper = d <= radius ? kInfiniteScore : log_received_power(upper_base_[ap], exponent_[ap], d - radius);
      if (upper >= best_lower - slack) {
        kept.push_back(ap);
      } else if (strategy_ == AssociationStrategy::kMaxSIR) {
        pruned_power += std::exp(log_received_power(base_[ap], exponent_[ap], d));
      }
    }
    far_field += pruned_power;

    if (kept.size() == 1) {
      fill(col0, row0, ncols, nrows, kept.front());
      return;
    }
    if (ncols <= kLeafSide && nrows <= kLeafSide) {
      evaluate_pixels(col0, row0, ncols, nrows, kept, far_field);
      return;
    }
    // The child calls reuse deeper level buffers; `kept` stays valid.
    const std::size_t c_half = ncols / 2, r_half = nrows / 2;
    const std::size_t cols[2][2] = {{col0, c_half}, {col0 + c_half, ncols - c_half}};
    const std::size_t rows[2][2] = {{row0, r_half}, {row0 + r_half, nrows - r_half}};
    for (const auto& rr : rows) {
      for (const auto& cc : cols) {
        if (cc[1] == 0 || rr[1] == 0) continue;
        visit(cc[0], rr[0], cc[1], rr[1], kept, far_field, depth + 1);
      }
    }
  }

  const PointPattern& pattern_;
  AssociationStrategy strategy_;
  const GainField& gains_;
  const Window& window_;
  bool per_pixel_gain_ = false;
  std::vector<double> base_, lower_base_, upper_base_, exponent_;
  std::vector<std::vector<std::uint32_t>> levels_;
  std::vector<double> dist_;
  std::uint32_t* grid_ = nullptr;
};

}  // namespace detail

inline AssociationMap compute_association_map(const PointPattern& pattern, std::span<const TierConfig> tiers,
                                              AssociationStrategy strategy, const GainField& gains,
                                              const Window& window) {
  if (pattern.empty()) throw EmptyPatternError("cannot build an association map without access points");
  if (pattern.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("too many access points");
  if (strategy != AssociationStrategy::kNearest) {
    for (std::size_t mark : pattern.tier_marks) {
      if (mark >= tiers.size()) throw InvalidArgument("tier mark out of range");
    }
  }
  detail::MapBuilder builder(pattern, tiers, strategy, gains, window);
  return builder.build();
}

inline AssociationMap compute_association_map(const PointPattern& pattern, std::span<const TierConfig> tiers,
                                              AssociationStrategy strategy, GainFieldMode gain_mode,
                                              const Window& window, Seed gain_stream) {
  const GainField gains(pattern, tiers, gain_mode, gain_stream);
  return compute_association_map(pattern, tiers, strategy, gains, window);
}

// One record per AP; the record whose cell holds the window reference point
// has contains_origin set.
inline std::vector<CellRecord> cell_areas(const AssociationMap& map, const PointPattern& pattern) {
  if (map.cell_pixel_counts.size() != pattern.size() || pattern.tier_marks.size() != pattern.size()) {
    throw InvalidArgument("association map and point pattern come from different realizations");
  }
  const std::uint32_t origin_ap = map.grid[map.window.pixel_containing(map.window.reference_point())];
  std::vector<CellRecord> cells(pattern.size());
  for (std::size_t n = 0; n < pattern.size(); ++n) {
    cells[n] = {n, pattern.tier_marks[n], static_cast<double>(map.cell_pixel_counts[n]) * map.pixel_area(),
                n == origin_ap};
  }
  return cells;
}

// Cell containing `point` (default: the window reference point).
inline CellRecord zero_cell(const AssociationMap& map, const PointPattern& pattern, Point point) {
  if (!map.window.contains(point)) throw InvalidArgument("zero-cell reference point lies outside the window");
  if (map.cell_pixel_counts.size() != pattern.size()) {
    throw InvalidArgument("association map and point pattern come from different realizations");
  }
  const std::uint32_t ap = map.grid[map.window.pixel_containing(point)];
  return {ap, pattern.tier_marks[ap], static_cast<double>(map.cell_pixel_counts[ap]) * map.pixel_area(), true};
}

inline CellRecord zero_cell(const AssociationMap& map, const PointPattern& pattern) {
  return zero_cell(map, pattern, map.window.reference_point());
}

// Text raster: "width height side_length" then one row of AP indices per line.
inline void write_raster(std::ostream& out, const AssociationMap& map) {
  const std::size_t res = map.resolution();
  out << res << ' ' << res << ' ' << map.window.side_length() << '\n';
  for (std::size_t r = 0; r < res; ++r) {
    for (std::size_t c = 0; c < res; ++c) {
      if (c) out << ' ';
      out << map.at(c, r);
    }
    out << '\n';
  }
}

}  // namespace hetcell
