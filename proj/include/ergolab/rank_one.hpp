#pragma once

// Rank-one cutting-and-stacking transformations realized exactly.
//
// Stage n (n >= 1) is a tower of h_n levels of width w_n. Going from stage n
// to stage n+1 the tower is cut into r_n columns of width w_n / r_n, s_{n,c}
// spacer levels are put on top of column c, and the columns are stacked left
// to right. Level l of stage n therefore reappears at stage n+1 at indices
// o_c + l with o_c = sum_{d<c} (h_n + s_{n,d}). T moves every point one level
// up; it is undefined on the top level of every finite stage.
//
// Masses are kept unnormalized; every public measure/correlation is divided
// by the construction's total mass on output.

#include "ergolab/level_bits.hpp"
#include "ergolab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ergolab::rank_one {

struct SpacerProfile {
  std::uint32_t cuts = 0;
  std::vector<std::uint64_t> spacers;  // spacers[c] levels above column c

  void validate() const;
  std::uint64_t spacer_total() const;
  friend bool operator==(const SpacerProfile&, const SpacerProfile&) = default;
};

struct Construction {
  std::uint64_t initial_height = 1;
  Rational initial_base_width{1};
  std::vector<SpacerProfile> stages;
  /// When set, `stages` repeats forever and the recipe has no last stage.
  bool periodic = false;

  /// Profile that turns stage n into stage n+1 (n >= 1).
  const SpacerProfile& profile(std::size_t n) const;
  /// Deepest buildable stage, or nullopt for periodic recipes.
  std::optional<std::size_t> max_stage() const;
  void validate() const;
};

struct BuildOptions {
  Rational mass_cap_factor{4};
  std::uint64_t budget_levels = 10'000'000;
  /// Stages of metadata (heights, offsets) computed past the bitset stage,
  /// used to resolve truncated shifts without materializing deeper towers.
  std::size_t lookahead = 6;
};

/// Immutable realization of stages 1..stage() (bitset budget) with
/// metadata up to meta_depth().
class TowerView {
 public:
  std::size_t stage() const noexcept { return stage_; }
  std::uint64_t height() const { return height(stage_); }
  const Rational& level_width() const { return level_width(stage_); }
  Rational tower_mass() const { return tower_mass(stage_); }
  const Rational& total_mass() const noexcept { return total_mass_; }

  std::size_t meta_depth() const noexcept { return meta_.size(); }
  std::uint64_t height(std::size_t n) const { return meta(n).height; }
  const Rational& level_width(std::size_t n) const { return meta(n).width; }
  Rational tower_mass(std::size_t n) const;
  /// Mass not yet inside the stage-n tower.
  Rational residual_mass(std::size_t n) const { return total_mass_ - tower_mass(n); }
  const SpacerProfile& profile(std::size_t n) const { return construction_.profile(n); }
  /// Column offsets o_c of stage n inside stage n+1 (n < meta_depth()).
  std::span<const std::uint64_t> offsets(std::size_t n) const { return meta(n).offsets; }
  /// Number of stage-`to` levels per stage-`from` level: prod_{t=from}^{to-1} r_t.
  std::uint64_t multiplicity(std::size_t from, std::size_t to) const;

  /// Maps a level index of stage `from` to the stage-`to` level containing
  /// it (to <= from); nullopt when it lies in a spacer added after stage `to`.
  std::optional<std::uint64_t> locate(std::size_t from, std::uint64_t index, std::size_t to) const;

  const Construction& construction() const noexcept { return construction_; }

 private:
  friend TowerView build(const Construction&, std::size_t, const BuildOptions&);

  struct StageMeta {
    std::uint64_t height = 0;
    Rational width;
    std::vector<std::uint64_t> offsets;
  };
  const StageMeta& meta(std::size_t n) const;

  Construction construction_;
  std::size_t stage_ = 0;
  Rational total_mass_;
  std::vector<StageMeta> meta_;  // meta_[n-1] describes stage n
};

TowerView build(const Construction& construction, std::size_t depth, const BuildOptions& options = {});

/// Total mass of the (possibly infinite) recipe: exact limit for periodic
/// recipes, mass of the last tower otherwise.
Rational total_mass(const Construction& construction);

// ---------------------------------------------------------------------------
// Level sets

struct LevelSet {
  std::size_t stage = 0;
  LevelBits levels;

  friend bool operator==(const LevelSet&, const LevelSet&) = default;
};

LevelSet empty_set(const TowerView& view, std::size_t stage);
LevelSet full_tower(const TowerView& view, std::size_t stage);
/// Levels [lo, hi) of stage `stage`.
LevelSet level_range(const TowerView& view, std::size_t stage, std::uint64_t lo, std::uint64_t hi);
LevelSet make_level_set(const TowerView& view, std::size_t stage, std::span<const std::uint64_t> levels);

/// Unnormalized mass |levels| * w_stage.
Rational measure(const TowerView& view, const LevelSet& set);
/// measure / total_mass.
Rational normalized_measure(const TowerView& view, const LevelSet& set);

LevelSet refine(const TowerView& view, const LevelSet& set, std::size_t to);

struct ShiftResult {
  LevelSet set;
  Rational lost_mass;  // unnormalized mass pushed past the tower
};

/// Image T^k(set) restricted to the tower of the same stage.
ShiftResult shift(const TowerView& view, const LevelSet& set, std::int64_t k);

// ---------------------------------------------------------------------------
// Correlations

struct CorrelationBound {
  Rational lower;
  Rational upper;
  std::size_t eval_stage = 0;

  Rational width() const { return upper - lower; }
  Rational midpoint() const { return (lower + upper) / 2; }
  bool contains(const Rational& value) const { return lower <= value && value <= upper; }
  bool contains(const CorrelationBound& inner) const { return lower <= inner.lower && inner.upper <= upper; }
};

struct CorrelationOptions {
  /// Extra stages used to resolve levels whose shifted membership is cut
  /// off by the tower boundary. 0 reproduces plain truncation.
  std::size_t refine_depth = 0;
};

/// Certified enclosure of mu(cap_i T^{k_i} A_i) / mu(X) evaluated at `eval_stage`.
CorrelationBound correlation(const TowerView& view, std::span<const LevelSet> sets, std::span<const std::int64_t> shifts,
                             std::size_t eval_stage, const CorrelationOptions& options = {});

/// Raises the evaluation stage (then the refine depth) until the width is
/// below `tolerance` or the view is exhausted. Returns the tightest bound seen.
CorrelationBound auto_correlation(const TowerView& view, std::span<const LevelSet> sets,
                                  std::span<const std::int64_t> shifts, const Rational& tolerance);

/// Counts of the joint distribution of (level of x, level of T^{-k} x) over
/// stage-`set_stage` levels, evaluated at `eval_stage`. Entry (b, a) is in
/// units of w_{eval_stage + refine_depth}; `undecided[b]` holds the mass of
/// points at level b whose preimage could not be placed.
struct TransitionTable {
  std::size_t set_stage = 0;
  std::uint64_t levels = 0;
  std::int64_t shift = 0;
  CorrelationBound unit;  // lower = upper = unit mass / total mass
  std::vector<std::uint64_t> counts;  // row-major [b * levels + a]
  std::vector<std::uint64_t> undecided;

  std::uint64_t at(std::uint64_t b, std::uint64_t a) const { return counts[b * levels + a]; }
};

TransitionTable transition_table(const TowerView& view, std::size_t set_stage, std::int64_t k, std::size_t eval_stage,
                                 const CorrelationOptions& options = {});

// ---------------------------------------------------------------------------
// Weak limits

struct PowerWeight {
  std::int64_t power = 0;
  Rational weight;
};

/// Q = sum_p a_p T^p + theta_weight * Theta.
struct WeakLimitTarget {
  std::vector<PowerWeight> powers;
  Rational theta_weight{0};

  void validate() const;
};

struct WeakLimitResult {
  /// max over pairs of |<T^k A, B> - <Q A, B>| (midpoints) plus half the
  /// accumulated enclosure width: an upper bound on the true deviation.
  Rational deviation;
  std::size_t worst_pair = 0;
};

using SetPair = std::pair<LevelSet, LevelSet>;

WeakLimitResult weak_limit_deviation(const TowerView& view, std::int64_t k, const WeakLimitTarget& target,
                                     std::span<const SetPair> family, std::size_t eval_stage,
                                     const CorrelationOptions& options = {});

struct WeakLimitScan {
  std::vector<std::int64_t> candidates;
  std::vector<Rational> deviations;
  std::size_t best = 0;

  std::int64_t best_shift() const { return candidates.at(best); }
  const Rational& best_deviation() const { return deviations.at(best); }
};

/// Scans k in {h_j - 1, h_j, h_j + 1} and reports the best fit.
WeakLimitScan detect_weak_limit(const TowerView& view, std::size_t j, const WeakLimitTarget& target,
                                std::span<const SetPair> family, std::size_t eval_stage,
                                const CorrelationOptions& options = {});

/// Every pair of single levels of stage `stage`.
std::vector<SetPair> single_level_family(const TowerView& view, std::size_t stage);

// ---------------------------------------------------------------------------
// Mixing deviation scan

struct MixingScan {
  Rational d;
  std::uint64_t grid_points = 0;  // |Q(eps, h)|
  std::vector<std::pair<std::int64_t, std::int64_t>> offenders;
};

/// Enumerates (z, w) in [0, h]^2 with z, w, |z - w| > eps*h and counts those
/// where |mu(A cap T^z B cap T^w C) - mu(A)mu(B)mu(C)| > eps (midpoints).
MixingScan mixing_scan(const TowerView& view, const LevelSet& a, const LevelSet& b, const LevelSet& c, std::int64_t h,
                       const Rational& eps, std::size_t eval_stage);

// ---------------------------------------------------------------------------
// Presets

Construction chacon();
Construction asym5();
/// asym5 stages interleaved with `relay`-cut stages without spacers. The
/// top of a 5-column stage is then followed directly by the next copy's
/// first column except on a 1/relay fraction; odd stages carry the pattern.
Construction asym5_junction(std::uint32_t relay = 8);
/// Spacer profile (0, 1, ..., r_n - 1) for each supplied r_n.
Construction staircase(std::span<const std::uint32_t> cuts);
/// Recognizes "chacon", "asym5", "asym5-junction[:relay]", "staircase"
/// (r_n = n + 1, nine stages) and "staircase:r1,r2,...". Throws
/// UnknownPreset otherwise.
Construction preset(const std::string& name);

/// r_n^2 / h_n for n = 1..view.meta_depth()-1.
std::vector<Rational> adams_ratios(const TowerView& view);

}  // namespace ergolab::rank_one
