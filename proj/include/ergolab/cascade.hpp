#pragma once

// Cylindrical cascades (x, a) -> (Sx, a + f(x)) and skew products
// R(x, y) = (Sx, T^{f(x)} y) over a rank-one base S.
//
// Two bases are supported:
//  * odometer: cuts r_n, no spacers. A point is a digit path of fixed depth
//    D, identified with the integer x = sum_n d_n h_n in [0, h_{D+1}); S adds
//    one with carry and is undefined past the all-maximal path.
//  * tower: a built rank-one view at a fixed stage J; a point is a level of
//    that tower and S is undefined on the top level.
// Either way a point is an integer in [0, extent()) and S^m x = x + m.

#include "ergolab/rank_one.hpp"

#include <cstdint>
#include <istream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ergolab::cascade {

class BaseSystem {
 public:
  enum class Kind { Odometer, Tower };

  /// Constant radix r at every stage, points of `depth` digits.
  static BaseSystem odometer(std::uint32_t radix, std::size_t depth);
  /// Rank-one view realized at `stage` (<= view.stage()).
  static BaseSystem tower(rank_one::TowerView view, std::size_t stage);

  Kind kind() const noexcept { return kind_; }
  /// Number of points; S^m x is defined iff 0 <= x + m < extent().
  std::uint64_t extent() const noexcept { return extent_; }
  /// The underlying rank-one view (for the odometer: metadata only).
  const rank_one::TowerView& view() const noexcept { return view_; }
  std::size_t point_stage() const noexcept { return point_stage_; }

  /// x + m or UndefinedOrbit.
  std::uint64_t step(std::uint64_t x, std::int64_t m) const;

  /// Little-endian digits d_1..d_D of an odometer point.
  std::vector<std::uint32_t> digits(std::uint64_t x) const;
  std::uint64_t from_digits(std::span<const std::uint32_t> digits) const;

  /// Seeded uniform points.
  std::vector<std::uint64_t> sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  Kind kind_ = Kind::Odometer;
  rank_one::TowerView view_;
  std::size_t point_stage_ = 0;
  std::uint64_t extent_ = 0;
};

/// Integer function constant on the levels of stage `stage`.
struct CocycleFunction {
  std::size_t stage = 1;
  std::vector<std::int64_t> values;

  /// sum_l values[l] * w_stage (unnormalized).
  Rational integral(const BaseSystem& base) const;
  /// Shape check, then ZeroMeanViolation unless integral == 0.
  void validate(const BaseSystem& base) const;
  /// Same function on the levels of a deeper stage; spacer levels get 0.
  CocycleFunction refine(const BaseSystem& base, std::size_t to) const;
  bool is_zero() const;
};

/// Rows `level,value`; an optional leading `stage,<j>` row names the stage
/// (default 1) and an optional `level,value` header is skipped. Every level
/// 0..n-1 must appear exactly once.
CocycleFunction parse_cocycle_csv(std::istream& in);
CocycleFunction load_cocycle_csv(const std::string& path);

/// Values of f along the points of the base: f at level x of the point stage.
class CocycleEvaluator {
 public:
  CocycleEvaluator(const BaseSystem& base, const CocycleFunction& f);

  std::int64_t operator()(std::uint64_t x) const;

 private:
  const BaseSystem* base_;
  std::vector<std::int64_t> values_;  // per level of the cocycle stage
  std::uint64_t period_ = 0;          // odometer: h_stage
  std::vector<std::int64_t> labels_;  // tower: cocycle-stage label per point, -1 spacer
};

struct OrbitRecord {
  std::uint64_t start = 0;
  std::uint64_t length = 0;
  std::vector<std::int64_t> sums;          // F(x, 0..length)
  std::vector<std::uint64_t> zero_returns;  // q_0 = 0 < q_1 < ...

  /// Number of returns excluding the trivial q_0.
  std::size_t returns() const noexcept { return zero_returns.empty() ? 0 : zero_returns.size() - 1; }
};

/// F(x, i) = f(x) + f(Sx) + ... + f(S^{i-1} x) for i = 0..length.
/// Throws UndefinedOrbit if some S^i x, i < length, is undefined.
OrbitRecord orbit_sums(const BaseSystem& base, const CocycleFunction& f, std::uint64_t x, std::uint64_t length);

struct PointOutcome {
  std::uint64_t start = 0;
  bool defined = true;
  std::uint64_t reached = 0;  // steps available when undefined
  std::size_t returns = 0;
};

struct RecurrenceResult {
  Rational fraction;  // among defined points
  std::size_t qualifying = 0;
  std::size_t defined = 0;
  std::vector<PointOutcome> per_point;
};

/// Fraction of sample points with at least `min_returns` zero returns
/// (q_i in [1, length]). Undefined orbits are excluded and reported.
RecurrenceResult recurrence_statistic(const BaseSystem& base, const CocycleFunction& f,
                                      std::span<const std::uint64_t> sample, std::uint64_t length,
                                      std::size_t min_returns);

struct SkewQuery {
  rank_one::LevelSet base_a;   // on base.view()
  rank_one::LevelSet base_c;
  rank_one::LevelSet fiber_b;  // on the fiber view
  rank_one::LevelSet fiber_d;
  std::int64_t k = 0;
  std::size_t fiber_eval_stage = 0;  // 0: deepest built stage
  rank_one::CorrelationOptions fiber_options;
};

/// Enclosure of mu((A x B) cap R^k (C x D)) for R(x, y) = (Sx, T^{f(x)} y).
rank_one::CorrelationBound skew_correlation(const BaseSystem& base, const rank_one::TowerView& fiber,
                                            const CocycleFunction& f, const SkewQuery& query);

}  // namespace ergolab::cascade
