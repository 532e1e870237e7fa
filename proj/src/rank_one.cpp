#include "ergolab/rank_one.hpp"

#include "ergolab/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ergolab::rank_one {

namespace {

constexpr std::uint64_t kHeightLimit = std::uint64_t{1} << 62;

std::uint64_t abs_shift(std::int64_t k) {
  return k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
}

bool in_tower(std::int64_t index, std::uint64_t height) {
  return index >= 0 && static_cast<std::uint64_t>(index) < height;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

void SpacerProfile::validate() const {
  if (cuts < 2) fail(ErrorCode::ConfigError, "spacer profile needs at least 2 cuts, got " + std::to_string(cuts));
  if (spacers.size() != cuts) {
    fail(ErrorCode::ConfigError, "spacer profile has " + std::to_string(spacers.size()) + " entries for " +
                                     std::to_string(cuts) + " cuts");
  }
}

std::uint64_t SpacerProfile::spacer_total() const {
  return std::accumulate(spacers.begin(), spacers.end(), std::uint64_t{0});
}

const SpacerProfile& Construction::profile(std::size_t n) const {
  if (n == 0 || stages.empty()) fail(ErrorCode::StageOrder, "no profile for stage " + std::to_string(n));
  if (periodic) return stages[(n - 1) % stages.size()];
  if (n > stages.size()) fail(ErrorCode::StageOrder, "recipe ends before stage " + std::to_string(n + 1));
  return stages[n - 1];
}

std::optional<std::size_t> Construction::max_stage() const {
  if (periodic) return std::nullopt;
  return stages.size() + 1;
}

void Construction::validate() const {
  if (initial_height == 0) fail(ErrorCode::EmptyRecipe, "initial tower has no levels");
  if (initial_base_width <= 0) fail(ErrorCode::ConfigError, "initial base width must be positive");
  if (periodic && stages.empty()) fail(ErrorCode::EmptyRecipe, "periodic recipe without stages");
  for (const auto& p : stages) p.validate();
}

Rational total_mass(const Construction& c) {
  Rational mass = Rational(c.initial_height) * c.initial_base_width;
  Rational width = c.initial_base_width;
  if (!c.periodic) {
    for (const auto& p : c.stages) {
      width /= p.cuts;
      mass += width * Rational(p.spacer_total());
    }
    return mass;
  }
  // One period adds sum_t w_{t+1} S_t; later periods are scaled by R^-m.
  Rational period_mass = 0;
  Rational ratio = 1;
  for (const auto& p : c.stages) {
    width /= p.cuts;
    ratio *= p.cuts;
    period_mass += width * Rational(p.spacer_total());
  }
  return mass + period_mass * ratio / (ratio - 1);
}

// ---------------------------------------------------------------------------
// TowerView

const TowerView::StageMeta& TowerView::meta(std::size_t n) const {
  if (n == 0 || n > meta_.size()) {
    fail(ErrorCode::StageOrder, "stage " + std::to_string(n) + " not realized (depth " + std::to_string(meta_.size()) + ")");
  }
  return meta_[n - 1];
}

Rational TowerView::tower_mass(std::size_t n) const { return Rational(height(n)) * level_width(n); }

std::uint64_t TowerView::multiplicity(std::size_t from, std::size_t to) const {
  std::uint64_t m = 1;
  for (std::size_t t = from; t < to; ++t) m *= offsets(t).size();
  return m;
}

std::optional<std::uint64_t> TowerView::locate(std::size_t from, std::uint64_t index, std::size_t to) const {
  if (to > from) fail(ErrorCode::StageOrder, "locate goes from a stage to a shallower one");
  for (std::size_t t = from; t > to; --t) {
    const auto& off = meta_[t - 2].offsets;  // stage t-1 inside stage t
    const auto it = std::upper_bound(off.begin(), off.end(), index);
    const std::uint64_t rel = index - *(it - 1);
    if (rel >= meta_[t - 2].height) return std::nullopt;
    index = rel;
  }
  return index;
}

TowerView build(const Construction& construction, std::size_t depth, const BuildOptions& options) {
  if (depth == 0) fail(ErrorCode::EmptyRecipe, "build depth 0 has no tower");
  construction.validate();
  const auto last = construction.max_stage();
  if (last && depth > *last) {
    fail(ErrorCode::StageOrder,
         "recipe defines stages 1.." + std::to_string(*last) + ", requested " + std::to_string(depth));
  }

  TowerView view;
  view.construction_ = construction;
  view.stage_ = depth;
  view.total_mass_ = total_mass(construction);
  const Rational initial = Rational(construction.initial_height) * construction.initial_base_width;
  if (view.total_mass_ > options.mass_cap_factor * initial) {
    fail(ErrorCode::DivergentMass, "committed mass " + to_string(view.total_mass_) + " exceeds cap " +
                                       to_string(options.mass_cap_factor * initial));
  }

  std::size_t meta_depth = depth + options.lookahead;
  if (last) meta_depth = std::min(meta_depth, *last);

  view.meta_.push_back({construction.initial_height, construction.initial_base_width, {}});
  for (std::size_t n = 1; n < meta_depth; ++n) {
    const SpacerProfile& p = construction.profile(n);
    auto& cur = view.meta_.back();
    std::vector<std::uint64_t> offsets(p.cuts);
    std::uint64_t pos = 0;
    bool overflow = false;
    for (std::uint32_t c = 0; c < p.cuts; ++c) {
      offsets[c] = pos;
      pos += cur.height + p.spacers[c];
      if (pos > kHeightLimit) overflow = true;
    }
    if (overflow) {
      if (n < depth) fail(ErrorCode::BudgetExceeded, "tower height overflows at stage " + std::to_string(n + 1));
      break;
    }
    cur.offsets = std::move(offsets);
    Rational width = cur.width / p.cuts;
    view.meta_.push_back({pos, std::move(width), {}});
  }
  if (view.height(depth) > options.budget_levels) {
    fail(ErrorCode::BudgetExceeded, "stage " + std::to_string(depth) + " has " + std::to_string(view.height(depth)) +
                                        " levels, budget is " + std::to_string(options.budget_levels));
  }
  return view;
}

// ---------------------------------------------------------------------------
// Level sets

LevelSet empty_set(const TowerView& view, std::size_t stage) { return {stage, LevelBits(view.height(stage))}; }

LevelSet full_tower(const TowerView& view, std::size_t stage) {
  LevelSet s = empty_set(view, stage);
  s.levels.set_all();
  return s;
}

LevelSet level_range(const TowerView& view, std::size_t stage, std::uint64_t lo, std::uint64_t hi) {
  LevelSet s = empty_set(view, stage);
  if (hi > s.levels.size()) fail(ErrorCode::ConfigError, "level range exceeds tower height");
  s.levels.set_range(lo, hi);
  return s;
}

LevelSet make_level_set(const TowerView& view, std::size_t stage, std::span<const std::uint64_t> levels) {
  LevelSet s = empty_set(view, stage);
  for (std::uint64_t l : levels) {
    if (l >= s.levels.size()) {
      fail(ErrorCode::ConfigError, "level " + std::to_string(l) + " outside stage " + std::to_string(stage));
    }
    s.levels.set(l);
  }
  return s;
}

Rational measure(const TowerView& view, const LevelSet& set) {
  return Rational(set.levels.count()) * view.level_width(set.stage);
}

Rational normalized_measure(const TowerView& view, const LevelSet& set) { return measure(view, set) / view.total_mass(); }

LevelSet refine(const TowerView& view, const LevelSet& set, std::size_t to) {
  if (to < set.stage) {
    fail(ErrorCode::StageOrder, "cannot refine stage " + std::to_string(set.stage) + " to " + std::to_string(to));
  }
  if (to > view.stage()) fail(ErrorCode::StageOrder, "stage " + std::to_string(to) + " is beyond the built view");
  LevelBits cur = set.levels;
  for (std::size_t n = set.stage; n < to; ++n) {
    LevelBits next(view.height(n + 1));
    for (std::uint64_t o : view.offsets(n)) next.or_shifted(cur, static_cast<std::int64_t>(o));
    cur = std::move(next);
  }
  return {to, std::move(cur)};
}

ShiftResult shift(const TowerView& view, const LevelSet& set, std::int64_t k) {
  const std::uint64_t h = view.height(set.stage);
  if (abs_shift(k) >= h) {
    fail(ErrorCode::ShiftTooLarge, "|k| = " + std::to_string(abs_shift(k)) + " >= h = " + std::to_string(h));
  }
  LevelSet out{set.stage, set.levels.shifted(k)};
  Rational lost = Rational(set.levels.count() - out.levels.count()) * view.level_width(set.stage);
  return {std::move(out), std::move(lost)};
}

// ---------------------------------------------------------------------------
// Correlations

namespace {

/// Walks levels whose shifted membership falls outside the evaluation
/// tower into deeper stages until every condition is decided or the depth
/// budget runs out. Counts are in units of the deepest level width.
class BandResolver {
 public:
  BandResolver(const TowerView& view, std::span<const LevelBits> bits, std::span<const std::int64_t> shifts,
               std::size_t eval_stage, std::size_t last_stage)
      : view_(view), bits_(bits), shifts_(shifts), eval_(eval_stage), last_(last_stage) {
    units_.resize(last_stage + 1, 1);
    for (std::size_t m = last_stage; m-- > eval_stage;) units_[m] = units_[m + 1] * view.offsets(m).size();
  }

  std::uint64_t unit(std::size_t stage) const { return units_[stage]; }

  /// `pending` marks conditions not yet decided for the cell (stage, index).
  void resolve(std::size_t stage, std::uint64_t index, std::uint64_t pending) {
    const std::uint64_t h = view_.height(stage);
    std::uint64_t still = 0;
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
      if (!((pending >> i) & 1U)) continue;
      const std::int64_t q = static_cast<std::int64_t>(index) - shifts_[i];
      if (!in_tower(q, h)) {
        still |= std::uint64_t{1} << i;
        continue;
      }
      const auto level = view_.locate(stage, static_cast<std::uint64_t>(q), eval_);
      if (!level || !bits_[i].test(*level)) return;
    }
    if (still == 0) {
      lower += units_[stage];
      return;
    }
    if (stage == last_) {
      undecided += units_[stage];
      return;
    }
    for (std::uint64_t o : view_.offsets(stage)) resolve(stage + 1, o + index, still);
  }

  std::uint64_t lower = 0;
  std::uint64_t undecided = 0;

 private:
  const TowerView& view_;
  std::span<const LevelBits> bits_;
  std::span<const std::int64_t> shifts_;
  std::size_t eval_;
  std::size_t last_;
  std::vector<std::uint64_t> units_;
};

void check_depth(const TowerView& view, std::size_t eval_stage, std::size_t refine_depth) {
  if (eval_stage > view.stage()) {
    fail(ErrorCode::StageOrder, "evaluation stage " + std::to_string(eval_stage) + " beyond built stage " +
                                    std::to_string(view.stage()));
  }
  if (eval_stage + refine_depth > view.meta_depth()) {
    fail(ErrorCode::BudgetExceeded, "refine depth " + std::to_string(refine_depth) + " needs stage " +
                                        std::to_string(eval_stage + refine_depth) + ", metadata ends at " +
                                        std::to_string(view.meta_depth()));
  }
}

}  // namespace

CorrelationBound correlation(const TowerView& view, std::span<const LevelSet> sets, std::span<const std::int64_t> shifts,
                             std::size_t eval_stage, const CorrelationOptions& options) {
  if (sets.empty() || sets.size() != shifts.size()) {
    fail(ErrorCode::ConfigError, "correlation needs one shift per set");
  }
  if (sets.size() > 64) fail(ErrorCode::ConfigError, "at most 64 sets per correlation");
  check_depth(view, eval_stage, options.refine_depth);
  std::uint64_t shift_sum = 0;
  for (std::int64_t k : shifts) shift_sum += abs_shift(k);
  const std::uint64_t h = view.height(eval_stage);
  if (shift_sum >= h) {
    fail(ErrorCode::ShiftTooLarge, "sum |k_i| = " + std::to_string(shift_sum) + " >= h = " + std::to_string(h));
  }

  // T preserves mu, so only differences of shifts matter.
  std::vector<std::int64_t> rel(shifts.begin(), shifts.end());
  for (auto& k : rel) k -= shifts[0];

  std::vector<LevelBits> bits;
  bits.reserve(sets.size());
  for (const auto& s : sets) bits.push_back(refine(view, s, eval_stage).levels);

  LevelBits known(h);
  known.set_all();
  LevelBits candidate = known;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    LevelBits moved = bits[i].shifted(rel[i]);
    known &= moved;
    const std::uint64_t cut = abs_shift(rel[i]);
    if (rel[i] > 0) moved.set_range(0, cut);
    if (rel[i] < 0) moved.set_range(h - cut, h);
    candidate &= moved;
  }
  candidate.and_not(known);

  const std::size_t last = eval_stage + options.refine_depth;
  BandResolver resolver(view, bits, rel, eval_stage, last);
  std::uint64_t lower = known.count() * resolver.unit(eval_stage);
  std::uint64_t undecided = 0;
  if (options.refine_depth == 0) {
    undecided = candidate.count();
  } else {
    const std::uint64_t all = sets.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << sets.size()) - 1;
    candidate.for_each([&](std::uint64_t p) { resolver.resolve(eval_stage, p, all); });
    lower += resolver.lower;
    undecided = resolver.undecided;
  }
  const Rational unit = view.level_width(last) / view.total_mass();
  return {Rational(lower) * unit, Rational(lower + undecided) * unit, eval_stage};
}

CorrelationBound auto_correlation(const TowerView& view, std::span<const LevelSet> sets,
                                  std::span<const std::int64_t> shifts, const Rational& tolerance) {
  std::size_t start = 1;
  for (const auto& s : sets) start = std::max(start, s.stage);
  std::uint64_t shift_sum = 0;
  for (std::int64_t k : shifts) shift_sum += abs_shift(k);
  while (start <= view.stage() && view.height(start) <= shift_sum) ++start;
  if (start > view.stage()) fail(ErrorCode::ShiftTooLarge, "shifts exceed every built stage");

  std::optional<CorrelationBound> best;
  auto consider = [&](CorrelationBound b) {
    if (!best || b.width() < best->width()) best = std::move(b);
    return best->width() < tolerance;
  };
  for (std::size_t j = start; j <= view.stage(); ++j) {
    if (consider(correlation(view, sets, shifts, j))) return *best;
  }
  for (std::size_t d = 1; view.stage() + d <= view.meta_depth(); ++d) {
    if (consider(correlation(view, sets, shifts, view.stage(), {d}))) return *best;
  }
  return *best;
}

TransitionTable transition_table(const TowerView& view, std::size_t set_stage, std::int64_t k, std::size_t eval_stage,
                                 const CorrelationOptions& options) {
  if (set_stage > eval_stage) fail(ErrorCode::StageOrder, "set stage deeper than evaluation stage");
  check_depth(view, eval_stage, options.refine_depth);
  const std::uint64_t h = view.height(eval_stage);
  if (abs_shift(k) >= h) fail(ErrorCode::ShiftTooLarge, "|k| >= h at the evaluation stage");

  TransitionTable table;
  table.set_stage = set_stage;
  table.levels = view.height(set_stage);
  table.shift = k;
  table.counts.assign(table.levels * table.levels, 0);
  table.undecided.assign(table.levels, 0);

  // Stage-set_stage label of every eval-stage level (-1 for spacers).
  std::vector<std::int64_t> labels(table.levels);
  std::iota(labels.begin(), labels.end(), 0);
  for (std::size_t n = set_stage; n < eval_stage; ++n) {
    std::vector<std::int64_t> next(view.height(n + 1), -1);
    for (std::uint64_t o : view.offsets(n)) std::copy(labels.begin(), labels.end(), next.begin() + static_cast<std::ptrdiff_t>(o));
    labels = std::move(next);
  }

  const std::size_t last = eval_stage + options.refine_depth;
  std::vector<std::uint64_t> units(last + 1, 1);
  for (std::size_t m = last; m-- > eval_stage;) units[m] = units[m + 1] * view.offsets(m).size();

  struct Walker {
    const TowerView& view;
    TransitionTable& table;
    std::span<const std::uint64_t> units;
    std::size_t set_stage;
    std::size_t last;
    std::int64_t k;

    void resolve(std::size_t stage, std::uint64_t index, std::uint64_t b) {
      const std::int64_t q = static_cast<std::int64_t>(index) - k;
      if (in_tower(q, view.height(stage))) {
        if (auto a = view.locate(stage, static_cast<std::uint64_t>(q), set_stage)) {
          table.counts[b * table.levels + *a] += units[stage];
        }
        return;
      }
      if (stage == last) {
        table.undecided[b] += units[stage];
        return;
      }
      for (std::uint64_t o : view.offsets(stage)) resolve(stage + 1, o + index, b);
    }
  } walker{view, table, units, set_stage, last, k};

  for (std::uint64_t p = 0; p < h; ++p) {
    const std::int64_t b = labels[p];
    if (b < 0) continue;
    const std::int64_t q = static_cast<std::int64_t>(p) - k;
    if (in_tower(q, h)) {
      const std::int64_t a = labels[static_cast<std::uint64_t>(q)];
      if (a >= 0) table.counts[static_cast<std::uint64_t>(b) * table.levels + static_cast<std::uint64_t>(a)] += units[eval_stage];
    } else if (options.refine_depth == 0) {
      table.undecided[static_cast<std::uint64_t>(b)] += 1;
    } else {
      walker.resolve(eval_stage, p, static_cast<std::uint64_t>(b));
    }
  }
  const Rational unit = view.level_width(last) / view.total_mass();
  table.unit = {unit, unit, eval_stage};
  return table;
}

// ---------------------------------------------------------------------------
// Weak limits

void WeakLimitTarget::validate() const {
  Rational sum = theta_weight;
  if (theta_weight < 0) fail(ErrorCode::BadWeights, "negative Theta weight");
  for (const auto& p : powers) {
    if (p.weight < 0) fail(ErrorCode::BadWeights, "negative weight for power " + std::to_string(p.power));
    sum += p.weight;
  }
  if (sum != 1) fail(ErrorCode::BadWeights, "weights sum to " + to_string(sum) + ", expected 1/1");
}

namespace {

struct PairValue {
  Rational mid;
  Rational width;
};

/// <T^k chi_A, chi_B> = mu(B cap T^k A) through a transition table.
PairValue table_value(const TransitionTable& t, const LevelSet& a, const LevelSet& b) {
  std::uint64_t lower = 0;
  std::uint64_t undecided = 0;
  b.levels.for_each([&](std::uint64_t lb) {
    undecided += t.undecided[lb];
    a.levels.for_each([&](std::uint64_t la) { lower += t.at(lb, la); });
  });
  const Rational& unit = t.unit.lower;
  return {(Rational(2 * lower + undecided) * unit) / 2, Rational(undecided) * unit};
}

PairValue direct_value(const TowerView& view, std::int64_t k, const LevelSet& a, const LevelSet& b,
                       std::size_t eval_stage, const CorrelationOptions& options) {
  const LevelSet sets[] = {b, a};
  const std::int64_t shifts[] = {0, k};
  const auto bound = correlation(view, sets, shifts, eval_stage, options);
  return {bound.midpoint(), bound.width()};
}

constexpr std::uint64_t kTableLevelLimit = 2048;

}  // namespace

WeakLimitResult weak_limit_deviation(const TowerView& view, std::int64_t k, const WeakLimitTarget& target,
                                     std::span<const SetPair> family, std::size_t eval_stage,
                                     const CorrelationOptions& options) {
  target.validate();
  if (family.empty()) fail(ErrorCode::ConfigError, "weak-limit family is empty");

  const std::size_t stage = family.front().first.stage;
  const bool common_stage = std::all_of(family.begin(), family.end(), [&](const SetPair& p) {
    return p.first.stage == stage && p.second.stage == stage;
  });
  const bool use_tables = common_stage && view.height(stage) <= kTableLevelLimit;

  std::vector<TransitionTable> tables;
  if (use_tables) {
    tables.push_back(transition_table(view, stage, k, eval_stage, options));
    for (const auto& p : target.powers) tables.push_back(transition_table(view, stage, p.power, eval_stage, options));
  }

  WeakLimitResult result;
  bool first = true;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const auto& [a, b] = family[idx];
    auto value = [&](std::size_t table_index, std::int64_t power) {
      return use_tables ? table_value(tables[table_index], a, b) : direct_value(view, power, a, b, eval_stage, options);
    };
    const PairValue lhs = value(0, k);
    Rational rhs = target.theta_weight * normalized_measure(view, a) * normalized_measure(view, b);
    Rational width = lhs.width;
    for (std::size_t p = 0; p < target.powers.size(); ++p) {
      const auto& pw = target.powers[p];
      if (pw.weight == 0) continue;
      const PairValue v = value(p + 1, pw.power);
      rhs += pw.weight * v.mid;
      width += pw.weight * v.width;
    }
    Rational deviation = abs(Rational(lhs.mid - rhs)) + width / 2;
    if (first || deviation > result.deviation) {
      result.deviation = std::move(deviation);
      result.worst_pair = idx;
      first = false;
    }
  }
  return result;
}

WeakLimitScan detect_weak_limit(const TowerView& view, std::size_t j, const WeakLimitTarget& target,
                                std::span<const SetPair> family, std::size_t eval_stage,
                                const CorrelationOptions& options) {
  WeakLimitScan scan;
  const auto h = static_cast<std::int64_t>(view.height(j));
  scan.candidates = {h - 1, h, h + 1};
  for (std::int64_t k : scan.candidates) {
    scan.deviations.push_back(weak_limit_deviation(view, k, target, family, eval_stage, options).deviation);
  }
  scan.best = static_cast<std::size_t>(std::min_element(scan.deviations.begin(), scan.deviations.end()) -
                                       scan.deviations.begin());
  return scan;
}

std::vector<SetPair> single_level_family(const TowerView& view, std::size_t stage) {
  const std::uint64_t h = view.height(stage);
  std::vector<LevelSet> singles;
  singles.reserve(h);
  for (std::uint64_t l = 0; l < h; ++l) singles.push_back(level_range(view, stage, l, l + 1));
  std::vector<SetPair> family;
  family.reserve(h * h);
  for (const auto& a : singles) {
    for (const auto& b : singles) family.emplace_back(a, b);
  }
  return family;
}

// ---------------------------------------------------------------------------
// Mixing scan

MixingScan mixing_scan(const TowerView& view, const LevelSet& a, const LevelSet& b, const LevelSet& c, std::int64_t h,
                       const Rational& eps, std::size_t eval_stage) {
  check_depth(view, eval_stage, 0);
  if (h < 0) fail(ErrorCode::ConfigError, "scan range must be non-negative");
  const std::uint64_t height = view.height(eval_stage);
  if (2 * static_cast<std::uint64_t>(h) >= height) {
    fail(ErrorCode::ShiftTooLarge, "scan range 2h = " + std::to_string(2 * h) + " >= h_J = " + std::to_string(height));
  }
  const LevelBits ra = refine(view, a, eval_stage).levels;
  const LevelBits rb = refine(view, b, eval_stage).levels;
  const LevelBits rc = refine(view, c, eval_stage).levels;
  const Rational product = normalized_measure(view, a) * normalized_measure(view, b) * normalized_measure(view, c);
  const Rational unit = view.level_width(eval_stage) / view.total_mass();
  const Rational threshold = eps * h;

  // C shifted by w, exact part and with the undecided bottom band.
  std::vector<LevelBits> c_known;
  std::vector<LevelBits> c_band;
  c_known.reserve(static_cast<std::size_t>(h) + 1);
  c_band.reserve(static_cast<std::size_t>(h) + 1);
  for (std::int64_t w = 0; w <= h; ++w) {
    c_known.push_back(rc.shifted(w));
    c_band.push_back(c_known.back());
    c_band.back().set_range(0, static_cast<std::uint64_t>(w));
  }

  MixingScan scan;
  std::uint64_t offenders = 0;
  auto outside = [&](std::int64_t v) { return Rational(v < 0 ? -v : v) > threshold; };
  for (std::int64_t z = 0; z <= h; ++z) {
    if (!outside(z)) continue;
    LevelBits ab = rb.shifted(z);
    LevelBits ab_band = ab;
    ab_band.set_range(0, static_cast<std::uint64_t>(z));
    ab &= ra;
    ab_band &= ra;
    for (std::int64_t w = 0; w <= h; ++w) {
      if (!outside(w) || !outside(z - w)) continue;
      ++scan.grid_points;
      const std::uint64_t lower = count_and(ab, c_known[static_cast<std::size_t>(w)]);
      const std::uint64_t upper = count_and(ab_band, c_band[static_cast<std::size_t>(w)]);
      const Rational mid = Rational(lower + upper) * unit / 2;
      if (abs(Rational(mid - product)) > eps) {
        ++offenders;
        scan.offenders.emplace_back(z, w);
      }
    }
  }
  scan.d = h == 0 ? Rational(0) : Rational(offenders) / h;
  return scan;
}

// ---------------------------------------------------------------------------
// Presets

Construction chacon() {
  Construction c;
  c.initial_height = 1;
  c.initial_base_width = Rational(2, 3);
  c.stages = {{3, {0, 1, 0}}};
  c.periodic = true;
  return c;
}

Construction asym5() {
  Construction c;
  c.initial_height = 1;
  c.initial_base_width = Rational(2, 5);
  c.stages = {{5, {0, 1, 1, 2, 2}}};
  c.periodic = true;
  return c;
}

Construction asym5_junction(std::uint32_t relay) {
  Construction c = asym5();
  c.initial_base_width = 1;
  c.stages.push_back({relay, std::vector<std::uint64_t>(relay, 0)});
  return c;
}

Construction staircase(std::span<const std::uint32_t> cuts) {
  Construction c;
  c.initial_height = 1;
  c.initial_base_width = 1;
  for (std::uint32_t r : cuts) {
    SpacerProfile p{r, std::vector<std::uint64_t>(r)};
    std::iota(p.spacers.begin(), p.spacers.end(), std::uint64_t{0});
    c.stages.push_back(std::move(p));
  }
  return c;
}

std::vector<Rational> adams_ratios(const TowerView& view) {
  std::vector<Rational> out;
  for (std::size_t n = 1; n < view.meta_depth(); ++n) {
    const Rational r = view.offsets(n).size();
    out.push_back(r * r / Rational(view.height(n)));
  }
  return out;
}

}  // namespace ergolab::rank_one
