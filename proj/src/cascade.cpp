#include "ergolab/cascade.hpp"

#include "ergolab/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace ergolab::cascade {

namespace {

constexpr std::uint64_t kPointLimit = std::uint64_t{1} << 62;
constexpr std::uint64_t kOdometerBitsetLimit = std::uint64_t{1} << 20;
constexpr std::uint64_t kCocycleLevelLimit = std::uint64_t{1} << 24;

/// Stage-`from` label of every stage-`to` level, -1 on later spacers.
std::vector<std::int64_t> stage_labels(const rank_one::TowerView& view, std::size_t from, std::size_t to) {
  std::vector<std::int64_t> labels(view.height(from));
  std::iota(labels.begin(), labels.end(), 0);
  for (std::size_t n = from; n < to; ++n) {
    std::vector<std::int64_t> next(view.height(n + 1), -1);
    for (std::uint64_t o : view.offsets(n)) {
      std::copy(labels.begin(), labels.end(), next.begin() + static_cast<std::ptrdiff_t>(o));
    }
    labels = std::move(next);
  }
  return labels;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::int64_t parse_int(const std::string& s, const std::string& line) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(ErrorCode::ConfigError, "bad integer in cocycle row '" + line + "'");
  return v;
}

}  // namespace

BaseSystem BaseSystem::odometer(std::uint32_t radix, std::size_t depth) {
  if (radix < 2) fail(ErrorCode::ConfigError, "odometer radix must be >= 2");
  if (depth == 0) fail(ErrorCode::ConfigError, "odometer depth must be positive");
  std::uint64_t extent = 1;
  std::size_t bitset_stage = 1;
  for (std::size_t d = 1; d <= depth; ++d) {
    if (extent > kPointLimit / radix) fail(ErrorCode::BudgetExceeded, "odometer depth " + std::to_string(depth) + " overflows 2^62 points");
    extent *= radix;
    if (extent <= kOdometerBitsetLimit) bitset_stage = d + 1;
  }
  rank_one::Construction c;
  c.initial_height = 1;
  c.initial_base_width = 1;
  c.stages = {{radix, std::vector<std::uint64_t>(radix, 0)}};
  c.periodic = true;
  rank_one::BuildOptions options;
  options.lookahead = depth + 1 - bitset_stage;

  BaseSystem base;
  base.kind_ = Kind::Odometer;
  base.view_ = rank_one::build(c, bitset_stage, options);
  base.point_stage_ = depth + 1;
  base.extent_ = extent;
  return base;
}

BaseSystem BaseSystem::tower(rank_one::TowerView view, std::size_t stage) {
  if (stage == 0 || stage > view.stage()) fail(ErrorCode::StageOrder, "base stage " + std::to_string(stage) + " is not built");
  BaseSystem base;
  base.kind_ = Kind::Tower;
  base.extent_ = view.height(stage);
  base.point_stage_ = stage;
  base.view_ = std::move(view);
  return base;
}

std::uint64_t BaseSystem::step(std::uint64_t x, std::int64_t m) const {
  const auto target = static_cast<__int128>(x) + m;
  if (x >= extent_ || target < 0 || target >= static_cast<__int128>(extent_)) {
    fail(ErrorCode::UndefinedOrbit, "S^" + std::to_string(m) + " undefined at point " + std::to_string(x));
  }
  return static_cast<std::uint64_t>(target);
}

std::vector<std::uint32_t> BaseSystem::digits(std::uint64_t x) const {
  if (kind_ != Kind::Odometer) fail(ErrorCode::ConfigError, "digit paths exist only for odometer bases");
  const auto radix = static_cast<std::uint32_t>(view_.offsets(1).size());
  std::vector<std::uint32_t> out(point_stage_ - 1);
  for (auto& d : out) {
    d = static_cast<std::uint32_t>(x % radix);
    x /= radix;
  }
  return out;
}

std::uint64_t BaseSystem::from_digits(std::span<const std::uint32_t> digits) const {
  if (kind_ != Kind::Odometer) fail(ErrorCode::ConfigError, "digit paths exist only for odometer bases");
  const auto radix = static_cast<std::uint32_t>(view_.offsets(1).size());
  if (digits.size() != point_stage_ - 1) fail(ErrorCode::ConfigError, "digit path has the wrong depth");
  std::uint64_t x = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] >= radix) fail(ErrorCode::ConfigError, "digit out of range");
    x = x * radix + digits[i];
  }
  return x;
}

std::vector<std::uint64_t> BaseSystem::sample(std::size_t count, std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint64_t> pick(0, extent_ - 1);
  std::vector<std::uint64_t> out(count);
  for (auto& x : out) x = pick(rng);
  return out;
}

// ---------------------------------------------------------------------------

Rational CocycleFunction::integral(const BaseSystem& base) const {
  const Rational sum = std::accumulate(values.begin(), values.end(), Rational(0),
                                       [](const Rational& acc, std::int64_t v) -> Rational { return acc + Rational(static_cast<long>(v)); });
  return sum * base.view().level_width(stage);
}

void CocycleFunction::validate(const BaseSystem& base) const {
  if (stage == 0 || stage > base.point_stage()) {
    fail(ErrorCode::StageOrder, "cocycle stage " + std::to_string(stage) + " outside the base");
  }
  const std::uint64_t h = base.view().height(stage);
  if (h > kCocycleLevelLimit) fail(ErrorCode::BudgetExceeded, "cocycle stage has too many levels");
  if (values.size() != h) {
    fail(ErrorCode::ConfigError, "cocycle has " + std::to_string(values.size()) + " values for " + std::to_string(h) + " levels");
  }
  if (integral(base) != 0) fail(ErrorCode::ZeroMeanViolation, "cocycle integral is " + to_string(integral(base)));
}

CocycleFunction CocycleFunction::refine(const BaseSystem& base, std::size_t to) const {
  if (to < stage) fail(ErrorCode::StageOrder, "cannot refine a cocycle to a shallower stage");
  if (base.view().height(to) > kCocycleLevelLimit) fail(ErrorCode::BudgetExceeded, "refined cocycle too large");
  CocycleFunction out{to, {}};
  const auto labels = stage_labels(base.view(), stage, to);
  out.values.reserve(labels.size());
  for (std::int64_t l : labels) out.values.push_back(l < 0 ? 0 : values[static_cast<std::size_t>(l)]);
  return out;
}

bool CocycleFunction::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](std::int64_t v) { return v == 0; });
}

CocycleFunction parse_cocycle_csv(std::istream& in) {
  CocycleFunction f;
  std::map<std::int64_t, std::int64_t> rows;
  std::string raw;
  bool first_row = true;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail(ErrorCode::ConfigError, "cocycle row needs two fields: '" + line + "'");
    }
    const std::string a = trim(line.substr(0, comma));
    const std::string b = trim(line.substr(comma + 1));
    if (a == "level" && b == "value") continue;
    if (a == "stage") {
      if (!first_row || !rows.empty()) fail(ErrorCode::ConfigError, "stage row must come first");
      const std::int64_t s = parse_int(b, line);
      if (s < 1) fail(ErrorCode::ConfigError, "cocycle stage must be >= 1");
      f.stage = static_cast<std::size_t>(s);
      first_row = false;
      continue;
    }
    first_row = false;
    const std::int64_t level = parse_int(a, line);
    if (level < 0) fail(ErrorCode::ConfigError, "negative cocycle level");
    if (!rows.emplace(level, parse_int(b, line)).second) {
      fail(ErrorCode::ConfigError, "cocycle level " + std::to_string(level) + " repeated");
    }
  }
  std::int64_t expect = 0;
  for (const auto& [level, value] : rows) {
    if (level != expect++) fail(ErrorCode::ConfigError, "cocycle level " + std::to_string(expect - 1) + " missing");
    f.values.push_back(value);
  }
  if (f.values.empty()) fail(ErrorCode::ConfigError, "cocycle has no rows");
  return f;
}

CocycleFunction load_cocycle_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open cocycle file '" + path + "'");
  return parse_cocycle_csv(in);
}

CocycleEvaluator::CocycleEvaluator(const BaseSystem& base, const CocycleFunction& f) : base_(&base), values_(f.values) {
  f.validate(base);
  if (base.kind() == BaseSystem::Kind::Odometer) {
    period_ = base.view().height(f.stage);
  } else {
    labels_ = stage_labels(base.view(), f.stage, base.point_stage());
  }
}

std::int64_t CocycleEvaluator::operator()(std::uint64_t x) const {
  if (base_->kind() == BaseSystem::Kind::Odometer) return values_[x % period_];
  const std::int64_t l = labels_[x];
  return l < 0 ? 0 : values_[static_cast<std::size_t>(l)];
}

// ---------------------------------------------------------------------------

OrbitRecord orbit_sums(const BaseSystem& base, const CocycleFunction& f, std::uint64_t x, std::uint64_t length) {
  const CocycleEvaluator eval(base, f);
  if (x >= base.extent() || length > base.extent() - x) {
    const std::uint64_t reached = x >= base.extent() ? 0 : base.extent() - x;
    fail(ErrorCode::UndefinedOrbit, "orbit of " + std::to_string(x) + " leaves the domain after " +
                                        std::to_string(reached) + " of " + std::to_string(length) + " steps");
  }
  OrbitRecord rec{x, length, {}, {0}};
  rec.sums.reserve(length + 1);
  rec.sums.push_back(0);
  std::int64_t sum = 0;
  for (std::uint64_t i = 0; i < length; ++i) {
    sum += eval(x + i);
    rec.sums.push_back(sum);
    if (sum == 0) rec.zero_returns.push_back(i + 1);
  }
  return rec;
}

RecurrenceResult recurrence_statistic(const BaseSystem& base, const CocycleFunction& f,
                                      std::span<const std::uint64_t> sample, std::uint64_t length,
                                      std::size_t min_returns) {
  if (sample.empty()) fail(ErrorCode::ConfigError, "empty sample");
  const CocycleEvaluator eval(base, f);
  RecurrenceResult result;
  for (std::uint64_t x : sample) {
    PointOutcome out{x, true, length, 0};
    if (x >= base.extent() || length > base.extent() - x) {
      out.defined = false;
      out.reached = x >= base.extent() ? 0 : base.extent() - x;
      result.per_point.push_back(out);
      continue;
    }
    std::int64_t sum = 0;
    for (std::uint64_t i = 0; i < length; ++i) {
      sum += eval(x + i);
      if (sum == 0) ++out.returns;
    }
    ++result.defined;
    if (out.returns >= min_returns) ++result.qualifying;
    result.per_point.push_back(out);
  }
  if (result.defined == 0) fail(ErrorCode::UndefinedOrbit, "every sampled orbit leaves the domain");
  result.fraction = ratio(static_cast<long>(result.qualifying), static_cast<long>(result.defined));
  return result;
}

// ---------------------------------------------------------------------------

rank_one::CorrelationBound skew_correlation(const BaseSystem& base, const rank_one::TowerView& fiber,
                                            const CocycleFunction& f, const SkewQuery& query) {
  f.validate(base);
  const auto& view = base.view();
  const std::size_t stage = std::max({query.base_a.stage, query.base_c.stage, f.stage});
  const std::size_t limit = base.kind() == BaseSystem::Kind::Odometer ? view.stage() : base.point_stage();
  if (stage > limit) fail(ErrorCode::StageOrder, "base sets need stage " + std::to_string(stage) + " beyond " + std::to_string(limit));

  const LevelBits a = rank_one::refine(view, query.base_a, stage).levels;
  const LevelBits c = rank_one::refine(view, query.base_c, stage).levels;
  const CocycleFunction fe = f.refine(base, stage);
  const std::uint64_t h = view.height(stage);
  const bool cyclic = base.kind() == BaseSystem::Kind::Odometer;

  // Doubled prefix sums so cyclic ranges are one subtraction.
  std::vector<std::int64_t> pre(2 * h + 1, 0);
  for (std::uint64_t i = 0; i < 2 * h; ++i) pre[i + 1] = pre[i] + fe.values[i % h];

  const std::size_t fiber_stage = query.fiber_eval_stage == 0 ? fiber.stage() : query.fiber_eval_stage;
  std::map<std::int64_t, rank_one::CorrelationBound> cache;
  auto fiber_bound = [&](std::int64_t m) -> const rank_one::CorrelationBound& {
    auto it = cache.find(m);
    if (it == cache.end()) {
      const rank_one::LevelSet sets[] = {query.fiber_b, query.fiber_d};
      const std::int64_t shifts[] = {0, m};
      it = cache.emplace(m, rank_one::correlation(fiber, sets, shifts, fiber_stage, query.fiber_options)).first;
    }
    return it->second;
  };

  const Rational cell = view.level_width(stage) / view.total_mass();
  const Rational undecided_cap = f.is_zero() ? fiber_bound(0).upper : rank_one::normalized_measure(fiber, query.fiber_b);
  const auto hh = static_cast<std::int64_t>(h);
  Rational lower = 0;
  Rational upper = 0;
  a.for_each([&](std::uint64_t p) {
    std::int64_t src = static_cast<std::int64_t>(p) - query.k;
    if (cyclic) {
      src = ((src % hh) + hh) % hh;
    } else if (src < 0 || src >= hh) {
      upper += cell * undecided_cap;
      return;
    }
    const auto s = static_cast<std::uint64_t>(src);
    if (!c.test(s)) return;
    // F(x', k) with x' at level s: sum of f over levels s, s+1, ..., s+k-1.
    std::int64_t m = 0;
    if (cyclic) {
      const auto r = static_cast<std::uint64_t>(((query.k % hh) + hh) % hh);
      m = pre[s + r] - pre[s];
    } else {
      m = pre[p] - pre[s];
    }
    const auto& fb = fiber_bound(m);
    lower += cell * fb.lower;
    upper += cell * fb.upper;
  });
  return {lower, upper, stage};
}

}  // namespace ergolab::cascade
