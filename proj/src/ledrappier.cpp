#include "ergolab/ledrappier.hpp"

#include "ergolab/error.hpp"

#include <algorithm>
#include <optional>
#include <regex>

namespace ergolab::ledrappier {

namespace {

constexpr std::size_t kMaxSites = 64 * 96;
constexpr std::size_t kMaxFamily = 8;

std::int64_t wrap(std::int64_t v, std::uint32_t n) {
  const auto m = static_cast<std::int64_t>(n);
  return ((v % m) + m) % m;
}

/// Incremental GF(2) row space with one stored row per pivot column.
class EchelonRows {
 public:
  explicit EchelonRows(std::size_t width) : slots_(width) {}

  /// Reduces `row` against the stored rows; the result has no stored pivot.
  void reduce(LevelBits& row) const {
    for (std::uint64_t p = row.first(); p < slots_.size() && slots_[p]; p = row.first()) row ^= *slots_[p];
  }

  /// Reduces and stores `row`; returns false when it was dependent.
  bool insert(LevelBits row) {
    reduce(row);
    const std::uint64_t p = row.first();
    if (p >= slots_.size()) return false;
    slots_[p] = std::move(row);
    return true;
  }

 private:
  std::vector<std::optional<LevelBits>> slots_;
};

}  // namespace

TorusLattice TorusLattice::square(std::uint32_t n) {
  TorusLattice t{n, n};
  t.validate();
  return t;
}

TorusLattice TorusLattice::closing(std::uint32_t n) {
  if (n < 4 || n > 64) fail(ErrorCode::ConfigError, "torus width must be in [4, 64]");
  const std::uint64_t period = transfer_period(n);
  if (period > kMaxSites / n) fail(ErrorCode::BudgetExceeded, "transfer period " + std::to_string(period) + " too long");
  TorusLattice t{n, static_cast<std::uint32_t>(period)};
  t.validate();
  return t;
}

std::size_t TorusLattice::index(Site s) const {
  return static_cast<std::size_t>(wrap(s.y, ny)) * nx + static_cast<std::size_t>(wrap(s.x, nx));
}

void TorusLattice::validate() const {
  if (nx < 4 || ny < 4) fail(ErrorCode::ConfigError, "torus sides must be >= 4");
  if (sites() > kMaxSites) fail(ErrorCode::BudgetExceeded, "torus has more than " + std::to_string(kMaxSites) + " sites");
}

std::uint64_t transfer_period(std::uint32_t n, std::uint64_t limit) {
  if (n < 3 || n > 64) fail(ErrorCode::ConfigError, "row width must be in [3, 64]");
  const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  auto rotl = [&](std::uint64_t r) { return ((r << 1) | (r >> (n - 1))) & mask; };
  auto rotr = [&](std::uint64_t r) { return ((r >> 1) | (r << (n - 1))) & mask; };

  // Track the images of all 2n unit states at once.
  struct State {
    std::uint64_t prev;
    std::uint64_t cur;
  };
  std::vector<State> start;
  for (std::uint32_t i = 0; i < n; ++i) {
    start.push_back({std::uint64_t{1} << i, 0});
    start.push_back({0, std::uint64_t{1} << i});
  }
  std::vector<State> state = start;
  for (std::uint64_t step = 1; step <= limit; ++step) {
    bool identity = true;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const std::uint64_t next = state[i].prev ^ state[i].cur ^ rotl(state[i].cur) ^ rotr(state[i].cur);
      state[i] = {state[i].cur, next};
      identity = identity && state[i].prev == start[i].prev && state[i].cur == start[i].cur;
    }
    if (identity) return step;
  }
  fail(ErrorCode::ConfigError, "transfer map of width " + std::to_string(n) + " has period above the limit");
}

bool F2System::relation(const LevelBits& config, Site z) const {
  const Site around[] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  bool sum = false;
  for (const Site& d : around) sum ^= config.test(lattice_.index(z + d));
  return sum;
}

F2System build_system(const TorusLattice& lattice) {
  lattice.validate();
  const std::size_t n = lattice.sites();

  std::vector<LevelBits> rows;
  rows.reserve(n);
  const Site around[] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (std::size_t i = 0; i < n; ++i) {
    LevelBits row(n);
    for (const Site& d : around) row.set(lattice.index(lattice.site(i) + d));
    rows.push_back(std::move(row));
  }

  // Gauss-Jordan to reduced row echelon form.
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < n; ++c) {
    std::size_t r = rank;
    while (r < n && !rows[r].test(c)) ++r;
    if (r == n) continue;
    std::swap(rows[rank], rows[r]);
    for (std::size_t o = 0; o < n; ++o) {
      if (o != rank && rows[o].test(c)) rows[o] ^= rows[rank];
    }
    pivot_col.push_back(c);
    ++rank;
  }

  // One kernel vector per free column.
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  F2System sys;
  sys.lattice_ = lattice;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    LevelBits v(n);
    v.set(f);
    for (std::size_t i = 0; i < rank; ++i) {
      if (rows[i].test(f)) v.set(pivot_col[i]);
    }
    sys.basis_.push_back(std::move(v));
  }

  const std::size_t k = sys.basis_.size();
  sys.functionals_.assign(n, LevelBits(k));
  for (std::size_t b = 0; b < k; ++b) {
    sys.basis_[b].for_each([&](std::uint64_t s) { sys.functionals_[s].set(b); });
  }
  return sys;
}

void Cylinder::validate(const TorusLattice& lattice) const {
  std::vector<std::size_t> seen;
  for (const auto& c : constraints) seen.push_back(lattice.index(c.site));
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) fail(ErrorCode::ConfigError, "cylinder repeats a site");
}

Cylinder Cylinder::translated(Site by) const {
  Cylinder out = *this;
  for (auto& c : out.constraints) c.site = c.site + by;
  return out;
}

Rational cylinder_measure(const F2System& sys, std::span<const Constraint> constraints) {
  const std::size_t k = sys.dimension();
  EchelonRows rows(k);
  unsigned rank = 0;
  for (const auto& c : constraints) {
    // Functional in bits [0, k), right-hand side in bit k.
    LevelBits row(k + 1);
    sys.functional(c.site).for_each([&](std::uint64_t b) { row.set(b); });
    if (c.bit) row.set(k);
    rows.reduce(row);
    const std::uint64_t p = row.first();
    if (p == k) return Rational(0);
    if (p > k) continue;
    rows.insert(std::move(row));
    ++rank;
  }
  return dyadic(rank);
}

Rational shifted_correlation(const F2System& sys, const Cylinder& base, std::span<const Site> shifts) {
  std::vector<Constraint> all;
  for (const Site& z : shifts) {
    for (const auto& c : base.constraints) all.push_back({c.site + z, c.bit});
  }
  return cylinder_measure(sys, all);
}

std::vector<std::uint32_t> dependency_scan(const F2System& sys, std::span<const Site> family) {
  if (family.size() > kMaxFamily) fail(ErrorCode::ConfigError, "site families are limited to 8 sites");
  const std::size_t k = sys.dimension();
  const std::size_t m = family.size();
  EchelonRows rows(k);
  std::vector<std::uint32_t> relations;
  for (std::size_t i = 0; i < m; ++i) {
    // Functional in bits [0, k), combination mask in bits [k, k + m).
    LevelBits row(k + m);
    sys.functional(family[i]).for_each([&](std::uint64_t b) { row.set(b); });
    row.set(k + i);
    rows.reduce(row);
    if (row.first() >= k) {
      std::uint32_t mask = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (row.test(k + j)) mask |= std::uint32_t{1} << j;
      }
      relations.push_back(mask);
    } else {
      rows.insert(std::move(row));
    }
  }

  // Canonical basis: fully reduced, ordered by lowest member.
  for (std::size_t i = 0; i < relations.size(); ++i) {
    auto best = std::min_element(relations.begin() + static_cast<std::ptrdiff_t>(i), relations.end(), [](std::uint32_t a, std::uint32_t b) {
      return std::countr_zero(a) < std::countr_zero(b);
    });
    std::swap(relations[i], *best);
    const std::uint32_t low = relations[i] & -relations[i];
    for (std::size_t j = 0; j < relations.size(); ++j) {
      if (j != i && (relations[j] & low)) relations[j] ^= relations[i];
    }
  }
  return relations;
}

std::vector<Site> cross_family(Site center, std::int64_t d) {
  return {center, center + Site{d, 0}, center + Site{-d, 0}, center + Site{0, d}, center + Site{0, -d}};
}

namespace {

std::vector<std::string> split_items(const std::string& text) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : text) {
    if (c == ';') {
      items.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  items.push_back(cur);
  std::vector<std::string> out;
  for (auto& item : items) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

}  // namespace

Cylinder parse_cylinder(const std::string& text) {
  static const std::regex item(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*=\s*([01]))");
  Cylinder cyl;
  for (const auto& s : split_items(text)) {
    std::smatch m;
    if (!std::regex_match(s, m, item)) fail(ErrorCode::ConfigError, "bad cylinder constraint '" + s + "'");
    cyl.constraints.push_back({{std::stoll(m[1]), std::stoll(m[2])}, m[3] == "1"});
  }
  return cyl;
}

std::vector<Site> parse_sites(const std::string& text) {
  static const std::regex item(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  std::vector<Site> sites;
  for (const auto& s : split_items(text)) {
    std::smatch m;
    if (!std::regex_match(s, m, item)) fail(ErrorCode::ConfigError, "bad lattice vector '" + s + "'");
    sites.push_back({std::stoll(m[1]), std::stoll(m[2])});
  }
  return sites;
}

}  // namespace ergolab::ledrappier
