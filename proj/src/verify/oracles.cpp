#include "ergolab/verify/oracles.hpp"

#include <stdexcept>

namespace ergolab::verify {

std::vector<std::uint64_t> oracle_heights(const rank_one::Construction& c, std::size_t depth) {
  std::vector<std::uint64_t> h{c.initial_height};
  while (h.size() < depth) {
    const auto& p = c.profile(h.size());
    std::uint64_t next = 0;
    for (std::uint32_t col = 0; col < p.cuts; ++col) next += h.back() + p.spacers[col];
    h.push_back(next);
  }
  return h;
}

std::vector<std::int64_t> concat_labels(const rank_one::Construction& c, std::size_t from, std::size_t to) {
  const auto h = oracle_heights(c, from);
  std::vector<std::int64_t> cur;
  for (std::uint64_t l = 0; l < h[from - 1]; ++l) cur.push_back(static_cast<std::int64_t>(l));
  for (std::size_t n = from; n < to; ++n) {
    const auto& p = c.profile(n);
    std::vector<std::int64_t> next;
    for (std::uint32_t col = 0; col < p.cuts; ++col) {
      next.insert(next.end(), cur.begin(), cur.end());
      next.insert(next.end(), p.spacers[col], -1);
    }
    cur = std::move(next);
  }
  return cur;
}

OracleSet oracle_set(const rank_one::LevelSet& set) {
  OracleSet out{set.stage, std::vector<bool>(set.levels.size(), false)};
  for (std::uint64_t l = 0; l < set.levels.size(); ++l) out.member[l] = set.levels.test(l);
  return out;
}

Rational oracle_width(const rank_one::Construction& c, std::size_t stage) {
  Rational w = c.initial_base_width;
  for (std::size_t n = 1; n < stage; ++n) w /= Rational(c.profile(n).cuts);
  return w;
}

OracleBound orbit_correlation(const rank_one::Construction& c, const Rational& total_mass,
                              std::span<const OracleSet> sets, std::span<const std::int64_t> shifts, std::size_t stage) {
  std::vector<std::vector<std::int64_t>> labels;
  for (const auto& s : sets) labels.push_back(concat_labels(c, s.stage, stage));
  const auto height = static_cast<std::int64_t>(labels.front().size());
  std::uint64_t hits = 0;
  std::uint64_t open = 0;
  for (std::int64_t p = 0; p < height; ++p) {
    bool in = true;
    bool undecided = false;
    for (std::size_t i = 0; i < sets.size() && in; ++i) {
      // T^k A contains x iff T^-k x is in A: walk k steps down from p.
      const std::int64_t q = p - shifts[i];
      if (q < 0 || q >= height) {
        undecided = true;
        continue;
      }
      const std::int64_t l = labels[i][static_cast<std::size_t>(q)];
      in = l >= 0 && sets[i].member[static_cast<std::size_t>(l)];
    }
    if (!in) continue;
    if (undecided) {
      ++open;
    } else {
      ++hits;
    }
  }
  const Rational unit = oracle_width(c, stage) / total_mass;
  return {Rational(static_cast<long>(hits)) * unit, Rational(static_cast<long>(hits + open)) * unit};
}

// ---------------------------------------------------------------------------

namespace {

using BoolRows = std::vector<std::vector<bool>>;

void xor_into(std::vector<bool>& dst, const std::vector<bool>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = dst[i] != src[i];
}

/// Rows 0..ny+1 of the propagation of one seed pair.
BoolRows propagate(std::uint32_t nx, std::uint32_t ny, const std::vector<bool>& row0, const std::vector<bool>& row1) {
  BoolRows rows{row0, row1};
  while (rows.size() < ny + 2U) {
    const auto& a = rows[rows.size() - 2];
    const auto& b = rows[rows.size() - 1];
    std::vector<bool> next(nx);
    for (std::uint32_t x = 0; x < nx; ++x) {
      next[x] = a[x] ^ b[x] ^ b[(x + 1) % nx] ^ b[(x + nx - 1) % nx];
    }
    rows.push_back(std::move(next));
  }
  return rows;
}

}  // namespace

TransferSpan transfer_span(const ledrappier::TorusLattice& lattice) {
  const std::uint32_t nx = lattice.nx;
  const std::uint32_t ny = lattice.ny;
  const std::size_t seeds = 2 * std::size_t{nx};

  std::vector<std::vector<bool>> configs;
  std::vector<std::vector<bool>> residuals;
  for (std::size_t s = 0; s < seeds; ++s) {
    std::vector<bool> row0(nx, false);
    std::vector<bool> row1(nx, false);
    (s < nx ? row0 : row1)[s % nx] = true;
    const auto rows = propagate(nx, ny, row0, row1);
    std::vector<bool> config;
    for (std::uint32_t y = 0; y < ny; ++y) config.insert(config.end(), rows[y].begin(), rows[y].end());
    std::vector<bool> res(seeds);
    for (std::uint32_t x = 0; x < nx; ++x) {
      res[x] = rows[ny][x] != rows[0][x];
      res[nx + x] = rows[ny + 1][x] != rows[1][x];
    }
    configs.push_back(std::move(config));
    residuals.push_back(std::move(res));
  }

  // Null space of the closure residual: combinations of seeds that close.
  // Track each residual's seed combination while eliminating.
  std::vector<std::vector<bool>> combo(seeds, std::vector<bool>(seeds, false));
  for (std::size_t s = 0; s < seeds; ++s) combo[s][s] = true;
  std::vector<bool> used(seeds, false);
  for (std::size_t bit = 0; bit < seeds; ++bit) {
    std::size_t pivot = seeds;
    for (std::size_t s = 0; s < seeds; ++s) {
      if (!used[s] && residuals[s][bit]) {
        pivot = s;
        break;
      }
    }
    if (pivot == seeds) continue;
    used[pivot] = true;
    for (std::size_t s = 0; s < seeds; ++s) {
      if (s != pivot && residuals[s][bit]) {
        xor_into(residuals[s], residuals[pivot]);
        xor_into(combo[s], combo[pivot]);
      }
    }
  }

  TransferSpan span{lattice, {}};
  for (std::size_t s = 0; s < seeds; ++s) {
    if (used[s]) continue;
    std::vector<bool> g(lattice.sites(), false);
    for (std::size_t j = 0; j < seeds; ++j) {
      if (combo[s][j]) xor_into(g, configs[j]);
    }
    span.generators.push_back(std::move(g));
  }
  return span;
}

Rational transfer_measure(const TransferSpan& span, std::span<const ledrappier::Constraint> constraints) {
  const std::size_t k = span.generators.size();
  BoolRows rows;
  for (const auto& c : constraints) {
    const std::size_t site = span.lattice.index(c.site);
    std::vector<bool> row(k + 1);
    for (std::size_t j = 0; j < k; ++j) row[j] = span.generators[j][site];
    row[k] = c.bit;
    rows.push_back(std::move(row));
  }
  unsigned rank = 0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][col]) xor_into(rows[r], rows[rank]);
    }
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r) {
    if (rows[r][k]) return Rational(0);
  }
  return dyadic(rank);
}

Rational enumerate_measure(const TransferSpan& span, std::span<const ledrappier::Constraint> constraints) {
  const std::size_t k = span.generators.size();
  if (k > 20) throw std::invalid_argument("enumeration limited to 2^20 elements");
  std::vector<std::size_t> sites;
  for (const auto& c : constraints) sites.push_back(span.lattice.index(c.site));
  std::uint64_t good = 0;
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < constraints.size() && ok; ++i) {
      bool v = false;
      for (std::size_t j = 0; j < k; ++j) {
        if ((mask >> j) & 1U) v = v != span.generators[j][sites[i]];
      }
      ok = v == constraints[i].bit;
    }
    if (ok) ++good;
  }
  Rational r(static_cast<long>(good), static_cast<long>(total));
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------

bool digit_successor(std::vector<std::uint32_t>& digits, std::uint32_t radix) {
  for (auto& d : digits) {
    if (++d < radix) return true;
    d = 0;
  }
  return false;
}

std::uint64_t digit_level(std::span<const std::uint32_t> digits, std::uint32_t radix, std::size_t stage) {
  std::uint64_t level = 0;
  std::uint64_t place = 1;
  for (std::size_t n = 0; n + 1 < stage; ++n) {
    level += digits[n] * place;
    place *= radix;
  }
  return level;
}

std::vector<std::int64_t> simulate_sums(std::uint32_t radix, std::vector<std::uint32_t> digits, std::size_t stage,
                                        std::span<const std::int64_t> values, std::uint64_t length) {
  std::vector<std::int64_t> sums{0};
  for (std::uint64_t i = 0; i < length; ++i) {
    sums.push_back(sums.back() + values[digit_level(digits, radix, stage)]);
    if (i + 1 < length && !digit_successor(digits, radix)) throw std::out_of_range("orbit leaves the digit paths");
  }
  return sums;
}

OracleBound skew_oracle(std::uint32_t radix, std::size_t base_stage, const std::vector<bool>& a,
                        const std::vector<bool>& c, std::size_t cocycle_stage, std::span<const std::int64_t> values,
                        const rank_one::Construction& fiber, const Rational& fiber_mass, const OracleSet& b,
                        const OracleSet& d, std::int64_t k, std::size_t fiber_stage) {
  // One stage deeper than the base sets; the odometer is cyclic there.
  std::int64_t hb = 1;
  for (std::size_t n = 1; n < base_stage; ++n) hb *= radix;
  const std::int64_t hc = [&] {
    std::int64_t h = 1;
    for (std::size_t n = 1; n < cocycle_stage; ++n) h *= radix;
    return h;
  }();
  const std::int64_t deep = hb * radix;

  const auto lb = concat_labels(fiber, b.stage, fiber_stage);
  const auto ld = concat_labels(fiber, d.stage, fiber_stage);
  const auto hf = static_cast<std::int64_t>(lb.size());
  const Rational fiber_unit = oracle_width(fiber, fiber_stage) / fiber_mass;

  auto mod = [](std::int64_t v, std::int64_t m) { return ((v % m) + m) % m; };
  Rational lower = 0;
  Rational upper = 0;
  for (std::int64_t p = 0; p < deep; ++p) {
    if (!a[static_cast<std::size_t>(p % hb)]) continue;
    const std::int64_t src = mod(p - k, deep);
    if (!c[static_cast<std::size_t>(src % hb)]) continue;
    std::int64_t m = 0;
    if (k >= 0) {
      for (std::int64_t n = 0; n < k; ++n) m += values[static_cast<std::size_t>(mod(src + n, hc))];
    } else {
      for (std::int64_t n = k; n < 0; ++n) m -= values[static_cast<std::size_t>(mod(src + n, hc))];
    }
    std::uint64_t hits = 0;
    std::uint64_t open = 0;
    for (std::int64_t q = 0; q < hf; ++q) {
      const std::int64_t l = lb[static_cast<std::size_t>(q)];
      if (l < 0 || !b.member[static_cast<std::size_t>(l)]) continue;
      const std::int64_t q0 = q - m;
      if (q0 < 0 || q0 >= hf) {
        ++open;
        continue;
      }
      const std::int64_t l0 = ld[static_cast<std::size_t>(q0)];
      if (l0 >= 0 && d.member[static_cast<std::size_t>(l0)]) ++hits;
    }
    const Rational cell = Rational(1, deep);
    lower += cell * Rational(static_cast<long>(hits)) * fiber_unit;
    upper += cell * Rational(static_cast<long>(hits + open)) * fiber_unit;
  }
  return {lower, upper};
}

// ---------------------------------------------------------------------------

DenseMatrix to_dense(const markov::MarkovMatrix& m) {
  DenseMatrix d(m.size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) d[i][j] = m(i, j).get_d();
  }
  return d;
}

double window_norm_sq(const DenseMatrix& t, const std::vector<double>& f, std::size_t offset, std::size_t length) {
  const std::size_t n = f.size();
  std::vector<double> cur = f;
  std::vector<double> acc(n, 0.0);
  for (std::size_t z = 0; z < offset + length; ++z) {
    if (z >= offset) {
      for (std::size_t i = 0; i < n; ++i) acc[i] += cur[i] / static_cast<double>(length);
    }
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[i] += t[i][j] * cur[j];
    }
    cur = std::move(next);
  }
  double mean = 0;
  for (double v : f) mean += v / static_cast<double>(n);
  double sum = 0;
  for (double v : acc) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(n);
}

Rational brute_product_measure(const markov::SetFamily& family) {
  const std::size_t m = family.ground;
  long cells = 0;
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      bool covered = false;
      for (const auto& [a, b] : family.pairs) {
        if (((a >> x) & 1U) && ((b >> y) & 1U)) covered = true;
      }
      if (covered) ++cells;
    }
  }
  if (m == 0) return Rational(0);
  Rational r(cells, static_cast<long>(m * m));
  r.canonicalize();
  return r;
}

}  // namespace ergolab::verify
