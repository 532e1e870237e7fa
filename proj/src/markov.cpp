#include "ergolab/markov.hpp"

#include "ergolab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace ergolab::markov {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

/// Breadth-first levels from atom 0 along the support graph, or empty if
/// some atom is unreachable.
std::vector<std::size_t> bfs_levels(const MarkovMatrix& t, bool transpose) {
  const std::size_t n = t.size();
  constexpr auto kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level(n, kUnseen);
  std::queue<std::size_t> todo;
  level[0] = 0;
  todo.push(0);
  while (!todo.empty()) {
    const std::size_t u = todo.front();
    todo.pop();
    for (std::size_t v = 0; v < n; ++v) {
      const Rational& e = transpose ? t(v, u) : t(u, v);
      if (e != 0 && level[v] == kUnseen) {
        level[v] = level[u] + 1;
        todo.push(v);
      }
    }
  }
  if (std::find(level.begin(), level.end(), kUnseen) != level.end()) return {};
  return level;
}

}  // namespace

MarkovMatrix MarkovMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorCode::DimensionMismatch, "empty matrix");
  std::vector<Rational> entries;
  entries.reserve(n * n);
  std::vector<Rational> col_sums(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    require_same(rows[i].size(), n, "matrix row length");
    Rational row_sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[i][j] < 0) fail(ErrorCode::NotDoublyStochastic, "negative entry");
      row_sum += rows[i][j];
      col_sums[j] += rows[i][j];
      entries.push_back(rows[i][j]);
    }
    if (row_sum != 1) fail(ErrorCode::NotDoublyStochastic, "row " + std::to_string(i) + " sums to " + to_string(row_sum));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (col_sums[j] != 1) {
      fail(ErrorCode::NotDoublyStochastic, "column " + std::to_string(j) + " sums to " + to_string(col_sums[j]));
    }
  }
  return MarkovMatrix(n, std::move(entries));
}

MarkovMatrix MarkovMatrix::theta(std::size_t n) { return MarkovMatrix(n, std::vector<Rational>(n * n, Rational(1, n))); }

MarkovMatrix MarkovMatrix::identity(std::size_t n) {
  std::vector<Rational> e(n * n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1;
  return MarkovMatrix(n, std::move(e));
}

MarkovMatrix MarkovMatrix::permutation(std::span<const std::size_t> sigma) {
  const std::size_t n = sigma.size();
  std::vector<bool> seen(n, false);
  std::vector<Rational> e(n * n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    if (sigma[j] >= n || seen[sigma[j]]) fail(ErrorCode::NotDoublyStochastic, "not a permutation");
    seen[sigma[j]] = true;
    e[sigma[j] * n + j] = 1;
  }
  return MarkovMatrix(n, std::move(e));
}

MarkovMatrix MarkovMatrix::cyclic(std::size_t n) {
  std::vector<std::size_t> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = (j + 1) % n;
  return permutation(sigma);
}

MarkovMatrix MarkovMatrix::lazy_cyclic(std::size_t n) {
  const MarkovMatrix terms[] = {identity(n), cyclic(n)};
  const Rational weights[] = {Rational(1, 2), Rational(1, 2)};
  return convex_combination(terms, weights);
}

Rational VectorOnAtoms::mean() const {
  Rational sum = 0;
  for (const auto& v : values) sum += v;
  return values.empty() ? sum : Rational(sum / Rational(values.size()));
}

VectorOnAtoms indicator(std::size_t n, std::span<const std::size_t> atoms) {
  VectorOnAtoms f{std::vector<Rational>(n, Rational(0))};
  for (std::size_t a : atoms) f.values.at(a) = 1;
  return f;
}

MarkovMatrix compose(const MarkovMatrix& p, const MarkovMatrix& q) {
  require_same(p.size(), q.size(), "compose");
  const std::size_t n = p.size();
  std::vector<Rational> e(n * n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Rational& a = p(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < n; ++j) e[i * n + j] += a * q(k, j);
    }
  }
  return MarkovMatrix(n, std::move(e));
}

MarkovMatrix adjoint(const MarkovMatrix& p) {
  const std::size_t n = p.size();
  std::vector<Rational> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) e[j * n + i] = p(i, j);
  }
  return MarkovMatrix(n, std::move(e));
}

MarkovMatrix convex_combination(std::span<const MarkovMatrix> terms, std::span<const Rational> weights) {
  if (terms.empty()) fail(ErrorCode::DimensionMismatch, "empty convex combination");
  require_same(terms.size(), weights.size(), "convex combination weights");
  const std::size_t n = terms.front().size();
  std::vector<Rational> e(n * n, Rational(0));
  Rational total = 0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    require_same(terms[t].size(), n, "convex combination");
    if (weights[t] < 0) fail(ErrorCode::BadWeights, "negative convex weight");
    total += weights[t];
    for (std::size_t i = 0; i < n * n; ++i) e[i] += weights[t] * terms[t].entries_[i];
  }
  if (total != 1) fail(ErrorCode::BadWeights, "convex weights sum to " + to_string(total));
  return MarkovMatrix(n, std::move(e));
}

VectorOnAtoms apply(const MarkovMatrix& p, const VectorOnAtoms& f) {
  require_same(p.size(), f.size(), "apply");
  const std::size_t n = p.size();
  VectorOnAtoms out{std::vector<Rational>(n, Rational(0))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (p(i, j) != 0) out.values[i] += p(i, j) * f.values[j];
    }
  }
  return out;
}

VectorOnAtoms project_constants(const VectorOnAtoms& f) { return {std::vector<Rational>(f.size(), f.mean())}; }

VectorOnAtoms operator-(const VectorOnAtoms& a, const VectorOnAtoms& b) {
  require_same(a.size(), b.size(), "vector difference");
  VectorOnAtoms out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

Rational inner(const VectorOnAtoms& f, const VectorOnAtoms& g) {
  require_same(f.size(), g.size(), "inner product");
  Rational sum = 0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f.values[i] * g.values[i];
  return sum / Rational(f.size());
}

Rational norm_sq(const VectorOnAtoms& f) { return inner(f, f); }

Rational frobenius_distance_sq(const MarkovMatrix& p, const MarkovMatrix& q) {
  require_same(p.size(), q.size(), "frobenius distance");
  Rational sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      const Rational d = p(i, j) - q(i, j);
      sum += d * d;
    }
  }
  return sum;
}

SymmetrizationCheck symmetrization_residual(const MarkovMatrix& p, const VectorOnAtoms& f) {
  require_same(p.size(), f.size(), "symmetrization");
  const VectorOnAtoms g = f - project_constants(f);
  const VectorOnAtoms pg = apply(p, g);
  return {norm_sq(pg), inner(apply(adjoint(p), pg), g)};
}

bool is_ergodic(const MarkovMatrix& t) { return !bfs_levels(t, false).empty() && !bfs_levels(t, true).empty(); }

bool is_mixing(const MarkovMatrix& t) {
  if (!is_ergodic(t)) return false;
  // Period of an irreducible graph: gcd of level[u] + 1 - level[v] over edges.
  const auto level = bfs_levels(t, false);
  std::int64_t period = 0;
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (std::size_t v = 0; v < t.size(); ++v) {
      if (t(u, v) == 0) continue;
      const auto diff = static_cast<std::int64_t>(level[u]) + 1 - static_cast<std::int64_t>(level[v]);
      period = std::gcd(period, diff < 0 ? -diff : diff);
    }
  }
  return period == 1;
}

SpectralEstimate spectral_estimate(const MarkovMatrix& t) {
  const std::size_t n = t.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(t(i, j));
  }
  // Restrict to zero-mean vectors: T - Theta has the same spectrum there
  // and maps constants to zero.
  m.array() -= 1.0 / static_cast<double>(n);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  double best = 0;
  for (const auto& ev : solver.eigenvalues()) best = std::max(best, std::abs(ev));
  return {best, true};
}

WeightLevel uniform_window(std::size_t offset, std::size_t length) {
  if (length == 0) fail(ErrorCode::BadWeights, "empty window");
  WeightLevel w(offset + length, Rational(0));
  for (std::size_t z = offset; z < offset + length; ++z) w[z] = Rational(1, length);
  return w;
}

BlumHansonResult blum_hanson_average(const MarkovMatrix& t, std::span<const WeightLevel> levels,
                                     const VectorOnAtoms& f) {
  require_same(t.size(), f.size(), "blum-hanson");
  std::size_t longest = 0;
  for (const auto& level : levels) {
    Rational sum = 0;
    for (const auto& a : level) {
      if (a < 0) fail(ErrorCode::BadWeights, "negative weight");
      sum += a;
    }
    if (sum != 1) fail(ErrorCode::BadWeights, "weights sum to " + to_string(sum));
    longest = std::max(longest, level.size());
  }
  if (!is_mixing(t)) fail(ErrorCode::NotMixing, "T has a unit-modulus eigenvalue on the zero-mean space");

  std::vector<VectorOnAtoms> powers;
  powers.reserve(longest);
  if (longest > 0) powers.push_back(f);
  while (powers.size() < longest) powers.push_back(apply(t, powers.back()));

  const VectorOnAtoms theta_f = project_constants(f);
  BlumHansonResult out;
  for (const auto& level : levels) {
    VectorOnAtoms avg{std::vector<Rational>(f.size(), Rational(0))};
    Rational max_weight = 0;
    for (std::size_t z = 0; z < level.size(); ++z) {
      if (level[z] == 0) continue;
      max_weight = std::max(max_weight, level[z]);
      for (std::size_t i = 0; i < f.size(); ++i) avg.values[i] += level[z] * powers[z].values[i];
    }
    Rational n2 = norm_sq(avg - theta_f);
    out.norms.push_back(std::sqrt(to_double(n2)));
    out.norms_sq.push_back(std::move(n2));
    out.max_weights.push_back(std::move(max_weight));
  }
  return out;
}

Rational cesaro_average(const MarkovMatrix& t, const VectorOnAtoms& f, std::size_t n) {
  require_same(t.size(), f.size(), "cesaro");
  if (n == 0) fail(ErrorCode::ConfigError, "Cesaro average over zero terms");
  if (!is_ergodic(t)) fail(ErrorCode::NotErgodic, "T has more than one invariant atom class");
  VectorOnAtoms sum{std::vector<Rational>(f.size(), Rational(0))};
  VectorOnAtoms cur = f;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < f.size(); ++a) sum.values[a] += cur.values[a];
    if (i + 1 < n) cur = apply(t, cur);
  }
  for (auto& v : sum.values) v /= Rational(n);
  return norm_sq(sum - project_constants(f));
}

Rational intertwining_residual(const MarkovMatrix& p, const MarkovMatrix& t, const MarkovMatrix& s) {
  return frobenius_distance_sq(compose(p, t), compose(s, p));
}

// ---------------------------------------------------------------------------

void SetFamily::validate() const {
  if (ground > 64) fail(ErrorCode::ConfigError, "ground set limited to 64 atoms");
  const std::uint64_t mask = ground == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ground) - 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    if ((a | b) & ~mask) fail(ErrorCode::ConfigError, "set outside the ground set");
    if (a & b) fail(ErrorCode::OverlapViolation, "A_" + std::to_string(i + 1) + " and B_" + std::to_string(i + 1) + " intersect");
  }
}

namespace {

std::uint64_t union_cells(const SetFamily& family) {
  std::uint64_t cells = 0;
  for (std::size_t x = 0; x < family.ground; ++x) {
    std::uint64_t partners = 0;
    for (const auto& [a, b] : family.pairs) {
      if ((a >> x) & 1U) partners |= b;
    }
    cells += static_cast<std::uint64_t>(std::popcount(partners));
  }
  return cells;
}

Rational pair_bound(std::size_t r) { return Rational(1) - dyadic(static_cast<unsigned>(4 * r)); }

void record(ProductSearchResult& acc, const SetFamily& family) {
  const ProductSetResult r = product_set_bound(family);
  ++acc.families;
  if (!r.holds) ++acc.violations;
  if (acc.families == 1 || r.measure > acc.max_measure) {
    acc.max_measure = r.measure;
    acc.argmax = family;
  }
}

}  // namespace

ProductSetResult product_set_bound(const SetFamily& family) {
  family.validate();
  ProductSetResult out;
  const auto m = static_cast<std::int64_t>(family.ground);
  out.measure = m == 0 ? Rational(0) : ratio(static_cast<long>(union_cells(family)), static_cast<long>(m * m));
  out.bound = pair_bound(family.pairs.size());
  out.holds = out.measure <= out.bound;
  return out;
}

ProductSearchResult exhaustive_product_search(std::size_t r, std::size_t m) {
  if (m > 12 || r > 4) fail(ErrorCode::BudgetExceeded, "exhaustive search limited to r <= 4, m <= 12");
  // Each atom is in A_i, in B_i or in neither: 3^m choices per pair.
  std::uint64_t per_pair = 1;
  for (std::size_t i = 0; i < m; ++i) per_pair *= 3;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> choices;
  choices.reserve(per_pair);
  for (std::uint64_t code = 0; code < per_pair; ++code) {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = code;
    for (std::size_t x = 0; x < m; ++x, c /= 3) {
      if (c % 3 == 1) a |= std::uint64_t{1} << x;
      if (c % 3 == 2) b |= std::uint64_t{1} << x;
    }
    choices.emplace_back(a, b);
  }
  ProductSearchResult acc;
  SetFamily family{m, std::vector<std::pair<std::uint64_t, std::uint64_t>>(r)};
  std::vector<std::size_t> index(r, 0);
  while (true) {
    for (std::size_t i = 0; i < r; ++i) family.pairs[i] = choices[index[i]];
    record(acc, family);
    std::size_t pos = 0;
    while (pos < r && ++index[pos] == choices.size()) index[pos++] = 0;
    if (pos == r) break;
  }
  return acc;
}

ProductSearchResult random_product_search(std::size_t r_max, std::size_t m_max, std::size_t count,
                                          std::mt19937_64& rng) {
  if (m_max == 0 || m_max > 64 || r_max == 0) fail(ErrorCode::ConfigError, "bad random search bounds");
  std::uniform_int_distribution<std::size_t> pick_r(1, r_max);
  std::uniform_int_distribution<std::size_t> pick_m(1, m_max);
  std::uniform_int_distribution<int> pick_side(0, 2);
  ProductSearchResult acc;
  for (std::size_t n = 0; n < count; ++n) {
    SetFamily family{pick_m(rng), {}};
    const std::size_t r = pick_r(rng);
    for (std::size_t i = 0; i < r; ++i) {
      std::uint64_t a = 0;
      std::uint64_t b = 0;
      for (std::size_t x = 0; x < family.ground; ++x) {
        const int side = pick_side(rng);
        if (side == 1) a |= std::uint64_t{1} << x;
        if (side == 2) b |= std::uint64_t{1} << x;
      }
      family.pairs.emplace_back(a, b);
    }
    record(acc, family);
  }
  return acc;
}

// ---------------------------------------------------------------------------

JoiningTable joining_of_matrix(const MarkovMatrix& p) {
  const std::size_t n = p.size();
  JoiningTable nu{n, std::vector<Rational>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) nu.mass[i * n + j] = p(j, i) / Rational(n);
  }
  return nu;
}

MarkovMatrix matrix_of_joining(const JoiningTable& nu) {
  const std::size_t n = nu.n;
  if (n == 0 || nu.mass.size() != n * n) fail(ErrorCode::DimensionMismatch, "joining table shape");
  const Rational marginal(1, n);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Rational row = 0;
    Rational col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (nu(i, j) < 0) fail(ErrorCode::BadMarginals, "negative joining mass");
      row += nu(i, j);
      col += nu(j, i);
      rows[j][i] = nu(i, j) * Rational(n);
    }
    if (row != marginal || col != marginal) fail(ErrorCode::BadMarginals, "marginal of atom " + std::to_string(i) + " is not 1/n");
  }
  return MarkovMatrix::from_rows(rows);
}

// ---------------------------------------------------------------------------

namespace {

using Tensor = std::vector<Rational>;  // n x n, row-major

Tensor outer(const VectorOnAtoms& f, const VectorOnAtoms& g) {
  const std::size_t n = f.size();
  Tensor out(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = f.values[i] * g.values[j];
  }
  return out;
}

/// (T (x) T) X = T X T^t.
Tensor tensor_apply(const MarkovMatrix& t, const Tensor& x) {
  const std::size_t n = t.size();
  Tensor tmp(n * n, Rational(0));
  Tensor out(n * n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (t(i, k) == 0) continue;
      for (std::size_t j = 0; j < n; ++j) tmp[i * n + j] += t(i, k) * x[k * n + j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (t(j, k) != 0) out[i * n + j] += tmp[i * n + k] * t(j, k);
      }
    }
  }
  return out;
}

}  // namespace

Rational staircase_identity_residual(const MarkovMatrix& t, std::span<const std::size_t> b, std::size_t q) {
  const std::size_t n = t.size();
  const VectorOnAtoms chi = indicator(n, b);
  const Rational mu_b = chi.mean();
  const VectorOnAtoms theta_chi = project_constants(chi);

  std::vector<VectorOnAtoms> powers{chi};
  while (powers.size() < q + 2) powers.push_back(apply(t, powers.back()));

  // m P_m chi_B = chi_B + T chi_B + ... + T^{m-2} chi_B + Theta chi_B.
  auto scaled_average = [&](std::size_t m) {
    VectorOnAtoms s = theta_chi;
    for (std::size_t i = 0; i + 2 <= m; ++i) {
      for (std::size_t a = 0; a < n; ++a) s.values[a] += powers[i].values[a];
    }
    return s;
  };
  const Rational scale = (1 + mu_b) * (1 + mu_b);
  auto g = [&](std::size_t m) {
    const VectorOnAtoms s = scaled_average(m);
    Tensor out = outer(s, s);
    for (auto& v : out) v /= scale;
    return out;
  };

  const Tensor g2 = g(q + 2);
  const Tensor g1 = g(q + 1);
  const Tensor g0 = g(q);
  const Tensor tg1 = tensor_apply(t, g1);
  const Tensor tg0 = tensor_apply(t, g0);
  const Tensor f1 = outer(chi, powers[q]);
  const Tensor f2 = outer(powers[q], chi);

  Rational residual = 0;
  for (std::size_t i = 0; i < n * n; ++i) {
    const Rational d = f1[i] + f2[i] - scale * (g2[i] - g1[i] - tg1[i] + tg0[i]);
    residual += d * d;
  }
  return residual;
}

// ---------------------------------------------------------------------------

MarkovMatrix random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::shuffle(sigma.begin(), sigma.end(), rng);
  return MarkovMatrix::permutation(sigma);
}

MarkovMatrix random_doubly_stochastic(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> weight(1, 9);
  std::vector<MarkovMatrix> perms;
  std::vector<Rational> weights;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < terms; ++i) {
    perms.push_back(random_permutation(n, rng));
    weights.emplace_back(weight(rng));
    total += weights.back().get_num().get_si();
  }
  for (auto& w : weights) w /= Rational(total);
  return convex_combination(perms, weights);
}

VectorOnAtoms random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-20, 20);
  std::uniform_int_distribution<int> den(1, 7);
  VectorOnAtoms f;
  for (std::size_t i = 0; i < n; ++i) f.values.emplace_back(num(rng), den(rng));
  for (auto& v : f.values) v.canonicalize();
  return f;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Rational> parse_row(const std::string& line) {
  std::vector<Rational> row;
  std::istringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) row.push_back(parse_rational(item));
  return row;
}

}  // namespace

MarkovMatrix parse_matrix_csv(std::istream& in) {
  std::vector<std::vector<Rational>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_row(line));
  }
  if (rows.empty()) fail(ErrorCode::ConfigError, "matrix file has no rows");
  return MarkovMatrix::from_rows(rows);
}

std::string format_matrix_csv(const MarkovMatrix& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) out += (j ? "," : "") + to_string(p(i, j));
    out += "\n";
  }
  return out;
}

VectorOnAtoms parse_vector(const std::string& text) {
  VectorOnAtoms f{parse_row(text)};
  if (f.values.empty()) fail(ErrorCode::ConfigError, "empty vector");
  return f;
}

}  // namespace ergolab::markov
