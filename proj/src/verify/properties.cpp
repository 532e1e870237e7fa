#include "ergolab/verify/properties.hpp"

#include "ergolab/cascade.hpp"
#include "ergolab/error.hpp"
#include "ergolab/ledrappier.hpp"
#include "ergolab/markov.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/verify/oracles.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace ergolab::verify {

namespace {

/// Collects the outcome of one named property.
class Check {
 public:
  Check(std::string module, std::string name) : result_{std::move(module), std::move(name), 0, 0, {}} {}

  void expect(bool ok, const std::function<std::string()>& describe) {
    ++result_.cases;
    if (ok) return;
    if (result_.failures++ == 0) result_.first_failure = describe();
  }

  /// Runs `body`, turning a library error into a failed case.
  void guarded(const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      expect(false, [&] { return std::string(error_name(e.code())) + ": " + e.what(); });
    }
  }

  PropertyResult done() { return std::move(result_); }

 private:
  PropertyResult result_;
};

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

std::string show(const Rational& lo, const Rational& hi) { return "[" + to_string(lo) + ", " + to_string(hi) + "]"; }

// ---------------------------------------------------------------------------
// Rank-one towers

/// Finite recipe with cuts 2..3 and 0..2 spacers per column, grown while
/// the last tower stays at most `max_height` levels high.
rank_one::Construction random_recipe(std::mt19937_64& rng, std::uint64_t max_height) {
  rank_one::Construction c;
  c.initial_height = pick(rng, 1, 3);
  c.initial_base_width = ratio(static_cast<long>(pick(rng, 1, 3)), static_cast<long>(pick(rng, 1, 4)));
  std::uint64_t h = c.initial_height;
  for (;;) {
    rank_one::SpacerProfile p;
    p.cuts = static_cast<std::uint32_t>(pick(rng, 2, 3));
    std::uint64_t next = 0;
    for (std::uint32_t col = 0; col < p.cuts; ++col) {
      p.spacers.push_back(pick(rng, 0, 2));
      next += h + p.spacers.back();
    }
    if (next > max_height) break;
    c.stages.push_back(std::move(p));
    h = next;
  }
  return c;
}

rank_one::TowerView build_full(const rank_one::Construction& c) {
  rank_one::BuildOptions options;
  options.mass_cap_factor = 1000;
  return rank_one::build(c, *c.max_stage(), options);
}

rank_one::LevelSet random_set(const rank_one::TowerView& view, std::size_t stage, std::mt19937_64& rng) {
  rank_one::LevelSet s = rank_one::empty_set(view, stage);
  const std::uint64_t density = pick(rng, 1, 3);
  for (std::uint64_t l = 0; l < view.height(stage); ++l) {
    if (pick(rng, 0, 3) < density) s.levels.set(l);
  }
  return s;
}

/// Random sets on stages <= `top` with shifts (first one 0) summing below h_top.
struct Query {
  std::vector<rank_one::LevelSet> sets;
  std::vector<std::int64_t> shifts;
};

Query random_query(const rank_one::TowerView& view, std::size_t top, std::mt19937_64& rng) {
  Query q;
  const std::size_t count = pick(rng, 2, 3);
  const auto budget = static_cast<std::int64_t>(view.height(top)) - 1;
  std::int64_t left = budget;
  for (std::size_t i = 0; i < count; ++i) {
    q.sets.push_back(random_set(view, pick(rng, 1, top), rng));
    if (i == 0) {
      q.shifts.push_back(0);
      continue;
    }
    const std::int64_t mag = left <= 0 ? 0 : static_cast<std::int64_t>(pick(rng, 0, static_cast<std::uint64_t>(left / 2)));
    left -= mag;
    q.shifts.push_back(pick(rng, 0, 1) ? mag : -mag);
  }
  return q;
}

std::vector<OracleSet> oracle_sets(const std::vector<rank_one::LevelSet>& sets) {
  std::vector<OracleSet> out;
  for (const auto& s : sets) out.push_back(oracle_set(s));
  return out;
}

bool nested(const rank_one::CorrelationBound& outer, const rank_one::CorrelationBound& inner) {
  return outer.contains(inner);
}

}  // namespace

std::vector<PropertyResult> rank_one_properties(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PropertyResult> out;

  {
    Check check("rank_one", "height recurrence");
    std::vector<rank_one::Construction> recipes = {rank_one::chacon(), rank_one::asym5(), rank_one::preset("staircase")};
    for (int i = 0; i < 120; ++i) recipes.push_back(random_recipe(rng, 200));
    for (const auto& c : recipes) {
      check.guarded([&] {
        rank_one::BuildOptions options;
        options.mass_cap_factor = 1000;
        const std::size_t depth = c.periodic ? 6 : *c.max_stage();
        const auto view = rank_one::build(c, depth, options);
        const auto heights = oracle_heights(c, depth);
        for (std::size_t n = 1; n <= depth; ++n) {
          check.expect(view.height(n) == heights[n - 1] && view.level_width(n) == oracle_width(c, n) &&
                           view.tower_mass(n) <= view.total_mass(),
                       [&] { return "stage " + std::to_string(n) + " height " + std::to_string(view.height(n)); });
          if (n > 1) {
            const auto& p = c.profile(n - 1);
            check.expect(view.height(n) == p.cuts * view.height(n - 1) + p.spacer_total() && view.height(n) > view.height(n - 1),
                         [&] { return "recurrence fails at stage " + std::to_string(n); });
          }
        }
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("rank_one", "measure conservation under refine");
    for (int i = 0; i < 240; ++i) {
      const auto c = random_recipe(rng, 200);
      check.guarded([&] {
        const auto view = build_full(c);
        const std::size_t top = view.stage();
        const std::size_t from = pick(rng, 1, top);
        const std::size_t mid = pick(rng, from, top);
        const auto a = random_set(view, from, rng);
        const auto to_mid = rank_one::refine(view, a, mid);
        const auto to_top = rank_one::refine(view, a, top);
        const bool mass = rank_one::measure(view, to_mid) == rank_one::measure(view, a) &&
                          rank_one::measure(view, to_top) == rank_one::measure(view, a);
        const bool chain = rank_one::refine(view, to_mid, top) == to_top;
        check.expect(mass && chain, [&] {
          return "refine " + std::to_string(from) + " -> " + std::to_string(mid) + " -> " + std::to_string(top) +
                 (mass ? " is not transitive" : " changes mass");
        });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("rank_one", "nested enclosures");
    for (int i = 0; i < 160; ++i) {
      const auto c = random_recipe(rng, 200);
      check.guarded([&] {
        const auto view = build_full(c);
        if (view.stage() < 3) return;
        const std::size_t j0 = view.stage() - 1;
        const auto q = random_query(view, j0, rng);
        const auto shallow = rank_one::correlation(view, q.sets, q.shifts, j0);
        const auto deep = rank_one::correlation(view, q.sets, q.shifts, j0 + 1);
        const auto refined = rank_one::correlation(view, q.sets, q.shifts, j0, {1});
        check.expect(nested(shallow, deep) && nested(shallow, refined) && refined.lower <= refined.upper,
                     [&] { return "stage " + std::to_string(j0) + " " + show(shallow.lower, shallow.upper) +
                                  " does not contain " + show(deep.lower, deep.upper); });
      });
    }
    // Chacon: every evaluation stage tightens the same query.
    check.guarded([&] {
      const auto view = rank_one::build(rank_one::chacon(), 8);
      const auto a = rank_one::level_range(view, 4, 0, 20);
      const rank_one::LevelSet sets[] = {a, a, a};
      const std::int64_t shifts[] = {0, 40, 80};
      auto prev = rank_one::correlation(view, sets, shifts, 5);
      for (std::size_t j = 6; j <= 8; ++j) {
        const auto next = rank_one::correlation(view, sets, shifts, j);
        check.expect(nested(prev, next), [&] { return "chacon stage " + std::to_string(j) + " widens"; });
        prev = next;
      }
      for (std::size_t d = 1; d <= 3; ++d) {
        const auto next = rank_one::correlation(view, sets, shifts, 8, {d});
        check.expect(nested(prev, next), [&] { return "chacon refine depth " + std::to_string(d) + " widens"; });
        prev = next;
      }
    });
    out.push_back(check.done());
  }

  {
    Check check("rank_one", "shift adjoint symmetry");
    for (int i = 0; i < 240; ++i) {
      const auto c = random_recipe(rng, 200);
      check.guarded([&] {
        const auto view = build_full(c);
        const std::size_t j = view.stage();
        const auto a = random_set(view, pick(rng, 1, j), rng);
        const auto b = random_set(view, pick(rng, 1, j), rng);
        const auto k = static_cast<std::int64_t>(pick(rng, 0, view.height(j) - 1)) * (pick(rng, 0, 1) ? 1 : -1);
        const rank_one::LevelSet ab[] = {a, b};
        const rank_one::LevelSet ba[] = {b, a};
        const std::int64_t fwd[] = {0, k};
        const std::int64_t back[] = {0, -k};
        const auto x = rank_one::correlation(view, ab, fwd, j);
        const auto y = rank_one::correlation(view, ba, back, j);
        const bool meet = x.lower <= y.upper && y.lower <= x.upper;
        const bool exact = x.width() != 0 || y.width() != 0 || x.lower == y.lower;
        check.expect(meet && exact, [&] { return "k = " + std::to_string(k) + ": " + show(x.lower, x.upper) + " vs " +
                                                  show(y.lower, y.upper); });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("rank_one", "orbit oracle agreement (h_J <= 200)");
    for (int i = 0; i < 320; ++i) {
      const auto c = random_recipe(rng, 200);
      check.guarded([&] {
        const auto view = build_full(c);
        const std::size_t j = view.stage();
        if (j < 2) return;
        // Plain truncation at the last stage is the oracle's own rule.
        const auto q = random_query(view, j, rng);
        const auto os = oracle_sets(q.sets);
        const auto engine = rank_one::correlation(view, q.sets, q.shifts, j);
        const auto oracle = orbit_correlation(c, view.total_mass(), os, q.shifts, j);
        check.expect(engine.lower == oracle.lower && engine.upper == oracle.upper,
                     [&] { return "stage " + std::to_string(j) + ": engine " + show(engine.lower, engine.upper) +
                                  " oracle " + show(oracle.lower, oracle.upper); });
        // Band resolution one stage down reproduces the deeper oracle.
        const auto q2 = random_query(view, j - 1, rng);
        const auto os2 = oracle_sets(q2.sets);
        const auto resolved = rank_one::correlation(view, q2.sets, q2.shifts, j - 1, {1});
        const auto deep = orbit_correlation(c, view.total_mass(), os2, q2.shifts, j);
        check.expect(resolved.lower == deep.lower && resolved.upper == deep.upper,
                     [&] { return "resolved at stage " + std::to_string(j - 1) + ": engine " +
                                  show(resolved.lower, resolved.upper) + " oracle " + show(deep.lower, deep.upper); });
      });
    }
    out.push_back(check.done());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markov operators

namespace {

std::vector<std::vector<Rational>> rows_of(const markov::MarkovMatrix& p) {
  std::vector<std::vector<Rational>> rows(p.size(), std::vector<Rational>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) rows[i][j] = p(i, j);
  }
  return rows;
}

bool doubly_stochastic(const markov::MarkovMatrix& p) {
  try {
    markov::MarkovMatrix::from_rows(rows_of(p));
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Rational upper bound for a non-negative double.
Rational rational_above(double x) {
  const long scale = 1L << 30;
  return ratio(static_cast<long>(x * scale) + 2, scale);
}

/// Convex combination of I and cyclic powers: normal, and mixing when the
/// identity weight is positive.
markov::MarkovMatrix random_circulant(std::size_t n, std::mt19937_64& rng) {
  std::vector<markov::MarkovMatrix> terms;
  std::vector<Rational> weights;
  Rational total = 0;
  markov::MarkovMatrix power = markov::MarkovMatrix::identity(n);
  const auto shift = markov::MarkovMatrix::cyclic(n);
  for (std::size_t z = 0; z < n; ++z) {
    const auto w = static_cast<long>(z == 0 ? pick(rng, 1, 4) : pick(rng, 0, 4));
    terms.push_back(power);
    weights.emplace_back(w);
    total += w;
    power = markov::compose(shift, power);
  }
  for (auto& w : weights) w /= total;
  return markov::convex_combination(terms, weights);
}

}  // namespace

std::vector<PropertyResult> markov_properties(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PropertyResult> out;

  {
    Check check("markov", "closure under compose and adjoint");
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = pick(rng, 1, 6);
      const auto p = markov::random_doubly_stochastic(n, pick(rng, 1, 4), rng);
      const auto q = markov::random_doubly_stochastic(n, pick(rng, 1, 4), rng);
      check.expect(doubly_stochastic(markov::compose(p, q)) && doubly_stochastic(markov::adjoint(p)),
                   [&] { return "n = " + std::to_string(n); });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "theta absorbing");
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = pick(rng, 1, 6);
      const auto p = markov::random_doubly_stochastic(n, pick(rng, 1, 4), rng);
      const auto theta = markov::MarkovMatrix::theta(n);
      check.expect(markov::compose(theta, p) == theta && markov::compose(p, theta) == theta,
                   [&] { return "n = " + std::to_string(n); });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "symmetrization identity");
    for (int i = 0; i < 300; ++i) {
      const std::size_t n = pick(rng, 1, 8);
      const auto p = markov::random_doubly_stochastic(n, pick(rng, 1, 5), rng);
      const auto f = markov::random_vector(n, rng);
      const auto s = markov::symmetrization_residual(p, f);
      check.expect(s.residual() == 0, [&] { return "lhs " + to_string(s.lhs) + " rhs " + to_string(s.rhs); });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "P*P = Theta forces P = Theta");
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = pick(rng, 1, 6);
      const auto theta = markov::MarkovMatrix::theta(n);
      const auto r = markov::random_doubly_stochastic(n, pick(rng, 1, 3), rng);
      const Rational a = ratio(static_cast<long>(pick(rng, 0, 4)), 4);
      const markov::MarkovMatrix terms[] = {theta, r};
      const Rational weights[] = {a, 1 - a};
      const auto p = markov::convex_combination(terms, weights);
      const bool premise = markov::compose(markov::adjoint(p), p) == theta;
      check.expect(!premise || p == theta, [&] { return "n = " + std::to_string(n) + " a = " + to_string(a); });
      // Zero norm on the zero-mean space under the premise.
      if (premise) {
        const auto f = markov::random_vector(n, rng);
        check.expect(markov::norm_sq(markov::apply(p, f - markov::project_constants(f))) == 0, [] { return "nonzero norm"; });
      }
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "joining round trip");
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = pick(rng, 1, 6);
      const auto p = markov::random_doubly_stochastic(n, pick(rng, 1, 4), rng);
      check.guarded([&] {
        const auto nu = markov::joining_of_matrix(p);
        check.expect(markov::matrix_of_joining(nu) == p && markov::joining_of_matrix(markov::matrix_of_joining(nu)) == nu,
                     [&] { return "n = " + std::to_string(n); });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "Blum-Hanson modulus");
    for (int i = 0; i < 60; ++i) {
      const std::size_t n = pick(rng, 2, 8);
      const auto t = random_circulant(n, rng);
      if (!markov::is_mixing(t)) continue;
      const double rho = markov::spectral_estimate(t).second_modulus;
      if (rho > 0.999) continue;
      const Rational rho_up = rational_above(rho);
      const auto f = markov::random_vector(n, rng);
      const auto g = f - markov::project_constants(f);
      std::vector<markov::WeightLevel> levels;
      for (int l = 0; l < 4; ++l) levels.push_back(markov::uniform_window(pick(rng, 0, 10), pick(rng, 1, 40)));
      check.guarded([&] {
        const auto res = markov::blum_hanson_average(t, levels, f);
        for (std::size_t l = 0; l < levels.size(); ++l) {
          const Rational bound = res.max_weights[l] * (1 + rho_up) / (1 - rho_up) * markov::norm_sq(g);
          check.expect(res.norms_sq[l] <= bound, [&] { return "norm^2 " + to_string(res.norms_sq[l]) + " > " + to_string(bound); });
        }
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "product-set bound and brute force");
    for (int i = 0; i < 300; ++i) {
      const std::size_t m = pick(rng, 1, 8);
      const std::size_t r = pick(rng, 1, 4);
      markov::SetFamily family{m, {}};
      for (std::size_t p = 0; p < r; ++p) {
        std::uint64_t a = 0;
        std::uint64_t b = 0;
        for (std::size_t atom = 0; atom < m; ++atom) {
          const auto side = pick(rng, 0, 2);
          if (side == 1) a |= std::uint64_t{1} << atom;
          if (side == 2) b |= std::uint64_t{1} << atom;
        }
        family.pairs.emplace_back(a, b);
      }
      const auto res = markov::product_set_bound(family);
      check.expect(res.holds && res.measure == brute_product_measure(family) && res.measure <= res.bound,
                   [&] { return "m = " + std::to_string(m) + " r = " + std::to_string(r) + " measure " + to_string(res.measure); });
    }
    out.push_back(check.done());
  }

  {
    Check check("markov", "Cesaro over full cycles");
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto t = markov::MarkovMatrix::cyclic(n);
      const auto f = markov::random_vector(n, rng);
      for (std::size_t m = 1; m <= 3; ++m) {
        check.expect(markov::cesaro_average(t, f, n * m) == 0, [&] { return "n = " + std::to_string(n); });
      }
    }
    out.push_back(check.done());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ledrappier

namespace {

bool is_dyadic_or_zero(const Rational& r) {
  if (r == 0) return true;
  if (r.get_num() != 1) return false;
  const mpz_class& d = r.get_den();
  return mpz_popcount(d.get_mpz_t()) == 1;
}

ledrappier::Cylinder random_cylinder(const ledrappier::TorusLattice& lat, std::size_t max_sites, std::mt19937_64& rng) {
  ledrappier::Cylinder cyl;
  const std::size_t count = pick(rng, 1, max_sites);
  while (cyl.constraints.size() < count) {
    const ledrappier::Site s{static_cast<std::int64_t>(pick(rng, 0, lat.nx - 1)), static_cast<std::int64_t>(pick(rng, 0, lat.ny - 1))};
    const bool seen = std::any_of(cyl.constraints.begin(), cyl.constraints.end(),
                                  [&](const ledrappier::Constraint& c) { return lat.index(c.site) == lat.index(s); });
    if (!seen) cyl.constraints.push_back({s, pick(rng, 0, 1) == 1});
  }
  return cyl;
}

std::vector<ledrappier::Site> sites_of(const ledrappier::Cylinder& cyl) {
  std::vector<ledrappier::Site> out;
  for (const auto& c : cyl.constraints) out.push_back(c.site);
  return out;
}

}  // namespace

std::vector<PropertyResult> ledrappier_properties(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PropertyResult> out;
  const auto lat8 = ledrappier::TorusLattice::closing(8);
  const auto lat16 = ledrappier::TorusLattice::closing(16);
  const auto sys8 = ledrappier::build_system(lat8);
  const auto sys16 = ledrappier::build_system(lat16);
  const ledrappier::F2System* systems[] = {&sys8, &sys16};

  {
    Check check("ledrappier", "relation holds on the basis");
    for (const auto* sys : systems) {
      for (const auto& row : sys->basis()) {
        bool ok = true;
        for (std::size_t i = 0; i < sys->lattice().sites(); ++i) ok = ok && !sys->relation(row, sys->lattice().site(i));
        check.expect(ok, [] { return "basis vector violates the relation"; });
      }
      check.expect(sys->dimension() == 2 * sys->lattice().nx, [&] { return "dim " + std::to_string(sys->dimension()); });
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "dyadic cylinder measures");
    for (int i = 0; i < 200; ++i) {
      const auto* sys = systems[i % 2];
      const auto cyl = random_cylinder(sys->lattice(), 8, rng);
      const auto m = ledrappier::cylinder_measure(*sys, cyl);
      check.expect(is_dyadic_or_zero(m), [&] { return "measure " + to_string(m); });
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "factorization of independent cylinders");
    for (int i = 0; i < 200; ++i) {
      const auto* sys = systems[i % 2];
      const auto cyl = random_cylinder(sys->lattice(), 6, rng);
      const auto sites = sites_of(cyl);
      if (!ledrappier::dependency_scan(*sys, sites).empty()) continue;
      Rational product = 1;
      for (const auto& c : cyl.constraints) product *= ledrappier::cylinder_measure(*sys, std::span(&c, 1));
      const auto m = ledrappier::cylinder_measure(*sys, cyl);
      check.expect(m == product, [&] { return to_string(m) + " != " + to_string(product); });
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "translation invariance");
    for (int i = 0; i < 200; ++i) {
      const auto* sys = systems[i % 2];
      const auto cyl = random_cylinder(sys->lattice(), 6, rng);
      const ledrappier::Site by{static_cast<std::int64_t>(pick(rng, 0, 40)) - 20, static_cast<std::int64_t>(pick(rng, 0, 40)) - 20};
      check.expect(ledrappier::cylinder_measure(*sys, cyl) == ledrappier::cylinder_measure(*sys, cyl.translated(by)),
                   [&] { return "shift (" + std::to_string(by.x) + "," + std::to_string(by.y) + ")"; });
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "monotonicity");
    for (int i = 0; i < 200; ++i) {
      const auto* sys = systems[i % 2];
      auto cyl = random_cylinder(sys->lattice(), 7, rng);
      const auto extra = cyl.constraints.back();
      cyl.constraints.pop_back();
      const auto before = ledrappier::cylinder_measure(*sys, cyl);
      auto sites = sites_of(cyl);
      const auto deps_before = ledrappier::dependency_scan(*sys, sites).size();
      sites.push_back(extra.site);
      const bool independent = ledrappier::dependency_scan(*sys, sites).size() == deps_before;
      cyl.constraints.push_back(extra);
      const auto after = ledrappier::cylinder_measure(*sys, cyl);
      check.expect(after <= before && (!independent || after == before / 2),
                   [&] { return to_string(before) + " -> " + to_string(after); });
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "cross witness for 2^k <= N/4");
    for (const auto* sys : systems) {
      const ledrappier::Cylinder zero{{{{0, 0}, false}}};
      for (std::int64_t d = 1; 4 * d <= sys->lattice().nx; d *= 2) {
        const auto shifts = ledrappier::cross_family({0, 0}, d);
        const auto m = ledrappier::shifted_correlation(*sys, zero, shifts);
        check.expect(m == Rational(1, 16), [&] { return "d = " + std::to_string(d) + ": " + to_string(m); });
      }
    }
    out.push_back(check.done());
  }

  {
    Check check("ledrappier", "row-transfer oracle agreement");
    const auto span8 = transfer_span(lat8);
    check.expect(span8.generators.size() == sys8.dimension(), [&] { return "dim " + std::to_string(span8.generators.size()); });
    for (int i = 0; i < 150; ++i) {
      const auto cyl = random_cylinder(lat8, 8, rng);
      const auto engine = ledrappier::cylinder_measure(sys8, cyl);
      const auto oracle = transfer_measure(span8, cyl.constraints);
      check.expect(engine == oracle, [&] { return to_string(engine) + " vs " + to_string(oracle); });
    }
    out.push_back(check.done());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cascades

namespace {

cascade::CocycleFunction random_zero_mean(std::size_t stage, std::uint64_t levels, std::mt19937_64& rng) {
  cascade::CocycleFunction f{stage, {}};
  std::int64_t sum = 0;
  for (std::uint64_t l = 0; l + 1 < levels; ++l) {
    f.values.push_back(static_cast<std::int64_t>(pick(rng, 0, 6)) - 3);
    sum += f.values.back();
  }
  f.values.push_back(-sum);
  return f;
}

}  // namespace

std::vector<PropertyResult> cascade_properties(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PropertyResult> out;

  {
    Check check("cascade", "zero mean preserved by refine");
    for (int i = 0; i < 60; ++i) {
      check.guarded([&] {
        const auto radix = static_cast<std::uint32_t>(pick(rng, 2, 4));
        const auto base = cascade::BaseSystem::odometer(radix, 6);
        const std::size_t stage = pick(rng, 1, 3);
        const auto f = random_zero_mean(stage, base.view().height(stage), rng);
        f.validate(base);
        const auto g = f.refine(base, stage + pick(rng, 0, 3));
        check.expect(g.integral(base) == 0 && g.integral(base) == f.integral(base), [] { return "odometer refine"; });
      });
      check.guarded([&] {
        const auto base = cascade::BaseSystem::tower(rank_one::build(rank_one::chacon(), 6), 6);
        const std::size_t stage = pick(rng, 1, 3);
        const auto f = random_zero_mean(stage, base.view().height(stage), rng);
        const auto g = f.refine(base, stage + pick(rng, 0, 3));
        check.expect(g.integral(base) == f.integral(base) && g.integral(base) == 0, [] { return "tower refine"; });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("cascade", "cocycle identity");
    for (int t = 0; t < 40; ++t) {
      check.guarded([&] {
        const auto base = cascade::BaseSystem::odometer(2, 16);
        const auto f = random_zero_mean(3, 4, rng);
        const std::uint64_t x = pick(rng, 0, base.extent() - 600);
        const auto whole = cascade::orbit_sums(base, f, x, 500);
        const std::uint64_t i = pick(rng, 0, 250);
        const std::uint64_t j = pick(rng, 0, 250);
        const auto tail = cascade::orbit_sums(base, f, base.step(x, static_cast<std::int64_t>(i)), j);
        check.expect(whole.sums[i + j] == whole.sums[i] + tail.sums[j], [&] { return "x = " + std::to_string(x); });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("cascade", "odometer bijectivity and digit oracle");
    for (int t = 0; t < 40; ++t) {
      check.guarded([&] {
        const auto radix = static_cast<std::uint32_t>(pick(rng, 2, 5));
        const auto base = cascade::BaseSystem::odometer(radix, 10);
        const std::uint64_t x = pick(rng, 0, base.extent() / 2);
        const std::uint64_t steps = pick(rng, 0, 300);
        auto digits = base.digits(x);
        check.expect(base.from_digits(digits) == x, [] { return "digit round trip"; });
        for (std::uint64_t s = 0; s < steps; ++s) digit_successor(digits, radix);
        const std::uint64_t y = base.step(x, static_cast<std::int64_t>(steps));
        check.expect(base.digits(y) == digits && base.step(y, -static_cast<std::int64_t>(steps)) == x,
                     [&] { return "x = " + std::to_string(x) + " steps " + std::to_string(steps); });
        // Orbit sums against the carry simulation.
        const std::size_t stage = pick(rng, 1, 3);
        const auto f = random_zero_mean(stage, base.view().height(stage), rng);
        const auto rec = cascade::orbit_sums(base, f, x, steps);
        check.expect(rec.sums == simulate_sums(radix, base.digits(x), stage, f.values, steps),
                     [&] { return "orbit sums differ at x = " + std::to_string(x); });
      });
    }
    out.push_back(check.done());
  }

  {
    Check check("cascade", "recurrence trend in L");
    const auto base = cascade::BaseSystem::odometer(2, 40);
    for (int t = 0; t < 5; ++t) {
      const cascade::CocycleFunction f = random_zero_mean(3, 4, rng);
      if (f.is_zero()) continue;
      const auto sample = base.sample(32, rng);
      Rational prev = 0;
      for (std::uint64_t len : {256U, 1024U, 4096U}) {
        const auto res = cascade::recurrence_statistic(base, f, sample, len, 3);
        check.expect(res.fraction >= prev, [&] { return "fraction drops at L = " + std::to_string(len); });
        prev = res.fraction;
      }
    }
    out.push_back(check.done());
  }

  {
    Check check("cascade", "product degeneration for n = 0");
    const auto fiber = rank_one::build(rank_one::chacon(), 6);
    for (int t = 0; t < 30; ++t) {
      check.guarded([&] {
        const auto base = cascade::BaseSystem::odometer(2, 12);
        const std::size_t s = pick(rng, 2, 5);
        const auto h = static_cast<std::int64_t>(base.view().height(s));
        const auto a = random_set(base.view(), s, rng);
        const auto c = random_set(base.view(), s, rng);
        const auto b = random_set(fiber, 4, rng);
        const auto d = random_set(fiber, 4, rng);
        const std::int64_t k = static_cast<std::int64_t>(pick(rng, 0, 100)) - 50;
        const cascade::CocycleFunction zero{1, {0}};
        const auto skew = cascade::skew_correlation(base, fiber, zero, {a, c, b, d, k, 0, {}});
        // mu(A cap S^k C) on the cyclic stage, counted directly.
        std::int64_t hits = 0;
        for (std::int64_t p = 0; p < h; ++p) {
          hits += a.levels.test(static_cast<std::uint64_t>(p)) && c.levels.test(static_cast<std::uint64_t>((((p - k) % h) + h) % h));
        }
        const Rational base_value = ratio(static_cast<long>(hits), static_cast<long>(h));
        const rank_one::LevelSet fs[] = {b, d};
        const std::int64_t zs[] = {0, 0};
        const auto fb = rank_one::correlation(fiber, fs, zs, fiber.stage());
        check.expect(skew.lower == base_value * fb.lower && skew.upper == base_value * fb.upper,
                     [&] { return "k = " + std::to_string(k) + ": " + show(skew.lower, skew.upper); });
      });
    }
    out.push_back(check.done());
  }
  return out;
}

std::vector<PropertyResult> all_properties(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  for (auto* suite : {&rank_one_properties, &markov_properties, &ledrappier_properties, &cascade_properties}) {
    auto part = suite(seed);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace ergolab::verify
