#include "ergolab/ledrappier.hpp"
#include "ergolab/verify/oracles.hpp"
#include "support/test_support.hpp"

#include <random>

using namespace ergolab;
using namespace ergolab::ledrappier;
using ergolab::testing::code_of;
using ergolab::testing::q;

namespace {

Cylinder zeros(std::initializer_list<Site> sites) {
  Cylinder c;
  for (const auto& s : sites) c.constraints.push_back({s, false});
  return c;
}

bool dyadic_or_zero(const Rational& m) {
  if (m == 0) return true;
  if (m.get_num() != 1) return false;
  const mpz_class& d = m.get_den();
  return mpz_popcount(d.get_mpz_t()) == 1;
}

}  // namespace

TEST_CASE("kernel dimensions") {
  for (std::uint32_t n : {4U, 8U, 16U}) CHECK(build_system(TorusLattice::square(n)).dimension() == 0);
  const std::pair<std::uint32_t, std::uint32_t> closing[] = {{4, 6}, {8, 12}, {16, 24}, {32, 48}};
  for (const auto& [n, m] : closing) {
    const auto lat = TorusLattice::closing(n);
    CHECK(lat.nx == n);
    CHECK(lat.ny == m);
    const auto sys = build_system(lat);
    CHECK(sys.dimension() == 2 * n);
    CHECK(verify::transfer_span(lat).generators.size() == sys.dimension());
  }
}

TEST_CASE("basis rows satisfy the relation everywhere") {
  const auto sys = build_system(TorusLattice::closing(8));
  const auto& lat = sys.lattice();
  LevelBits zero(lat.sites());
  // relation() is the value of the five-point sum, 0 on H.
  for (std::size_t i = 0; i < lat.sites(); ++i) CHECK_FALSE(sys.relation(zero, lat.site(i)));
  std::mt19937_64 rng(1);
  for (const auto& row : sys.basis()) {
    for (int t = 0; t < 10; ++t) CHECK_FALSE(sys.relation(row, lat.site(rng() % lat.sites())));
  }
  // A single set bit violates the relation at its own site.
  LevelBits one(lat.sites());
  one.set(0);
  CHECK(sys.relation(one, {0, 0}));
}

TEST_CASE("cylinder measures") {
  const auto sys = build_system(TorusLattice::closing(16));
  CHECK(cylinder_measure(sys, Cylinder{}) == 1);
  CHECK(cylinder_measure(sys, zeros({{0, 0}})) == q("1/2"));
  CHECK(cylinder_measure(sys, Cylinder{{{{3, 5}, true}}}) == q("1/2"));

  // H = {0} on the square torus: every functional vanishes.
  const auto trivial = build_system(TorusLattice::square(8));
  CHECK(cylinder_measure(trivial, zeros({{0, 0}})) == 1);
  CHECK(cylinder_measure(trivial, Cylinder{{{{0, 0}, true}}}) == 0);

  // The defining relation at (0,0): five bits summing to 1 are impossible.
  Cylinder odd;
  for (const auto& s : std::vector<Site>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) odd.constraints.push_back({s, false});
  odd.constraints[0].bit = true;
  CHECK(cylinder_measure(sys, odd) == 0);
}

TEST_CASE("five-point mixing failure") {
  for (std::uint32_t n : {16U, 32U}) {
    const auto sys = build_system(TorusLattice::closing(n));
    for (std::int64_t d = 1; 4 * d <= n; d *= 2) {
      const Site shifts[] = {{0, 0}, {d, 0}, {-d, 0}, {0, d}, {0, -d}};
      CHECK(shifted_correlation(sys, zeros({{0, 0}}), shifts) == q("1/16"));
      CHECK(cylinder_measure(sys, zeros({{0, 0}, {d, 0}, {-d, 0}, {0, d}, {0, -d}})) == q("1/16"));
    }
  }
  const auto sys = build_system(TorusLattice::closing(16));
  const Site cross_shifts[] = {{0, 0}, {4, 0}, {-4, 0}, {0, 4}, {0, -4}};
  CHECK(shifted_correlation(sys, zeros({{0, 0}}), cross_shifts) == q("1/16"));
  CHECK(cross_family({0, 0}, 4) == std::vector<Site>(std::begin(cross_shifts), std::end(cross_shifts)));
}

TEST_CASE("shifted correlations") {
  const auto sys = build_system(TorusLattice::closing(16));
  const auto base = zeros({{0, 0}});
  const Site origin[] = {{0, 0}};
  CHECK(shifted_correlation(sys, base, origin) == cylinder_measure(sys, base));
  const Site two[] = {{0, 0}, {3, 5}};
  CHECK(shifted_correlation(sys, base, two) == q("1/4"));
  const Site same[] = {{0, 0}, {16, 24}};
  CHECK(shifted_correlation(sys, base, same) == q("1/2"));
}

TEST_CASE("dependency scan") {
  const auto sys = build_system(TorusLattice::closing(16));
  const Site single[] = {{2, 3}};
  CHECK(dependency_scan(sys, single).empty());
  const Site twice[] = {{2, 3}, {2, 3}};
  CHECK(dependency_scan(sys, twice) == std::vector<std::uint32_t>{0b11});
  const auto cross = cross_family({0, 0}, 4);
  CHECK(dependency_scan(sys, cross) == std::vector<std::uint32_t>{0b11111});
  const Site nine[] = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {7, 0}, {8, 0}};
  CHECK(code_of([&] { dependency_scan(sys, nine); }) == ErrorCode::ConfigError);
}

TEST_CASE("measures agree with the transfer oracle") {
  const auto lat = TorusLattice::closing(8);
  const auto sys = build_system(lat);
  const auto span = verify::transfer_span(lat);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    Cylinder c;
    const int k = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) {
      const Site s{static_cast<std::int64_t>(rng() % 8), static_cast<std::int64_t>(rng() % 12)};
      bool seen = false;
      for (const auto& con : c.constraints) seen = seen || con.site == s;
      if (!seen) c.constraints.push_back({s, static_cast<bool>(rng() & 1U)});
    }
    const Rational m = cylinder_measure(sys, c);
    CHECK(m == verify::transfer_measure(span, c.constraints));
    CHECK(dyadic_or_zero(m));
    CHECK(cylinder_measure(sys, c.translated({5, 7})) == m);
  }
}

TEST_CASE("parsing and validation") {
  const auto c = parse_cylinder("(0,0)=0;(1,-2)=1");
  REQUIRE(c.constraints.size() == 2);
  CHECK(c.constraints[1].site == Site{1, -2});
  CHECK(c.constraints[1].bit);
  CHECK(parse_sites("(4,0);(-4,0)") == std::vector<Site>{{4, 0}, {-4, 0}});
  CHECK(code_of([] { parse_cylinder("(0,0)=2"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_sites("(4;0)"); }) == ErrorCode::ConfigError);
  const auto lat = TorusLattice::closing(8);
  CHECK(code_of([&] { parse_cylinder("(0,0)=0;(8,12)=1").validate(lat); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { TorusLattice::closing(2); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { TorusLattice{3, 3}.validate(); }) == ErrorCode::ConfigError);
}
