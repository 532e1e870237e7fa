#include "ergolab/construction_io.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/verify/oracles.hpp"
#include "support/test_support.hpp"

#include <vector>

using namespace ergolab;
using namespace ergolab::rank_one;
using ergolab::testing::code_of;
using ergolab::testing::q;

namespace {

std::vector<std::uint64_t> heights(const TowerView& v) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n <= v.stage(); ++n) out.push_back(v.height(n));
  return out;
}

verify::OracleSet oracle_of(const LevelSet& s) { return verify::oracle_set(s); }

LevelSet stride(const TowerView& v, std::size_t stage, std::uint64_t step, std::uint64_t limit) {
  std::vector<std::uint64_t> levels;
  for (std::uint64_t l = 0; l < limit; l += step) levels.push_back(l);
  return make_level_set(v, stage, levels);
}

}  // namespace

TEST_CASE("chacon heights and partial masses") {
  const auto v = build(chacon(), 4);
  CHECK(heights(v) == std::vector<std::uint64_t>{1, 4, 13, 40});
  CHECK(v.tower_mass(1) == q("2/3"));
  CHECK(v.tower_mass(2) == q("8/9"));
  CHECK(v.tower_mass(3) == q("26/27"));
  CHECK(v.tower_mass(4) == q("80/81"));
  CHECK(v.total_mass() == 1);
  CHECK(heights(build(chacon(), 10)) == verify::oracle_heights(chacon(), 10));
}

TEST_CASE("asym5 and staircase heights") {
  CHECK(heights(build(asym5(), 3)) == std::vector<std::uint64_t>{1, 11, 61});
  CHECK(heights(build(asym5(), 6)) == std::vector<std::uint64_t>{1, 11, 61, 311, 1561, 7811});

  const auto s = build(preset("staircase"), 3);
  CHECK(s.height(2) == 2 * s.height(1) + 1);
  CHECK(s.height(3) == 3 * s.height(2) + 3);
  // Cuts 2..10, so the recipe ends at stage 10 and that tower is the whole space.
  const auto full = build(preset("staircase"), 10);
  CHECK(heights(full) == std::vector<std::uint64_t>{1, 3, 12, 54, 280, 1695, 11886, 95116, 856080, 8560845});
  CHECK(full.tower_mass(9) == q("1189/504"));
  CHECK(full.total_mass() == q("190241/80640"));
  CHECK(full.total_mass() == full.tower_mass(10));
  CHECK(heights(full) == verify::oracle_heights(preset("staircase"), 10));

  CHECK(heights(build(preset("asym5-junction"), 8)) ==
        std::vector<std::uint64_t>{1, 11, 88, 446, 3568, 17846, 142768, 713846});
}

TEST_CASE("preset profiles") {
  CHECK(preset("asym5").stages[0] == SpacerProfile{5, {0, 1, 1, 2, 2}});
  CHECK(preset("chacon").stages[0] == SpacerProfile{3, {0, 1, 0}});
  CHECK(preset("asym5-junction:4").stages.size() > 1);
  CHECK(code_of([] { preset("no-such-preset"); }) == ErrorCode::UnknownPreset);
  CHECK(code_of([] { preset("asym5-junction:1"); }) == ErrorCode::UnknownPreset);
}

TEST_CASE("staircase satisfies the Adams ratio decay") {
  const auto v = build(preset("staircase"), 10);
  const auto r = adams_ratios(v);
  REQUIRE(r.size() >= 7);
  for (std::size_t i = 2; i + 1 < r.size(); ++i) CHECK(r[i + 1] < r[i]);
}

TEST_CASE("refine examples") {
  const auto c = build(chacon(), 6);
  for (std::size_t n = 1; n < 6; ++n) {
    const std::uint64_t h = c.height(n);
    const std::uint64_t zero[] = {0};
    const auto r = refine(c, make_level_set(c, n, zero), n + 1);
    CHECK(r.levels.indices() == std::vector<std::uint64_t>{0, h, 2 * h + 1});
  }
  CHECK(refine(c, empty_set(c, 2), 6).levels.count() == 0);

  const auto a = build(asym5(), 4);
  const std::uint64_t h = a.height(3);
  const std::uint64_t zero[] = {0};
  // Column heights h, h+1, h+1, h+2, h+2 stacked in order.
  CHECK(refine(a, make_level_set(a, 3, zero), 4).levels.indices() ==
        std::vector<std::uint64_t>{0, h, 2 * h + 1, 3 * h + 2, 4 * h + 4});
  CHECK(a.height(4) == 5 * h + 6);

  CHECK(code_of([&] { refine(c, empty_set(c, 4), 2); }) == ErrorCode::StageOrder);
  CHECK(code_of([&] { refine(c, empty_set(c, 4), 7); }) == ErrorCode::StageOrder);
}

TEST_CASE("shift examples") {
  const auto c = build(chacon(), 4);
  const auto e = shift(c, empty_set(c, 3), 5);
  CHECK(e.set.levels.count() == 0);
  CHECK(e.lost_mass == 0);

  const auto f = shift(c, full_tower(c, 3), 0);
  CHECK(f.set == full_tower(c, 3));
  CHECK(f.lost_mass == 0);

  const std::uint64_t top[] = {3};
  const auto t = shift(c, make_level_set(c, 2, top), 1);
  CHECK(t.set.levels.count() == 0);
  CHECK(t.lost_mass == c.level_width(2));
  CHECK(t.lost_mass == q("2/9"));

  CHECK(code_of([&] { shift(c, full_tower(c, 2), 4); }) == ErrorCode::ShiftTooLarge);
}

TEST_CASE("trivial correlations") {
  const auto c = build(chacon(), 8);
  const auto a = level_range(c, 5, 10, 60);
  const LevelSet one[] = {a};
  const std::int64_t zero[] = {0};
  const auto b = correlation(c, one, zero, 7);
  CHECK(b.lower == measure(c, a));
  CHECK(b.upper == measure(c, a));

  const LevelSet disjoint[] = {level_range(c, 5, 0, 10), level_range(c, 5, 10, 20)};
  const std::int64_t zz[] = {0, 0};
  const auto d = correlation(c, disjoint, zz, 7);
  CHECK(d.lower == 0);
  CHECK(d.upper == 0);

  const std::int64_t too_far[] = {0, static_cast<std::int64_t>(c.height(6))};
  CHECK(code_of([&] { correlation(c, disjoint, too_far, 6); }) == ErrorCode::ShiftTooLarge);
  CHECK(code_of([&] { correlation(c, disjoint, zz, 4); }) == ErrorCode::StageOrder);
  CHECK(code_of([&] { correlation(c, disjoint, zero, 7); }) == ErrorCode::ConfigError);
}

TEST_CASE("chacon half-tower correlation against the orbit oracle") {
  // Golden: brute-force orbit enumeration at stage 9.
  const auto c = build(chacon(), 10);
  const auto h8 = c.height(8);
  const auto a = level_range(c, 8, 0, h8 / 2);
  const LevelSet sets[] = {a, a};
  const verify::OracleSet os[] = {oracle_of(a), oracle_of(a)};

  const std::int64_t by_h[] = {0, static_cast<std::int64_t>(h8)};
  const auto exact = correlation(c, sets, by_h, 9);
  CHECK(exact.lower == q("2186/6561"));
  CHECK(exact.upper == q("9838/19683"));
  const auto o = verify::orbit_correlation(chacon(), Rational(1), os, by_h, 9);
  CHECK(exact.lower == o.lower);
  CHECK(exact.upper == o.upper);
  const auto deeper = correlation(c, sets, by_h, 10, {2});
  CHECK(exact.contains(deeper));
  CHECK(deeper.width() < exact.width());

  const std::int64_t by_one[] = {0, 1};
  const auto t = correlation(c, sets, by_one, 9);
  CHECK(t.lower == q("3278/6561"));
  CHECK(t.upper == q("9836/19683"));

  // mu(A cap T^{h_8} A) sits near the Chacon limit (mu(A) + mu(A cap TA)) / 2.
  const Rational mu = measure(c, a);
  const Rational limit = (mu + t.midpoint()) / 2;
  CHECK(abs(Rational(deeper.midpoint() - limit)) < q("1/100"));
}

TEST_CASE("asym5 triple correlations against the orbit oracle") {
  const auto v = build(asym5(), 8);
  const std::int64_t n = static_cast<std::int64_t>(v.height(6)) + 1;
  const std::int64_t fwd[] = {0, n, 3 * n};
  const std::int64_t back[] = {0, -n, -3 * n};
  const auto h4 = v.height(4);

  struct Golden {
    LevelSet set;
    const char* fwd_lower;
    const char* fwd_upper;
    const char* back_lower;
    const char* back_upper;
  };
  const Golden goldens[] = {
      {level_range(v, 4, 0, 1), "2/15625", "154/390625", "0", "96/390625"},
      {stride(v, 4, 11, h4 - 10), "56/15625", "4204/390625", "0", "2796/390625"},
      {level_range(v, 4, 0, h4 / 2), "6744/15625", "191804/390625", "6744/15625", "191786/390625"},
  };
  for (const auto& g : goldens) {
    const LevelSet sets[] = {g.set, g.set, g.set};
    const auto f = correlation(v, sets, fwd, 8);
    const auto b = correlation(v, sets, back, 8);
    CHECK(f.lower == q(g.fwd_lower));
    CHECK(f.upper == q(g.fwd_upper));
    CHECK(b.lower == q(g.back_lower));
    CHECK(b.upper == q(g.back_upper));
  }
}

TEST_CASE("auto correlation meets the tolerance") {
  const auto c = build(chacon(), 10);
  const auto a = level_range(c, 4, 0, 20);
  const LevelSet sets[] = {a, a};
  const std::int64_t shifts[] = {0, 40};
  const auto b = auto_correlation(c, sets, shifts, q("1/100"));
  CHECK(b.width() < q("1/100"));
  CHECK(b.lower == q("1040/2187"));
  CHECK(b.upper == q("3160/6561"));
}

TEST_CASE("weak-limit deviation examples") {
  const auto c = build(chacon(), 8);
  const auto family = single_level_family(c, 3);
  const WeakLimitTarget identity{{{0, Rational(1)}}, 0};
  CHECK(weak_limit_deviation(c, 0, identity, family, 6).deviation == 0);

  // A finite recipe whose last tower is the whole space.
  const auto finite = build(parse_construction("h1 = 1\nw1 = \"1/2\"\nstages = [[2, [0, 1]], [3, [1, 0, 0]]]\n"), 3);
  REQUIRE(finite.tower_mass(3) == finite.total_mass());
  const WeakLimitTarget theta{{}, 1};
  const SetPair full[] = {{full_tower(finite, 3), full_tower(finite, 3)}};
  CHECK(weak_limit_deviation(finite, 0, theta, full, 3).deviation == 0);

  const WeakLimitTarget bad{{{0, q("1/2")}}, 0};
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::BadWeights);
}

TEST_CASE("chacon weak-limit scan") {
  // Regression anchors from the engine, within the acceptance trend.
  const auto c = build(chacon(), 11);
  const auto family = single_level_family(c, 5);
  const WeakLimitTarget half{{{0, q("1/2")}, {1, q("1/2")}}, 0};
  const char* expected[] = {"43/177147", "46/531441", "56/1594323"};
  Rational previous = 1;
  for (std::size_t j = 6; j <= 8; ++j) {
    const auto scan = detect_weak_limit(c, j, half, family, j + 3, {2});
    CHECK(scan.best_shift() == static_cast<std::int64_t>(c.height(j)) + 1);
    CHECK(scan.best_deviation() == q(expected[j - 6]));
    CHECK(scan.best_deviation() < previous);
    previous = scan.best_deviation();
  }
}

TEST_CASE("mixing scan") {
  const auto stair = build(preset("staircase"), 8);
  const auto third = level_range(stair, 4, 0, stair.height(4) / 3);

  // Golden from the brute-force oracle on stage 6.
  const auto s6 = mixing_scan(stair, third, third, third, 300, q("1/20"), 6);
  CHECK(s6.grid_points == 72630);
  CHECK(s6.offenders.size() == 11188);
  CHECK(s6.d == q("2797/75"));

  // Regression anchor at stage 8.
  const auto s8 = mixing_scan(stair, third, third, third, 300, q("1/20"), 8);
  CHECK(s8.grid_points == 72630);
  CHECK(s8.d == q("5119/150"));

  CHECK(mixing_scan(stair, third, third, third, 50, Rational(1), 6).d == 0);

  const auto c = build(chacon(), 6);
  const auto all = full_tower(c, 6);
  CHECK(mixing_scan(c, all, all, all, 20, q("1/20"), 6).d == 0);
  CHECK(code_of([&] { mixing_scan(c, all, all, all, 1000, q("1/20"), 6); }) == ErrorCode::ShiftTooLarge);
}

TEST_CASE("construction files round trip") {
  for (const char* name : {"chacon", "asym5", "staircase", "asym5-junction:5"}) {
    const auto c = preset(name);
    const auto back = parse_construction(format_construction(c));
    CHECK(back.initial_height == c.initial_height);
    CHECK(back.initial_base_width == c.initial_base_width);
    CHECK(back.stages == c.stages);
    CHECK(back.periodic == c.periodic);
  }
  const auto c = parse_construction("h1 = 2\nw1 = \"1/4\"\nstages = [[2, [0, 1]], [3, [1, 0, 2]]]\n");
  const auto v = build(c, 3);
  CHECK(heights(v) == std::vector<std::uint64_t>{2, 5, 18});

  CHECK(code_of([] { parse_construction("h1 = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_construction("h1 = 1\nw1 = \"1/2\"\nbogus = 3\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_construction("h1 = 1\nw1 = \"1/0\"\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_construction("h1 = 1\nw1 = \"1/2\"\nstages = [[1, [0]]]\n").validate(); }) ==
        ErrorCode::ConfigError);
}

TEST_CASE("build errors") {
  CHECK(code_of([] { build(chacon(), 0); }) == ErrorCode::EmptyRecipe);
  CHECK(code_of([] { build(chacon(), 20); }) == ErrorCode::BudgetExceeded);
  const auto finite = parse_construction("h1 = 1\nw1 = \"1/2\"\nstages = [[2, [0, 0]]]\n");
  CHECK(code_of([&] { build(finite, 3); }) == ErrorCode::StageOrder);
  // Spacer mass grows geometrically past the cap.
  const auto heavy = parse_construction("h1 = 1\nw1 = \"1/2\"\nstages = [[2, [0, 5]]]\nperiodic = true\n");
  CHECK(code_of([&] { build(heavy, 3); }) == ErrorCode::DivergentMass);
}
