#include "ergolab/cascade.hpp"
#include "ergolab/verify/oracles.hpp"
#include "support/test_support.hpp"

#include <random>
#include <sstream>

using namespace ergolab;
using namespace ergolab::cascade;
using ergolab::testing::code_of;
using ergolab::testing::q;

namespace {

rank_one::LevelSet levels(const rank_one::TowerView& v, std::size_t stage, std::initializer_list<std::uint64_t> ls) {
  const std::vector<std::uint64_t> list(ls);
  return rank_one::make_level_set(v, stage, list);
}

CocycleFunction parse(const std::string& text) {
  std::istringstream in(text);
  return parse_cocycle_csv(in);
}

}  // namespace

TEST_CASE("zero cocycle") {
  const auto base = BaseSystem::odometer(2, 16);
  const CocycleFunction zero{1, {0}};
  const auto rec = orbit_sums(base, zero, 12345, 50);
  CHECK(rec.sums == std::vector<std::int64_t>(51, 0));
  CHECK(rec.returns() == 50);

  std::mt19937_64 rng(1);
  const auto sample = base.sample(32, rng);
  CHECK(recurrence_statistic(base, zero, sample, 40, 40).fraction == 1);
}

TEST_CASE("alternating cocycle on the dyadic odometer") {
  const auto base = BaseSystem::odometer(2, 20);
  const CocycleFunction alt{2, {1, -1}};
  const auto rec = orbit_sums(base, alt, 0, 64);
  for (std::size_t i = 0; i < rec.sums.size(); ++i) CHECK(rec.sums[i] == static_cast<std::int64_t>(i % 2));
  CHECK(rec.returns() == 32);
  for (std::size_t i = 0; i < rec.zero_returns.size(); ++i) CHECK(rec.zero_returns[i] == 2 * i);

  std::mt19937_64 rng(2);
  const auto sample = base.sample(64, rng);
  CHECK(recurrence_statistic(base, alt, sample, 64, 32).fraction == 1);
  CHECK(recurrence_statistic(base, alt, sample, 64, 33).fraction == 0);
}

TEST_CASE("ternary odometer orbit from the zero path") {
  // Golden: digit-arithmetic simulation oracle.
  const auto base = BaseSystem::odometer(3, 8);
  const CocycleFunction f{2, {1, 0, -1}};
  const auto rec = orbit_sums(base, f, 0, 729);
  CHECK(rec.returns() == 243);
  CHECK(rec.sums.back() == 0);
  const std::int64_t values[] = {1, 0, -1};
  CHECK(rec.sums == verify::simulate_sums(3, std::vector<std::uint32_t>(8, 0), 2, values, 729));
}

TEST_CASE("balanced stage-3 cocycle recurrence") {
  const auto base = BaseSystem::odometer(2, 40);
  const CocycleFunction f{3, {1, 1, -1, -1}};
  std::mt19937_64 rng(1);
  const auto sample = base.sample(256, rng);
  const auto res = recurrence_statistic(base, f, sample, 1U << 14, 10);
  CHECK(res.defined == 256);
  CHECK(res.fraction >= q("99/100"));
  // Oracle on a few points.
  for (std::size_t i = 0; i < 4; ++i) {
    const auto rec = orbit_sums(base, f, sample[i], 2000);
    const std::int64_t values[] = {1, 1, -1, -1};
    CHECK(rec.sums == verify::simulate_sums(2, base.digits(sample[i]), 3, values, 2000));
  }
}

TEST_CASE("cocycle identity and odometer bijectivity") {
  const auto base = BaseSystem::odometer(3, 10);
  const CocycleFunction f{3, {2, -1, 0, 1, -3, 0, 1, 0, 0}};
  CHECK(f.integral(base) == 0);
  std::mt19937_64 rng(4);
  for (const auto x : base.sample(20, rng)) {
    if (x + 300 >= base.extent()) continue;
    const auto whole = orbit_sums(base, f, x, 300);
    const auto head = orbit_sums(base, f, x, 120);
    const auto tail = orbit_sums(base, f, base.step(x, 120), 180);
    for (std::size_t j = 0; j <= 180; ++j) CHECK(whole.sums[120 + j] == head.sums[120] + tail.sums[j]);
    CHECK(base.step(base.step(x, 300), -300) == x);
    CHECK(base.from_digits(base.digits(x)) == x);
  }
  const auto refined = f.refine(base, 5);
  CHECK(refined.integral(base) == 0);
  CHECK(refined.values.size() == 81);
}

TEST_CASE("recurrence is monotone in the orbit length") {
  const auto base = BaseSystem::odometer(2, 30);
  const CocycleFunction f{3, {1, 1, -1, -1}};
  std::mt19937_64 rng(8);
  const auto sample = base.sample(64, rng);
  Rational previous = 0;
  for (std::uint64_t length : {64U, 256U, 1024U, 4096U}) {
    const auto r = recurrence_statistic(base, f, sample, length, 10);
    CHECK(r.fraction >= previous);
    previous = r.fraction;
  }
}

TEST_CASE("tower base") {
  const auto fiber = rank_one::build(rank_one::chacon(), 6);
  const auto base = BaseSystem::tower(fiber, 5);
  CHECK(base.extent() == 121);
  const CocycleFunction f{2, {1, -1, 1, -1}};
  CHECK(f.integral(base) == 0);
  CHECK(code_of([&] { orbit_sums(base, f, 100, 50); }) == ErrorCode::UndefinedOrbit);
  CHECK(code_of([&] { base.step(120, 1); }) == ErrorCode::UndefinedOrbit);
  CHECK(code_of([&] { base.digits(3); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { BaseSystem::tower(fiber, 7); }) == ErrorCode::StageOrder);
}

TEST_CASE("skew correlations against the product oracle") {
  const auto base = BaseSystem::odometer(2, 12);
  const auto fiber = rank_one::build(rank_one::chacon(), 7);
  const auto a = levels(base.view(), 4, {0, 1, 2, 5});
  const auto c = levels(base.view(), 4, {1, 3, 4, 6});
  const auto b = rank_one::level_range(fiber, 4, 0, 20);
  const auto d = rank_one::level_range(fiber, 4, 10, 30);
  const CocycleFunction alt{2, {1, -1}};

  const auto k16 = skew_correlation(base, fiber, alt, {a, c, b, d, 16, 6, {}});
  CHECK(k16.lower == q("5/162"));
  CHECK(k16.upper == q("5/162"));
  CHECK(skew_correlation(base, fiber, alt, {a, c, b, d, 16, 7, {}}).lower == q("5/162"));

  for (std::int64_t k : {5, -3}) {
    const auto at6 = skew_correlation(base, fiber, alt, {a, c, b, d, k, 6, {}});
    CHECK(at6.lower == q("5/81"));
    CHECK(at6.upper == q("181/2916"));
    const auto at7 = skew_correlation(base, fiber, alt, {a, c, b, d, k, 7, {}});
    CHECK(at7.lower == q("5/81"));
    CHECK(at7.upper == q("541/8748"));
    CHECK(at6.contains(at7));
  }

  const CocycleFunction balanced{3, {1, 1, -1, -1}};
  const auto s5 = skew_correlation(base, fiber, balanced, {a, c, b, d, 5, 6, {}});
  CHECK(s5.lower == q("5/81"));
  CHECK(s5.upper == q("181/2916"));
  const auto s16 = skew_correlation(base, fiber, balanced, {a, c, b, d, 16, 6, {}});
  CHECK(s16.lower == q("5/162"));
  CHECK(s16.upper == q("5/162"));
}

TEST_CASE("skew correlation degenerates to the product") {
  const auto base = BaseSystem::odometer(2, 12);
  const auto fiber = rank_one::build(rank_one::chacon(), 6);
  const auto a = levels(base.view(), 3, {0, 2, 3});
  const auto b = rank_one::level_range(fiber, 4, 5, 25);
  const CocycleFunction zero{1, {0}};
  // k = 0: plain product of rectangles.
  const auto plain = skew_correlation(base, fiber, zero, {a, a, b, b, 0, 0, {}});
  const Rational product = q("3/4") * rank_one::measure(fiber, b);  // stage 3 has 4 levels
  CHECK(plain.lower == product);
  CHECK(plain.upper == product);
  // n = 0: mu(A cap S^k A) mu(B).
  const auto shifted = skew_correlation(base, fiber, zero, {a, a, b, b, 2, 0, {}});
  CHECK(shifted.lower == q("1/2") * rank_one::measure(fiber, b));  // {0, 2} of A meet S^2 A
}

TEST_CASE("cocycle validation and CSV") {
  const auto base = BaseSystem::odometer(2, 10);
  const auto f = parse("stage,3\n# balanced\n0,1\n1,1\n2,-1\n3,-1\n");
  CHECK(f.stage == 3);
  CHECK(f.values == std::vector<std::int64_t>{1, 1, -1, -1});
  CHECK_NOTHROW(f.validate(base));

  CHECK(code_of([&] { CocycleFunction{2, {1, 1}}.validate(base); }) == ErrorCode::ZeroMeanViolation);
  CHECK(code_of([&] { CocycleFunction{2, {1, -1, 0}}.validate(base); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { CocycleFunction{12, {0}}.validate(base); }) == ErrorCode::StageOrder);
  CHECK(code_of([] { parse("0,1\nstage,2\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse("stage,2\n0,1\n0,-1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse("stage,2\n0,1\n2,-1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse("stage,2\n0,x\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse(""); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_cocycle_csv("/nonexistent/cocycle.csv"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { BaseSystem::odometer(1, 4); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { BaseSystem::odometer(2, 80); }) == ErrorCode::BudgetExceeded);
  const std::vector<std::uint64_t> none;
  CHECK(code_of([&] { recurrence_statistic(base, f, none, 10, 1); }) == ErrorCode::ConfigError);
}
