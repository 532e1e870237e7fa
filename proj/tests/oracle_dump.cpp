// Prints the golden values frozen into the unit tests. Every number here
// comes from the brute-force models in ergolab/verify/oracles.hpp, not from
// the engines under test.

#include "ergolab/verify/oracles.hpp"

#include <cstdio>
#include <iostream>
#include <numeric>

using namespace ergolab;
using namespace ergolab::verify;

namespace {

OracleSet range_set(std::size_t stage, std::uint64_t height, std::uint64_t lo, std::uint64_t hi) {
  OracleSet s{stage, std::vector<bool>(height, false)};
  for (std::uint64_t l = lo; l < hi; ++l) s.member[l] = true;
  return s;
}

OracleSet stride_set(std::size_t stage, std::uint64_t height, std::uint64_t stride, std::uint64_t limit) {
  OracleSet s{stage, std::vector<bool>(height, false)};
  for (std::uint64_t l = 0; l < limit; l += stride) s.member[l] = true;
  return s;
}

void print(const char* name, const OracleBound& b) {
  std::cout << name << " lower=" << to_string(b.lower) << " upper=" << to_string(b.upper) << "  ~[" << b.lower.get_d()
            << ", " << b.upper.get_d() << "]\n";
}

}  // namespace

int main() {
  std::cout.precision(17);

  // Chacon heights and partial masses.
  const auto chacon = rank_one::chacon();
  const auto hc = oracle_heights(chacon, 10);
  std::cout << "chacon heights:";
  for (auto h : hc) std::cout << " " << h;
  std::cout << "\n";
  for (std::size_t j = 1; j <= 4; ++j) {
    std::cout << "chacon tower mass " << j << " = " << to_string(Rational(static_cast<long>(hc[j - 1])) * oracle_width(chacon, j)) << "\n";
  }

  // Chacon: A = B = bottom half of stage 8, shifts (0, h_8), evaluated at stage 9.
  {
    const auto a = range_set(8, hc[7], 0, hc[7] / 2);
    const OracleSet sets[] = {a, a};
    const std::int64_t shifts[] = {0, static_cast<std::int64_t>(hc[7])};
    print("chacon half8 (0,h8) @9", orbit_correlation(chacon, Rational(1), sets, shifts, 9));
    const std::int64_t tshift[] = {0, 1};
    print("chacon half8 (0,1) @9", orbit_correlation(chacon, Rational(1), sets, tshift, 9));
  }

  // asym5 at i = 6 for the acceptance sets, brute force at stage 8.
  {
    const auto asym5 = rank_one::asym5();
    const auto ha = oracle_heights(asym5, 8);
    const std::int64_t n = static_cast<std::int64_t>(ha[5]) + 1;
    const auto single = range_set(4, ha[3], 0, 1);
    const auto mod11 = stride_set(4, ha[3], 11, ha[3] - 10);
    const auto half = range_set(4, ha[3], 0, ha[3] / 2);
    const std::int64_t fwd[] = {0, n, 3 * n};
    const std::int64_t back[] = {0, -n, -3 * n};
    for (const auto& [name, s] : {std::pair{"single", single}, std::pair{"mod11", mod11}, std::pair{"half", half}}) {
      const OracleSet sets[] = {s, s, s};
      std::string f = std::string("asym5 i=6 fwd ") + name + " @8";
      std::string b = std::string("asym5 i=6 back ") + name + " @8";
      print(f.c_str(), orbit_correlation(asym5, Rational(1), sets, fwd, 8));
      print(b.c_str(), orbit_correlation(asym5, Rational(1), sets, back, 8));
    }
  }

  // Staircase mixing scan at stage 6, A = B = C = lower third of stage 4, eps = 1/20, h = 300.
  {
    const auto stair = rank_one::preset("staircase");
    const auto hs = oracle_heights(stair, 9);
    std::cout << "staircase heights:";
    for (auto h : hs) std::cout << " " << h;
    std::cout << "\n";
    const Rational total = Rational(static_cast<long>(hs[8])) * oracle_width(stair, 9);
    std::cout << "staircase total mass " << to_string(total) << "\n";
    const auto third = range_set(4, hs[3], 0, hs[3] / 3);
    const Rational mu = Rational(static_cast<long>(hs[3] / 3)) * oracle_width(stair, 4) / total;
    const Rational product = mu * mu * mu;
    const Rational eps(1, 20);
    const std::int64_t h = 300;
    long offenders = 0;
    long grid = 0;
    for (std::int64_t z = 0; z <= h; ++z) {
      for (std::int64_t w = 0; w <= h; ++w) {
        if (!(Rational(z) > eps * h && Rational(w) > eps * h && Rational(std::abs(z - w)) > eps * h)) continue;
        ++grid;
        const OracleSet sets[] = {third, third, third};
        const std::int64_t shifts[] = {0, z, w};
        const auto b = orbit_correlation(stair, total, sets, shifts, 6);
        if (abs(Rational(b.midpoint() - product)) > eps) ++offenders;
      }
    }
    std::cout << "staircase scan stage6 h=300 grid=" << grid << " offenders=" << offenders << " d=" << to_string(ratio(offenders, h)) << "\n";
  }

  // Ledrappier: kernel sizes and the five-point cylinder.
  for (std::uint32_t n : {4U, 8U, 16U}) {
    const auto sq = transfer_span(ledrappier::TorusLattice{n, n});
    std::cout << "square " << n << " dim " << sq.generators.size() << "\n";
  }
  for (std::uint32_t n : {4U, 8U, 16U, 32U}) {
    const ledrappier::TorusLattice lat{n, n * 3 / 2};
    const auto span = transfer_span(lat);
    std::cout << "closing " << n << "x" << lat.ny << " dim " << span.generators.size();
    for (std::int64_t d = 1; 4 * d <= n; d *= 2) {
      std::vector<ledrappier::Constraint> cons;
      for (const auto& s : std::vector<ledrappier::Site>{{0, 0}, {d, 0}, {-d, 0}, {0, d}, {0, -d}}) cons.push_back({s, false});
      std::cout << "  cross(" << d << ")=" << to_string(transfer_measure(span, cons));
      if (span.generators.size() <= 20) std::cout << " enum=" << to_string(enumerate_measure(span, cons));
    }
    std::cout << "\n";
  }

  // Odometer orbits.
  {
    const std::int64_t v3[] = {1, 0, -1};
    const auto sums = simulate_sums(3, std::vector<std::uint32_t>(8, 0), 2, v3, 729);
    long zeros = 0;
    for (std::size_t i = 1; i < sums.size(); ++i) zeros += sums[i] == 0;
    std::cout << "3-adic L=729 returns " << zeros << " final " << sums.back() << "\n";
  }
  {
    // 2-adic, cocycle (1,-1) on stage 2, fiber Chacon, sets from stage 4, k = 16.
    const std::int64_t v2[] = {1, -1};
    std::vector<bool> a(8, false), c(8, false);
    for (int l : {0, 1, 2, 5}) a[static_cast<std::size_t>(l)] = true;
    for (int l : {1, 3, 4, 6}) c[static_cast<std::size_t>(l)] = true;
    const auto b = range_set(4, hc[3], 0, 20);
    const auto d = range_set(4, hc[3], 10, 30);
    for (std::int64_t k : {16, 5, -3}) {
      for (std::size_t fs : {6U, 7U}) {
        const std::string name = "skew k=" + std::to_string(k) + " fiber@" + std::to_string(fs);
        print(name.c_str(), skew_oracle(2, 4, a, c, 2, v2, chacon, Rational(1), b, d, k, fs));
      }
    }
    const std::int64_t v3s[] = {1, 1, -1, -1};
    for (std::int64_t k : {5, 16}) {
      const std::string name = "skew stage3 cocycle k=" + std::to_string(k) + " fiber@6";
      print(name.c_str(), skew_oracle(2, 4, a, c, 3, v3s, chacon, Rational(1), b, d, k, 6));
    }
  }

  // Markov averages for the lazy cyclic walk on 8 atoms, f = delta_0.
  {
    const auto t = to_dense(markov::MarkovMatrix::lazy_cyclic(8));
    std::vector<double> f(8, 0.0);
    f[0] = 1.0;
    for (std::size_t n : {1U, 10U, 100U, 1000U, 1001U}) {
      std::printf("lazy8 window N=%zu norm_sq=%.17g norm=%.17g\n", n, window_norm_sq(t, f, 0, n), std::sqrt(window_norm_sq(t, f, 0, n)));
    }
  }

  // Exhaustive product-set search r = 2, m = 4 by brute force.
  {
    Rational best = 0;
    std::uint64_t families = 0;
    const int m = 4;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (std::uint64_t a = 0; a < 16; ++a) {
      for (std::uint64_t b = 0; b < 16; ++b) {
        if ((a & b) == 0) pairs.emplace_back(a, b);
      }
    }
    for (const auto& p1 : pairs) {
      for (const auto& p2 : pairs) {
        markov::SetFamily fam{m, {p1, p2}};
        best = std::max(best, brute_product_measure(fam));
        ++families;
      }
    }
    std::cout << "product search r=2 m=4 families " << families << " max " << to_string(best) << "\n";
  }
  return 0;
}
