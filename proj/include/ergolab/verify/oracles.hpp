#pragma once

// Independent brute-force models used to anchor the engines. They share
// only the recipe data types with the code they check: towers are built by
// concatenating label arrays, the Ledrappier group by row transfer, the
// odometer by explicit digit carries and the Markov averages in doubles.

#include "ergolab/ledrappier.hpp"
#include "ergolab/markov.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ergolab::verify {

// ---------------------------------------------------------------------------
// Rank-one towers

/// h_1..h_depth from the recipe by direct recurrence.
std::vector<std::uint64_t> oracle_heights(const rank_one::Construction& c, std::size_t depth);

/// Stage-`from` label of every level of stage `to` (-1 on later spacers),
/// built by literal concatenation of columns and spacer runs.
std::vector<std::int64_t> concat_labels(const rank_one::Construction& c, std::size_t from, std::size_t to);

struct OracleSet {
  std::size_t stage = 0;
  std::vector<bool> member;  // per level of `stage`
};

OracleSet oracle_set(const rank_one::LevelSet& set);

struct OracleBound {
  Rational lower;
  Rational upper;

  Rational midpoint() const { return (lower + upper) / 2; }
};

/// mu(cap_i T^{k_i} A_i) / total_mass by visiting every level of stage
/// `stage` and walking back k_i steps pointwise; levels whose preimage
/// leaves the tower count as undecided. No shift normalization.
OracleBound orbit_correlation(const rank_one::Construction& c, const Rational& total_mass,
                              std::span<const OracleSet> sets, std::span<const std::int64_t> shifts, std::size_t stage);

/// Level width w_stage = w_1 / prod r.
Rational oracle_width(const rank_one::Construction& c, std::size_t stage);

// ---------------------------------------------------------------------------
// Ledrappier

/// Configurations of H generated by the 2*nx seed bits of rows 0 and 1,
/// propagated with x(z + e2) = x(z - e2) + x(z - e1) + x(z) + x(z + e1).
/// Seeds whose propagation is not ny-periodic are dropped.
struct TransferSpan {
  ledrappier::TorusLattice lattice;
  std::vector<std::vector<bool>> generators;  // one configuration per seed
};

TransferSpan transfer_span(const ledrappier::TorusLattice& lattice);

/// Haar measure of the cylinder on the span: rank over seed coordinates by
/// plain elimination on bool vectors.
Rational transfer_measure(const TransferSpan& span, std::span<const ledrappier::Constraint> constraints);

/// Fraction of all 2^k elements of the span that meet the constraints
/// (k = number of generators, at most 20).
Rational enumerate_measure(const TransferSpan& span, std::span<const ledrappier::Constraint> constraints);

// ---------------------------------------------------------------------------
// Odometer

/// Digit path with explicit carry; returns false when the carry overflows.
bool digit_successor(std::vector<std::uint32_t>& digits, std::uint32_t radix);

/// Stage-`stage` level of a digit path: sum_{n < stage} d_n r^{n-1}.
std::uint64_t digit_level(std::span<const std::uint32_t> digits, std::uint32_t radix, std::size_t stage);

/// F(x, 0..length) by carrying digits step by step.
std::vector<std::int64_t> simulate_sums(std::uint32_t radix, std::vector<std::uint32_t> digits, std::size_t stage,
                                        std::span<const std::int64_t> values, std::uint64_t length);

/// mu((A x B) cap R^k (C x D)) for an odometer base, with base sets given as
/// membership of levels of `base_stage` and the fiber evaluated pointwise at
/// `fiber_stage` (undecided levels widen the bound).
OracleBound skew_oracle(std::uint32_t radix, std::size_t base_stage, const std::vector<bool>& a,
                        const std::vector<bool>& c, std::size_t cocycle_stage, std::span<const std::int64_t> values,
                        const rank_one::Construction& fiber, const Rational& fiber_mass, const OracleSet& b,
                        const OracleSet& d, std::int64_t k, std::size_t fiber_stage);

// ---------------------------------------------------------------------------
// Markov operators (double precision, naive loops)

using DenseMatrix = std::vector<std::vector<double>>;

DenseMatrix to_dense(const markov::MarkovMatrix& m);

/// ||(1/N) sum_{z=offset}^{offset+N-1} T^z f - mean(f)||^2 with <f,g> = mean(fg).
double window_norm_sq(const DenseMatrix& t, const std::vector<double>& f, std::size_t offset, std::size_t length);

/// mu x mu(union A_i x B_i) by testing every pair of atoms.
Rational brute_product_measure(const markov::SetFamily& family);

}  // namespace ergolab::verify
