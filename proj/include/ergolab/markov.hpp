#pragma once

// Finite Markov (doubly stochastic) operators on n equally weighted atoms.
//
// Conventions: matrices act on column vectors, (Pf)_i = sum_j P_ij f_j; the
// inner product is <f, g> = (1/n) sum_i f_i g_i, so the adjoint of P is its
// transpose and Theta (all entries 1/n) is the orthoprojection onto
// constants. A joining nu of the uniform n-atom space corresponds to P by
// nu(i, j) = P_ji / n.

#include "ergolab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <random>
#include <string>
#include <span>
#include <vector>

namespace ergolab::markov {

class MarkovMatrix {
 public:
  /// Validates square shape and exact unit row/column sums.
  static MarkovMatrix from_rows(const std::vector<std::vector<Rational>>& rows);
  static MarkovMatrix theta(std::size_t n);
  static MarkovMatrix identity(std::size_t n);
  /// P e_j = e_{sigma(j)}.
  static MarkovMatrix permutation(std::span<const std::size_t> sigma);
  /// Rotation j -> j + 1 mod n.
  static MarkovMatrix cyclic(std::size_t n);
  /// (I + cyclic) / 2.
  static MarkovMatrix lazy_cyclic(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  friend bool operator==(const MarkovMatrix&, const MarkovMatrix&) = default;

 private:
  friend MarkovMatrix compose(const MarkovMatrix&, const MarkovMatrix&);
  friend MarkovMatrix adjoint(const MarkovMatrix&);
  friend MarkovMatrix convex_combination(std::span<const MarkovMatrix>, std::span<const Rational>);

  MarkovMatrix(std::size_t n, std::vector<Rational> entries) : n_(n), entries_(std::move(entries)) {}

  std::size_t n_ = 0;
  std::vector<Rational> entries_;
};

struct VectorOnAtoms {
  std::vector<Rational> values;

  std::size_t size() const noexcept { return values.size(); }
  Rational mean() const;
};

VectorOnAtoms indicator(std::size_t n, std::span<const std::size_t> atoms);

MarkovMatrix compose(const MarkovMatrix& p, const MarkovMatrix& q);
MarkovMatrix adjoint(const MarkovMatrix& p);
/// sum_i weights[i] * terms[i]; weights must be non-negative and sum to 1.
MarkovMatrix convex_combination(std::span<const MarkovMatrix> terms, std::span<const Rational> weights);

VectorOnAtoms apply(const MarkovMatrix& p, const VectorOnAtoms& f);
/// Theta f = (mean f) * 1.
VectorOnAtoms project_constants(const VectorOnAtoms& f);
VectorOnAtoms operator-(const VectorOnAtoms& a, const VectorOnAtoms& b);
Rational inner(const VectorOnAtoms& f, const VectorOnAtoms& g);
Rational norm_sq(const VectorOnAtoms& f);

/// Squared Frobenius distance sum_ij (P_ij - Q_ij)^2.
Rational frobenius_distance_sq(const MarkovMatrix& p, const MarkovMatrix& q);

/// Both sides of ||P(f - Theta f)||^2 = <P*P (f - Theta f), f - Theta f>.
struct SymmetrizationCheck {
  Rational lhs;
  Rational rhs;

  Rational residual() const { return lhs - rhs; }
};

SymmetrizationCheck symmetrization_residual(const MarkovMatrix& p, const VectorOnAtoms& f);

/// Ergodic surrogate: the support graph is strongly connected (1 is a
/// simple eigenvalue).
bool is_ergodic(const MarkovMatrix& t);
/// Mixing surrogate T^k -> Theta: irreducible and aperiodic support.
bool is_mixing(const MarkovMatrix& t);

/// Approximate (double precision) modulus of the largest eigenvalue on the
/// zero-mean subspace. Flagged approximate; never used as a gate.
struct SpectralEstimate {
  double second_modulus = 0;
  bool approximate = true;
};

SpectralEstimate spectral_estimate(const MarkovMatrix& t);

/// Weights a_z for z = 0, 1, ..., size()-1.
using WeightLevel = std::vector<Rational>;

/// Uniform weights 1/N on [offset, offset + N).
WeightLevel uniform_window(std::size_t offset, std::size_t length);

struct BlumHansonResult {
  std::vector<Rational> norms_sq;  // ||sum_z a_z T^z f - Theta f||^2 per level
  std::vector<Rational> max_weights;
  std::vector<double> norms;
};

BlumHansonResult blum_hanson_average(const MarkovMatrix& t, std::span<const WeightLevel> levels,
                                     const VectorOnAtoms& f);

/// ||V_N f - Theta f||^2 with V_N = (1/N) sum_{i<N} T^i.
Rational cesaro_average(const MarkovMatrix& t, const VectorOnAtoms& f, std::size_t n);

/// ||PT - SP||_F^2; zero iff P intertwines T and S.
Rational intertwining_residual(const MarkovMatrix& p, const MarkovMatrix& t, const MarkovMatrix& s);

// ---------------------------------------------------------------------------
// Product-set bound for families of disjoint pairs

/// Pairs (A_i, B_i) of subsets of {0..ground-1} as bit masks.
struct SetFamily {
  std::size_t ground = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;

  void validate() const;
};

struct ProductSetResult {
  Rational measure;  // mu x mu (union A_i x B_i), mu uniform
  Rational bound;    // 1 - 2^{-4r}
  bool holds = false;
};

ProductSetResult product_set_bound(const SetFamily& family);

struct ProductSearchResult {
  std::uint64_t families = 0;
  std::uint64_t violations = 0;
  Rational max_measure{0};
  SetFamily argmax;
};

/// Every family of exactly r disjoint pairs on m atoms.
ProductSearchResult exhaustive_product_search(std::size_t r, std::size_t m);
/// `count` random families with r in [1, r_max], m in [1, m_max].
ProductSearchResult random_product_search(std::size_t r_max, std::size_t m_max, std::size_t count, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Joinings

struct JoiningTable {
  std::size_t n = 0;
  std::vector<Rational> mass;  // row-major nu(i, j)

  const Rational& operator()(std::size_t i, std::size_t j) const { return mass[i * n + j]; }
  friend bool operator==(const JoiningTable&, const JoiningTable&) = default;
};

JoiningTable joining_of_matrix(const MarkovMatrix& p);
/// Throws BadMarginals unless both marginals are uniform.
MarkovMatrix matrix_of_joining(const JoiningTable& nu);

// ---------------------------------------------------------------------------
// Staircase tensor identity

/// With P_m = (1/m)(I + T + ... + T^{m-2} + Theta), G_m = m^2/(1+mu(B))^2
/// P_m chi_B (x) P_m chi_B and F_{q,0} = chi_B (x) T^q chi_B + T^q chi_B (x)
/// chi_B, returns the squared Frobenius norm of
/// F_{q,0} - (1+mu(B))^2 [G_{q+2} - G_{q+1} - (T(x)T) G_{q+1} + (T(x)T) G_q].
Rational staircase_identity_residual(const MarkovMatrix& t, std::span<const std::size_t> b, std::size_t q);

// ---------------------------------------------------------------------------
// Text I/O: one row per line, entries "p/q" separated by commas; blank lines
// and '#' comments are skipped.

MarkovMatrix parse_matrix_csv(std::istream& in);
std::string format_matrix_csv(const MarkovMatrix& p);
VectorOnAtoms parse_vector(const std::string& text);

// ---------------------------------------------------------------------------
// Random exact members

/// Convex combination of `terms` uniformly random permutation matrices with
/// random positive integer weights.
MarkovMatrix random_doubly_stochastic(std::size_t n, std::size_t terms, std::mt19937_64& rng);
MarkovMatrix random_permutation(std::size_t n, std::mt19937_64& rng);
VectorOnAtoms random_vector(std::size_t n, std::mt19937_64& rng);

}  // namespace ergolab::markov
