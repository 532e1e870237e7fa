#pragma once

// Ledrappier's Z^2-action on a finite torus.
//
// H is the group of GF(2) configurations x on Z_nx x Z_ny with
//   x(z + e1) + x(z - e1) + x(z + e2) + x(z - e2) + x(z) = 0
// at every site z; the measure is normalized Haar (uniform) on H. A
// coordinate functional x -> x(s) restricted to H is stored as a vector in
// GF(2)^dim H, so cylinder measures reduce to ranks.

#include "ergolab/level_bits.hpp"
#include "ergolab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ergolab::ledrappier {

struct Site {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const Site&, const Site&) = default;
  friend Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
};

struct TorusLattice {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;

  /// Z_n x Z_n. For n a power of two H is trivial.
  static TorusLattice square(std::uint32_t n);
  /// Z_n x Z_m with m the period of the row-transfer map, so that every
  /// pair of seed rows extends to a periodic solution (dim H = 2n).
  static TorusLattice closing(std::uint32_t n);

  std::size_t sites() const noexcept { return std::size_t{nx} * ny; }
  std::size_t index(Site s) const;
  Site site(std::size_t index) const { return {static_cast<std::int64_t>(index % nx), static_cast<std::int64_t>(index / nx)}; }
  void validate() const;
};

/// Period of (r_{y-1}, r_y) -> (r_y, r_{y-1} + r_y + r_y<<1 + r_y>>1) on
/// pairs of rows of Z_n. Throws ConfigError if it exceeds `limit`.
std::uint64_t transfer_period(std::uint32_t n, std::uint64_t limit = 1U << 20);

class F2System {
 public:
  const TorusLattice& lattice() const noexcept { return lattice_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  /// Rows spanning H, one bit per site.
  std::span<const LevelBits> basis() const noexcept { return basis_; }
  /// The functional x -> x(s) as a vector of length dimension().
  const LevelBits& functional(Site s) const { return functionals_[lattice_.index(s)]; }
  /// Relation value at site z for a configuration (0 on H).
  bool relation(const LevelBits& config, Site z) const;

 private:
  friend F2System build_system(const TorusLattice&);

  TorusLattice lattice_;
  std::vector<LevelBits> basis_;
  std::vector<LevelBits> functionals_;
};

/// Kernel of the relation operator by bit-packed Gaussian elimination.
/// Lattices above 64 x 96 sites throw BudgetExceeded.
F2System build_system(const TorusLattice& lattice);

struct Constraint {
  Site site;
  bool bit = false;
};

struct Cylinder {
  std::vector<Constraint> constraints;

  /// Throws ConfigError on repeated sites.
  void validate(const TorusLattice& lattice) const;
  Cylinder translated(Site by) const;
};

/// 2^-rank of the constraint functionals, or 0 if the system is inconsistent
/// on H. Repeated sites are allowed here (they meet in intersections).
Rational cylinder_measure(const F2System& sys, std::span<const Constraint> constraints);
inline Rational cylinder_measure(const F2System& sys, const Cylinder& cyl) { return cylinder_measure(sys, cyl.constraints); }

/// mu(intersection over i of base translated by shifts[i]).
Rational shifted_correlation(const F2System& sys, const Cylinder& base, std::span<const Site> shifts);

/// Linear dependencies among the coordinate functionals of a site family:
/// a basis (in reduced echelon form) of the kernel of GF(2)^family -> H*.
/// Each relation is a bit mask over family positions.
std::vector<std::uint32_t> dependency_scan(const F2System& sys, std::span<const Site> family);

/// The family {0, (d,0), (-d,0), (0,d), (0,-d)} around `center`.
std::vector<Site> cross_family(Site center, std::int64_t d);

/// "(x,y)=b" items separated by ';', e.g. "(0,0)=0;(1,2)=1".
Cylinder parse_cylinder(const std::string& text);
/// "(x,y);(x,y);..." lattice vectors.
std::vector<Site> parse_sites(const std::string& text);

}  // namespace ergolab::ledrappier
