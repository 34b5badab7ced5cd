#ifndef OBSTRUCTA_TOPOLOGY_HPP
#define OBSTRUCTA_TOPOLOGY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "obstructa/space.hpp"

namespace obstructa {

/// Dense matrix over GF(2), column-major bit packing. Sizes here are tiny
/// (desk-scale complexes), so no sparsity tricks.
class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols);
  static Gf2Matrix from_entries(
      std::size_t rows, std::size_t cols,
      std::span<const std::pair<std::size_t, std::size_t>> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, bool v = true);
  void flip(std::size_t r, std::size_t c);

  std::size_t rank() const;

  /// True when (*this) * right vanishes; used for the boundary-of-boundary
  /// condition.
  bool product_is_zero(const Gf2Matrix& right) const;

  std::vector<std::pair<std::size_t, std::size_t>> entries() const;

 private:
  std::size_t rows_, cols_, words_per_col_;
  std::vector<std::uint64_t> data_;  // column-major
};

/// Finite graded cell structure with GF(2) boundary incidence matrices.
/// Validates matrix shapes and boundary-of-boundary = 0 at construction.
class CellComplex {
 public:
  CellComplex(std::vector<std::size_t> cells_per_dim,
              std::vector<Gf2Matrix> boundaries);

  std::size_t dim() const { return cells_.size() - 1; }
  std::size_t cell_count(std::size_t i) const { return cells_[i]; }
  const std::vector<std::size_t>& cells_per_dim() const { return cells_; }
  const Gf2Matrix& boundary(std::size_t i) const;  // i in 1..dim

  static CellComplex point();
  static CellComplex two_points();
  static CellComplex circle();
  static CellComplex disk();
  static CellComplex torus();

  static CellComplex from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::vector<std::size_t> cells_;
  std::vector<Gf2Matrix> boundaries_;
};

/// Alternating sum of cell counts.
int euler_char_cells(const CellComplex& K);

/// GF(2) Betti numbers b_i = c_i - rank(d_i) - rank(d_{i+1}).
std::vector<std::size_t> betti_numbers(const CellComplex& K);

/// Alternating sum of Betti numbers; always equals euler_char_cells.
int euler_char_homology(const CellComplex& K);

/// Compact connected surface, possibly with boundary.
struct SurfaceDescriptor {
  bool orientable;
  unsigned genus;
  unsigned boundary_components;
};

/// 2 - 2g - b for orientable surfaces, 2 - g - b for nonorientable ones
/// (nonorientable descriptors require genus >= 1).
int classify_surface_euler(const SurfaceDescriptor& s);

/// Euler characteristic of a Region, for the shapes where elementary
/// homotopy equivalence pins the value; anything else yields nullopt
/// rather than a guess. An explicit override on the Region wins.
std::optional<int> region_euler_char(const Region& r);

}  // namespace obstructa

#endif
