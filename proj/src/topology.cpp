#include "obstructa/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "obstructa/num.hpp"

namespace obstructa {

// --- Gf2Matrix ----------------------------------------------------------

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_per_col_(rows == 0 ? 1 : (rows + 63) / 64),
      data_(words_per_col_ * std::max<std::size_t>(cols, 1), 0) {}

Gf2Matrix Gf2Matrix::from_entries(
    std::size_t rows, std::size_t cols,
    std::span<const std::pair<std::size_t, std::size_t>> entries) {
  Gf2Matrix m(rows, cols);
  for (const auto& [r, c] : entries) m.flip(r, c);
  return m;
}

bool Gf2Matrix::get(std::size_t r, std::size_t c) const {
  return (data_[c * words_per_col_ + r / 64] >> (r % 64)) & 1u;
}

void Gf2Matrix::set(std::size_t r, std::size_t c, bool v) {
  if (r >= rows_ || c >= cols_)
    throw std::out_of_range("Gf2Matrix index out of range");
  std::uint64_t& w = data_[c * words_per_col_ + r / 64];
  std::uint64_t mask = 1ULL << (r % 64);
  w = v ? (w | mask) : (w & ~mask);
}

void Gf2Matrix::flip(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_)
    throw std::out_of_range("Gf2Matrix index out of range");
  data_[c * words_per_col_ + r / 64] ^= 1ULL << (r % 64);
}

std::size_t Gf2Matrix::rank() const {
  if (rows_ == 0 || cols_ == 0) return 0;
  // Column elimination on a scratch copy.
  std::vector<std::uint64_t> cols(data_);
  auto word = [&](std::size_t c, std::size_t w) -> std::uint64_t& {
    return cols[c * words_per_col_ + w];
  };
  std::size_t rank = 0;
  for (std::size_t r = 0; r < rows_ && rank < cols_; ++r) {
    const std::size_t w = r / 64;
    const std::uint64_t mask = 1ULL << (r % 64);
    std::size_t pivot = cols_;
    for (std::size_t c = rank; c < cols_; ++c) {
      if (word(c, w) & mask) {
        pivot = c;
        break;
      }
    }
    if (pivot == cols_) continue;
    for (std::size_t k = 0; k < words_per_col_; ++k)
      std::swap(word(rank, k), word(pivot, k));
    for (std::size_t c = rank + 1; c < cols_; ++c) {
      if (word(c, w) & mask)
        for (std::size_t k = 0; k < words_per_col_; ++k)
          word(c, k) ^= word(rank, k);
    }
    ++rank;
  }
  return rank;
}

bool Gf2Matrix::product_is_zero(const Gf2Matrix& right) const {
  if (cols_ != right.rows_)
    throw std::invalid_argument("Gf2Matrix product shape mismatch");
  // For each column v of `right`, XOR together the columns of *this
  // selected by the bits of v; all results must vanish.
  for (std::size_t c = 0; c < right.cols_; ++c) {
    std::vector<std::uint64_t> acc(words_per_col_, 0);
    for (std::size_t r = 0; r < right.rows_; ++r) {
      if (right.get(r, c))
        for (std::size_t k = 0; k < words_per_col_; ++k)
          acc[k] ^= data_[r * words_per_col_ + k];
    }
    for (std::uint64_t w : acc)
      if (w != 0) return false;
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> Gf2Matrix::entries() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r)
      if (get(r, c)) out.emplace_back(r, c);
  return out;
}

// --- CellComplex --------------------------------------------------------

CellComplex::CellComplex(std::vector<std::size_t> cells_per_dim,
                         std::vector<Gf2Matrix> boundaries)
    : cells_(std::move(cells_per_dim)), boundaries_(std::move(boundaries)) {
  if (cells_.empty())
    throw std::invalid_argument("complex needs at least dimension 0");
  if (boundaries_.size() + 1 != cells_.size())
    throw std::invalid_argument("need one boundary matrix per dim >= 1");
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    if (boundaries_[i].rows() != cells_[i] ||
        boundaries_[i].cols() != cells_[i + 1])
      throw std::invalid_argument("boundary matrix shape mismatch");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (!boundaries_[i - 1].product_is_zero(boundaries_[i]))
      throw std::invalid_argument(
          "boundary of boundary is nonzero; not a chain complex");
  }
}

const Gf2Matrix& CellComplex::boundary(std::size_t i) const {
  if (i == 0 || i > boundaries_.size())
    throw std::out_of_range("boundary index out of range");
  return boundaries_[i - 1];
}

CellComplex CellComplex::point() {
  return CellComplex({1}, {});
}

CellComplex CellComplex::two_points() {
  return CellComplex({2}, {});
}

CellComplex CellComplex::circle() {
  // one vertex, one loop: the loop's boundary cancels over GF(2)
  return CellComplex({1, 1}, {Gf2Matrix(1, 1)});
}

CellComplex CellComplex::disk() {
  // vertex, loop, and a 2-cell attached once along the loop
  Gf2Matrix d2(1, 1);
  d2.set(0, 0);
  return CellComplex({1, 1, 1}, {Gf2Matrix(1, 1), d2});
}

CellComplex CellComplex::torus() {
  // standard one-vertex CW structure; aba^-1b^-1 cancels over GF(2)
  return CellComplex({1, 2, 1}, {Gf2Matrix(1, 2), Gf2Matrix(2, 1)});
}

CellComplex CellComplex::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cells") || !j.contains("boundaries"))
    throw std::invalid_argument(
        "complex file needs 'cells' and 'boundaries'");
  std::vector<std::size_t> cells =
      j.at("cells").get<std::vector<std::size_t>>();
  std::vector<Gf2Matrix> boundaries;
  const auto& bs = j.at("boundaries");
  if (!bs.is_array())
    throw std::invalid_argument("'boundaries' must be an array");
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (i + 1 >= cells.size())
      throw std::invalid_argument("more boundary matrices than dimensions");
    Gf2Matrix m(cells[i], cells[i + 1]);
    for (const auto& e : bs[i]) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("boundary entries must be [row, col]");
      m.flip(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    boundaries.push_back(std::move(m));
  }
  return CellComplex(std::move(cells), std::move(boundaries));
}

nlohmann::json CellComplex::to_json() const {
  nlohmann::json j;
  j["cells"] = cells_;
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : boundaries_) {
    nlohmann::json m = nlohmann::json::array();
    for (const auto& [r, c] : b.entries()) m.push_back({r, c});
    bs.push_back(std::move(m));
  }
  j["boundaries"] = std::move(bs);
  return j;
}

// --- Euler characteristics ----------------------------------------------

int euler_char_cells(const CellComplex& K) {
  int chi = 0;
  for (std::size_t i = 0; i < K.cells_per_dim().size(); ++i) {
    int c = static_cast<int>(K.cell_count(i));
    chi += (i % 2 == 0) ? c : -c;
  }
  return chi;
}

std::vector<std::size_t> betti_numbers(const CellComplex& K) {
  const std::size_t d = K.dim();
  std::vector<std::size_t> ranks(d + 2, 0);  // ranks[i] = rank(d_i)
  for (std::size_t i = 1; i <= d; ++i) ranks[i] = K.boundary(i).rank();
  std::vector<std::size_t> betti(d + 1);
  for (std::size_t i = 0; i <= d; ++i)
    betti[i] = K.cell_count(i) - ranks[i] - ranks[i + 1];
  return betti;
}

int euler_char_homology(const CellComplex& K) {
  auto betti = betti_numbers(K);
  int chi = 0;
  for (std::size_t i = 0; i < betti.size(); ++i) {
    int b = static_cast<int>(betti[i]);
    chi += (i % 2 == 0) ? b : -b;
  }
  return chi;
}

int classify_surface_euler(const SurfaceDescriptor& s) {
  if (!s.orientable && s.genus < 1)
    throw std::invalid_argument("nonorientable surfaces require genus >= 1");
  int g = static_cast<int>(s.genus);
  int b = static_cast<int>(s.boundary_components);
  return s.orientable ? 2 - 2 * g - b : 2 - g - b;
}

// --- region Euler characteristic ----------------------------------------

namespace {

// For a region with one unconstrained Angle factor cut by implicit
// constraints, check on sampled base points that the admissible set of
// angles is a single proper nonempty arc. When every sampled fiber is such
// an arc the region deformation retracts onto a section over its planar
// part, so the Euler characteristic of the planar part applies.
bool fibers_are_arcs(const Region& r, std::size_t angle_axis) {
  const auto& space = *r.space();
  const auto bounds = r.chart_bounds();
  const std::size_t dim = space.dimension();
  constexpr std::size_t kBasePoints = 48;
  constexpr std::size_t kAngleSteps = 256;

  std::size_t checked = 0;
  for (std::uint64_t k = 1; k <= 4000 && checked < kBasePoints; ++k) {
    std::vector<double> coords(dim);
    for (std::size_t i = 0; i < dim; ++i)
      coords[i] = bounds[i].lo +
                  (bounds[i].hi - bounds[i].lo) * halton(k, halton_base(i));

    // admissibility profile of the fiber over this base point
    std::vector<bool> ok(kAngleSteps);
    std::size_t count = 0;
    for (std::size_t s = 0; s < kAngleSteps; ++s) {
      coords[angle_axis] =
          kTwoPi * static_cast<double>(s) / static_cast<double>(kAngleSteps);
      Location loc = r.contains(Point(r.space(), coords));
      ok[s] = loc != Location::Exterior;
      if (ok[s]) ++count;
    }
    if (count == 0) continue;               // base point outside region
    if (count == kAngleSteps) return false;  // full circle: genuine product
    // single arc modulo wrap: exactly one false->true transition
    std::size_t transitions = 0;
    for (std::size_t s = 0; s < kAngleSteps; ++s)
      if (!ok[s] && ok[(s + 1) % kAngleSteps]) ++transitions;
    if (transitions != 1) return false;
    ++checked;
  }
  return checked >= kBasePoints / 2;
}

}  // namespace

std::optional<int> region_euler_char(const Region& r) {
  if (r.euler_char_override()) return *r.euler_char_override();

  const auto& space = *r.space();
  const auto real_idx = space.real_indices();
  const auto angle_idx = space.angle_indices();

  int base_chi;
  switch (r.base_kind()) {
    case Region::BaseKind::Box:
    case Region::BaseKind::Ball:
      base_chi = 1;
      break;
    case Region::BaseKind::Annulus:
      base_chi = 0;
      break;
  }

  const int n_obstacles = static_cast<int>(r.obstacle_count());
  if (n_obstacles > 0 && real_idx.size() != 2)
    return std::nullopt;  // obstacle count argument is planar only
  const int plane_chi = base_chi - n_obstacles;

  // Angle factors without an arc restriction
  std::vector<std::size_t> free_angles;
  for (auto i : angle_idx)
    if (!r.angle_arcs().count(space.name(i))) free_angles.push_back(i);

  if (r.constraints().empty()) {
    if (free_angles.empty()) return plane_chi;
    return 0;  // genuine product with at least one circle factor
  }

  // Implicit constraints: supported case is a single free Angle factor
  // whose fibers the constraints cut down to arcs (the region then
  // deformation retracts onto its planar part).
  if (free_angles.size() == 1 && fibers_are_arcs(r, free_angles[0]))
    return plane_chi;

  return std::nullopt;
}

}  // namespace obstructa
