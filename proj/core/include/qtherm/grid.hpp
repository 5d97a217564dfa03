#pragma once

#include <array>
#include <cstddef>

namespace qtherm {

enum class Boundary { periodic, dirichlet_zero };

struct AxisExtent {
    double min = 0.0;
    double max = 1.0;
};

inline constexpr std::size_t default_point_cap = std::size_t{1} << 22;

/// Uniform rectilinear grid in one or two dimensions.
///
/// Periodic axes treat `max` as the excluded wrap-around image of `min`, so
/// the spacing is (max - min) / points.  Dirichlet axes include both ends and
/// the spacing is (max - min) / (points - 1).
class Grid {
  public:
    Grid() = default;
    Grid(int dim, std::array<AxisExtent, 2> extents, std::array<std::size_t, 2> points,
         Boundary boundary);

    int dim() const { return dim_; }
    Boundary boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == Boundary::periodic; }

    const AxisExtent& extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    std::size_t points(int axis) const { return points_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double length(int axis) const {
        const auto& e = extent(axis);
        return e.max - e.min;
    }

    std::size_t total_points() const { return total_; }

    double coordinate(int axis, std::size_t index) const {
        return extent(axis).min + spacing(axis) * static_cast<double>(index);
    }

    /// Row-major flattening; axis 1 is the contiguous one in 2-D.
    std::size_t flat_index(std::size_t i0, std::size_t i1 = 0) const {
        return i0 * points_[1] + i1;
    }

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }

  private:
    int dim_ = 0;
    std::array<AxisExtent, 2> extents_{};
    std::array<std::size_t, 2> points_{0, 1};
    Boundary boundary_ = Boundary::periodic;
    std::array<double, 2> spacing_{0.0, 0.0};
    std::size_t total_ = 0;
};

/// Validates the requested layout and constructs the grid.  Throws
/// std::invalid_argument on non-positive extents, fewer than 8 points per
/// axis, or a total point count above `cap`.
Grid make_grid(int dim, std::array<AxisExtent, 2> extents, std::array<std::size_t, 2> points,
               Boundary boundary, std::size_t cap = default_point_cap);

inline Grid make_grid_1d(double min, double max, std::size_t points, Boundary boundary,
                         std::size_t cap = default_point_cap) {
    return make_grid(1, {AxisExtent{min, max}, AxisExtent{}}, {points, 1}, boundary, cap);
}

inline Grid make_grid_2d(AxisExtent ex0, AxisExtent ex1, std::size_t n0, std::size_t n1,
                         Boundary boundary, std::size_t cap = default_point_cap) {
    return make_grid(2, {ex0, ex1}, {n0, n1}, boundary, cap);
}

} // namespace qtherm
