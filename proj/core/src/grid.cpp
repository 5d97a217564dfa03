#include "qtherm/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qtherm {

Grid::Grid(int dim, std::array<AxisExtent, 2> extents, std::array<std::size_t, 2> points,
           Boundary boundary)
    : dim_(dim), extents_(extents), points_(points), boundary_(boundary) {
    if (dim_ == 1) {
        points_[1] = 1;
        extents_[1] = AxisExtent{0.0, 1.0};
    }
    total_ = points_[0] * points_[1];
    for (int a = 0; a < dim_; ++a) {
        const auto idx = static_cast<std::size_t>(a);
        const double len = extents_[idx].max - extents_[idx].min;
        const auto n = static_cast<double>(points_[idx]);
        spacing_[idx] = boundary_ == Boundary::periodic ? len / n : len / (n - 1.0);
    }
}

bool Grid::operator==(const Grid& other) const {
    if (dim_ != other.dim_ || boundary_ != other.boundary_) return false;
    for (int a = 0; a < dim_; ++a) {
        const auto idx = static_cast<std::size_t>(a);
        if (points_[idx] != other.points_[idx]) return false;
        if (extents_[idx].min != other.extents_[idx].min) return false;
        if (extents_[idx].max != other.extents_[idx].max) return false;
    }
    return true;
}

Grid make_grid(int dim, std::array<AxisExtent, 2> extents, std::array<std::size_t, 2> points,
               Boundary boundary, std::size_t cap) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("make_grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        const auto idx = static_cast<std::size_t>(a);
        if (!(extents[idx].min < extents[idx].max) || !std::isfinite(extents[idx].min) ||
            !std::isfinite(extents[idx].max)) {
            throw std::invalid_argument("make_grid: axis " + std::to_string(a) +
                                        " requires finite min < max");
        }
        if (points[idx] < 8) {
            throw std::invalid_argument("make_grid: axis " + std::to_string(a) +
                                        " requires at least 8 points");
        }
        total *= points[idx];
    }
    if (total > cap) {
        throw std::invalid_argument("make_grid: total point count " + std::to_string(total) +
                                    " exceeds cap " + std::to_string(cap));
    }
    return Grid(dim, extents, points, boundary);
}

} // namespace qtherm
