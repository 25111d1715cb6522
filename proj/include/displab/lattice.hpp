#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace displab {

enum class Axis { x, y };

/// Periodic 2D array, row-major with x fastest: value(i, j) = data[j * nx + i].
class Lattice2D {
public:
    Lattice2D() = default;
    Lattice2D(std::size_t nx, std::size_t ny, double fill = 0.0)
        : nx_(nx), ny_(ny), data_(nx * ny, fill) {}

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(Axis axis) const { return axis == Axis::x ? nx_ : ny_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * nx_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * nx_ + i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    friend bool operator==(const Lattice2D&, const Lattice2D&) = default;

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> data_;
};

}  // namespace displab
