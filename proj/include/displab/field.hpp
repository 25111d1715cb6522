#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace displab {

/// node: one sample per grid node. refined: the interleaved half-index
/// lattice of the cell-centered scheme, two samples per node spacing per axis.
enum class Layout { node, refined };

struct TimeSample {
    double t = 0.0;
    double value = 0.0;
};

struct FieldDiagnostics {
    std::size_t step_count = 0;
    double dt_min = 0.0;
    double dt_max = 0.0;
    double dt_last = 0.0;
    /// (t, max |u| over every sample), decimated to a bounded number of entries.
    std::vector<TimeSample> max_amplitude_history;
    /// (t, L-infinity error at nodes) when an exact solution exists.
    std::vector<TimeSample> error_history;
    double initial_mass = 0.0;  // mean of all samples at t = 0
    double mass = 0.0;          // mean of all samples at `time`
    bool diverged = false;
    int failed_stage = 0;
    std::size_t failed_step = 0;
    std::string message;
};

/// Solution samples on a periodic 1D or 2D lattice, row-major with x fastest.
struct SolutionField {
    int dim = 1;
    Layout layout = Layout::node;
    std::size_t nodes_x = 0;
    std::size_t nodes_y = 1;
    double hx = 0.0;  // node spacing
    double hy = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    std::vector<double> values;
    double time = 0.0;
    FieldDiagnostics diagnostics;

    std::size_t refinement() const { return layout == Layout::refined ? 2 : 1; }
    std::size_t extent_x() const { return nodes_x * refinement(); }
    std::size_t extent_y() const { return dim == 2 ? nodes_y * refinement() : 1; }

    /// Coordinates of storage sample (s, r).
    double x_at(std::size_t s) const { return x0 + static_cast<double>(s) * hx / static_cast<double>(refinement()); }
    double y_at(std::size_t r) const { return y0 + static_cast<double>(r) * hy / static_cast<double>(refinement()); }

    double& at(std::size_t s, std::size_t r = 0) { return values[r * extent_x() + s]; }
    double at(std::size_t s, std::size_t r = 0) const { return values[r * extent_x() + s]; }

    /// Value at grid node (i, j).
    double node(std::size_t i, std::size_t j = 0) const {
        return at(i * refinement(), dim == 2 ? j * refinement() : 0);
    }

    /// Samples at grid nodes only, row-major.
    std::vector<double> node_values() const;

    /// Mean over every stored sample.
    double mean() const;
};

}  // namespace displab
