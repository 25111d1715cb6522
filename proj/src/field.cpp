#include "displab/field.hpp"

#include <numeric>

namespace displab {

std::vector<double> SolutionField::node_values() const {
    const std::size_t ny = dim == 2 ? nodes_y : 1;
    std::vector<double> out;
    out.reserve(nodes_x * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nodes_x; ++i) out.push_back(node(i, j));
    }
    return out;
}

double SolutionField::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace displab
