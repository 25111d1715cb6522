#pragma once

#include <cstddef>
#include <string>
#include <span>
#include <string_view>
#include <vector>

#include "displab/lattice.hpp"
#include "displab/rational.hpp"
#include "displab/tridiag.hpp"

namespace displab {

enum class Family { node_centered, cell_centered };
enum class Derivative { first, third };

/// One of the three admissible compact schemes: CNCS6, CNCS8 or CCS8.
class SchemeId {
public:
    /// CNCS6.
    constexpr SchemeId() = default;

    /// Throws UsageError for any combination other than the three above
    /// (in particular the sixth-order cell-centered scheme, whose third
    /// derivative has alpha1 = -1/2 and is not diagonally dominant).
    static SchemeId make(Family family, int order);

    /// Parses "cncs6", "cncs8" or "ccs8" (case-insensitive).
    static SchemeId parse(std::string_view name);

    Family family() const { return family_; }
    int order() const { return order_; }
    bool cell_centered() const { return family_ == Family::cell_centered; }

    std::string name() const;

    /// Nyquist limit of the nondimensional wavenumber: pi for node-centered,
    /// 2 pi for the cell-centered layout.
    double kh_max() const;

    friend bool operator==(const SchemeId&, const SchemeId&) = default;

private:
    constexpr SchemeId(Family family, int order) : family_(family), order_(order) {}

    Family family_ = Family::node_centered;
    int order_ = 6;

    friend struct Schemes;
};

struct Schemes {
    static constexpr SchemeId cncs6{Family::node_centered, 6};
    static constexpr SchemeId cncs8{Family::node_centered, 8};
    static constexpr SchemeId ccs8{Family::cell_centered, 8};
    static constexpr SchemeId all[] = {cncs6, cncs8, ccs8};
};

/// (alpha1, a1, b1, c1) of the tridiagonal compact relation
///   alpha1 u'_{i-1} + u'_i + alpha1 u'_{i+1} = explicit stencil(a1, b1, c1).
struct StencilCoefficients {
    Rational alpha1;
    Rational a1;
    Rational b1;
    Rational c1;
};

StencilCoefficients coefficients(SchemeId scheme, Derivative derivative);

/// One antisymmetric pair of the explicit stencil, in storage-index units:
/// contributes weight * (f[i + offset] - f[i - offset]) before scaling by 1/h^p.
struct StencilTap {
    std::size_t offset;
    double weight;
};

class CompactOperator {
public:
    CompactOperator(SchemeId scheme, Derivative derivative);

    SchemeId scheme() const { return scheme_; }
    Derivative derivative() const { return derivative_; }
    const StencilCoefficients& coefficients() const { return coeffs_; }
    double alpha1() const { return coeffs_.alpha1.value(); }

    /// 1 for first derivatives, 3 for third derivatives.
    int power() const { return derivative_ == Derivative::first ? 1 : 3; }

    const std::vector<StencilTap>& taps() const { return taps_; }

    /// Storage distance between implicitly coupled unknowns: 1 on a node
    /// line, 2 on the interleaved node/center line of the cell-centered scheme.
    std::size_t lhs_stride() const { return scheme_.cell_centered() ? 2 : 1; }

    std::size_t min_storage() const { return scheme_.cell_centered() ? 10 : 8; }

    /// Throws DimensionError unless `length` storage points can carry the operator.
    void check_length(std::size_t length) const;

private:
    SchemeId scheme_;
    Derivative derivative_;
    StencilCoefficients coeffs_;
    std::vector<StencilTap> taps_;
};

/// Samples of one periodic line. For the cell-centered scheme `values` holds
/// 2 * n_nodes samples at spacing h/2: even indices are nodes x_i, odd
/// indices are centers x_{i+1/2}. `h` is always the node spacing.
struct Line1D {
    std::size_t n_nodes = 0;
    double h = 0.0;
    std::vector<double> values;
};

/// CompactOperator bound to a line length and spacing, with the left-hand
/// side prefactored. Reusable across calls and threads.
class LineOperator {
public:
    LineOperator(const CompactOperator& op, std::size_t length, double h);

    const CompactOperator& op() const { return op_; }
    std::size_t length() const { return length_; }

    /// Derivative of one contiguous periodic line.
    void apply(std::span<const double> in, std::span<double> out) const;

    /// Derivative along x of every row of a row-major nx-by-ny block (nx == length()).
    void apply_rows(std::span<const double> in, std::span<double> out, std::size_t ny) const;

    /// Derivative along y of every column of a row-major nx-by-ny block (ny == length()).
    void apply_columns(std::span<const double> in, std::span<double> out, std::size_t nx) const;

private:
    void explicit_rhs(const double* in, double* out, std::size_t stride) const;

    CompactOperator op_;
    std::size_t length_;
    std::vector<StencilTap> scaled_taps_;
    std::size_t reach_ = 0;
    CyclicTridiagonalSolver solver_;
};

std::vector<double> first_derivative(const CompactOperator& op, const Line1D& line);
std::vector<double> third_derivative(const CompactOperator& op, const Line1D& line);

/// Applies `op` independently to every line of `field` along `axis`.
Lattice2D apply_along_axis(const CompactOperator& op, const Lattice2D& field, Axis axis,
                           double h_axis);

}  // namespace displab
