#include "displab/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <numbers>

#include "displab/error.hpp"

namespace displab {

SchemeId SchemeId::make(Family family, int order) {
    if (family == Family::node_centered && (order == 6 || order == 8)) return {family, order};
    if (family == Family::cell_centered && order == 8) return {family, order};
    if (family == Family::cell_centered && order == 6) {
        throw UsageError(
            "the sixth-order cell-centered scheme is not supported: its third-derivative "
            "relation has alpha1 = -1/2 and loses strict diagonal dominance");
    }
    throw UsageError("unsupported scheme order " + std::to_string(order));
}

SchemeId SchemeId::parse(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "cncs6") return Schemes::cncs6;
    if (lower == "cncs8") return Schemes::cncs8;
    if (lower == "ccs8") return Schemes::ccs8;
    if (lower == "ccs6") return make(Family::cell_centered, 6);
    throw UsageError("unknown scheme '" + std::string(name) + "' (expected cncs6, cncs8 or ccs8)");
}

std::string SchemeId::name() const {
    return (cell_centered() ? "ccs" : "cncs") + std::to_string(order_);
}

double SchemeId::kh_max() const {
    return cell_centered() ? 2.0 * std::numbers::pi : std::numbers::pi;
}

StencilCoefficients coefficients(SchemeId scheme, Derivative derivative) {
    const bool first = derivative == Derivative::first;
    if (scheme == Schemes::cncs6) {
        return first ? StencilCoefficients{{1, 3}, {14, 9}, {1, 9}, {0, 1}}
                     : StencilCoefficients{{7, 16}, {2, 1}, {-1, 8}, {0, 1}};
    }
    if (scheme == Schemes::cncs8) {
        return first ? StencilCoefficients{{3, 8}, {25, 16}, {1, 5}, {-1, 80}}
                     : StencilCoefficients{{205, 472}, {2367, 1180}, {-167, 1180}, {1, 236}};
    }
    return first ? StencilCoefficients{{-3, 20}, {2, 1}, {-61, 50}, {-2, 25}}
                 : StencilCoefficients{{-1261, 3530}, {58021, 14120}, {-109007, 28240}, {1029, 28240}};
}

namespace {

void add_tap(std::vector<StencilTap>& taps, std::size_t offset, double weight) {
    if (weight == 0.0) return;
    for (auto& t : taps) {
        if (t.offset == offset) {
            t.weight += weight;
            return;
        }
    }
    taps.push_back({offset, weight});
}

std::vector<StencilTap> build_taps(SchemeId scheme, Derivative derivative,
                                   const StencilCoefficients& c) {
    const double a = c.a1.value();
    const double b = c.b1.value();
    const double cc = c.c1.value();
    std::vector<StencilTap> taps;
    if (!scheme.cell_centered()) {
        if (derivative == Derivative::first) {
            add_tap(taps, 1, a / 2.0);
            add_tap(taps, 2, b / 4.0);
            add_tap(taps, 3, cc / 6.0);
        } else {
            // a/2 (f+2 - 2f+1 + 2f-1 - f-2) + b/8 (f+3 - 3f+1 + 3f-1 - f-3)
            //   + c/20 (f+4 - 4f+1 + 4f-1 - f-4)
            add_tap(taps, 1, -a - 3.0 * b / 8.0 - cc / 5.0);
            add_tap(taps, 2, a / 2.0);
            add_tap(taps, 3, b / 8.0);
            add_tap(taps, 4, cc / 20.0);
        }
    } else {
        // Offsets count half-cells on the interleaved line.
        if (derivative == Derivative::first) {
            add_tap(taps, 1, a);
            add_tap(taps, 2, b / 2.0);
            add_tap(taps, 3, cc / 3.0);
        } else {
            // a (4f+1 - 8f+1/2 + 8f-1/2 - 4f-1) + b/5 (8f+3/2 - 12f+1 + 12f-1 - 8f-3/2)
            //   + c/35 (8f+5/2 - 20f+1 + 20f-1 - 8f-5/2)
            add_tap(taps, 1, -8.0 * a);
            add_tap(taps, 2, 4.0 * a - 12.0 * b / 5.0 - 20.0 * cc / 35.0);
            add_tap(taps, 3, 8.0 * b / 5.0);
            add_tap(taps, 5, 8.0 * cc / 35.0);
        }
    }
    std::sort(taps.begin(), taps.end(),
              [](const StencilTap& l, const StencilTap& r) { return l.offset < r.offset; });
    return taps;
}

}  // namespace

CompactOperator::CompactOperator(SchemeId scheme, Derivative derivative)
    : scheme_(scheme),
      derivative_(derivative),
      coeffs_(displab::coefficients(scheme, derivative)),
      taps_(build_taps(scheme, derivative, coeffs_)) {}

void CompactOperator::check_length(std::size_t length) const {
    if (length < min_storage()) {
        throw DimensionError(scheme_.name() + " needs at least " + std::to_string(min_storage()) +
                             " storage points per line, got " + std::to_string(length));
    }
    if (scheme_.cell_centered() && length % 2 != 0) {
        throw DimensionError("cell-centered lines interleave nodes and centers and need an even "
                             "storage length, got " + std::to_string(length));
    }
}

LineOperator::LineOperator(const CompactOperator& op, std::size_t length, double h)
    : op_(op),
      length_((op.check_length(length), length)),
      solver_(CyclicTridiagonalSystem::periodic(length / op.lhs_stride(), op.alpha1())) {
    if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
    const double scale = 1.0 / std::pow(h, op.power());
    for (const auto& t : op.taps()) {
        scaled_taps_.push_back({t.offset, t.weight * scale});
        reach_ = std::max(reach_, t.offset);
    }
}

// out[k * stride] = sum_t w_t (in[(k + o_t) * stride] - in[(k - o_t) * stride]),
// where each "element" is itself a row of `stride` contiguous lanes when
// stride > 1 (column mode) or a single value (stride == 1).
void LineOperator::explicit_rhs(const double* in, double* out, std::size_t lanes) const {
    const std::size_t n = length_;
    for (std::size_t k = 0; k < n; ++k) {
        double* o = out + k * lanes;
        for (std::size_t l = 0; l < lanes; ++l) o[l] = 0.0;
        for (const auto& t : scaled_taps_) {
            const std::size_t kp = (k + t.offset) % n;
            const std::size_t km = (k + n - t.offset % n) % n;
            const double* fp = in + kp * lanes;
            const double* fm = in + km * lanes;
            const double w = t.weight;
            for (std::size_t l = 0; l < lanes; ++l) o[l] += w * (fp[l] - fm[l]);
        }
    }
}

void LineOperator::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != length_ || out.size() != length_) {
        throw DimensionError("line length does not match bound operator length " +
                             std::to_string(length_));
    }
    const std::size_t n = length_;
    const double* f = in.data();
    double* g = out.data();
    const std::size_t r = reach_;
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        if (k >= r && k + r < n) {
            for (const auto& t : scaled_taps_) acc += t.weight * (f[k + t.offset] - f[k - t.offset]);
        } else {
            for (const auto& t : scaled_taps_) {
                acc += t.weight * (f[(k + t.offset) % n] - f[(k + n - t.offset % n) % n]);
            }
        }
        g[k] = acc;
    }
    if (op_.lhs_stride() == 1) {
        solver_.solve_in_place(out);
    } else {
        solver_.solve_in_place(out, 2);
        solver_.solve_in_place(out.subspan(1), 2);
    }
}

void LineOperator::apply_rows(std::span<const double> in, std::span<double> out,
                              std::size_t ny) const {
    if (in.size() != length_ * ny || out.size() != length_ * ny) {
        throw DimensionError("row block does not match bound operator length");
    }
    for (std::size_t j = 0; j < ny; ++j) {
        apply(in.subspan(j * length_, length_), out.subspan(j * length_, length_));
    }
}

void LineOperator::apply_columns(std::span<const double> in, std::span<double> out,
                                 std::size_t nx) const {
    if (in.size() != length_ * nx || out.size() != length_ * nx) {
        throw DimensionError("column block does not match bound operator length");
    }
    explicit_rhs(in.data(), out.data(), nx);
    if (op_.lhs_stride() == 1) {
        solver_.solve_lanes_in_place(out, nx, nx);
    } else {
        solver_.solve_lanes_in_place(out, 2 * nx, nx);
        solver_.solve_lanes_in_place(out.subspan(nx), 2 * nx, nx);
    }
}

namespace {

std::vector<double> derivative_of(const CompactOperator& op, const Line1D& line,
                                  Derivative expected) {
    if (op.derivative() != expected) {
        throw UsageError(std::string("operator computes the ") +
                         (op.derivative() == Derivative::first ? "first" : "third") +
                         " derivative");
    }
    const std::size_t expected_len = op.scheme().cell_centered() ? 2 * line.n_nodes : line.n_nodes;
    if (line.values.size() != expected_len) {
        throw DimensionError("line holds " + std::to_string(line.values.size()) +
                             " samples, layout requires " + std::to_string(expected_len));
    }
    LineOperator bound(op, line.values.size(), line.h);
    std::vector<double> out(line.values.size());
    bound.apply(line.values, out);
    return out;
}

}  // namespace

std::vector<double> first_derivative(const CompactOperator& op, const Line1D& line) {
    return derivative_of(op, line, Derivative::first);
}

std::vector<double> third_derivative(const CompactOperator& op, const Line1D& line) {
    return derivative_of(op, line, Derivative::third);
}

Lattice2D apply_along_axis(const CompactOperator& op, const Lattice2D& field, Axis axis,
                           double h_axis) {
    LineOperator bound(op, field.extent(axis), h_axis);
    Lattice2D out(field.nx(), field.ny());
    if (axis == Axis::x) {
        bound.apply_rows(field.values(), out.values(), field.ny());
    } else {
        bound.apply_columns(field.values(), out.values(), field.nx());
    }
    return out;
}

}  // namespace displab
