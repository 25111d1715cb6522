#pragma once

#include <cstdint>
#include <numeric>

namespace displab {

/// Exact stencil coefficient, converted to double once at use.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr bool operator==(const Rational& a, const Rational& b) {
        return a.num * b.den == b.num * a.den;
    }
};

}  // namespace displab
