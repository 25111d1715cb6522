#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace displab {

/// Periodic tridiagonal matrix with constant diagonals:
///
///   | diag  sup                 corner_hi |
///   | sub   diag  sup                     |
///   |        ...   ...   ...              |
///   |              sub   diag   sup       |
///   | corner_lo          sub    diag      |
///
/// Every compact scheme here produces the symmetric circulant case
/// diag = 1, sub = sup = corner_lo = corner_hi = alpha1.
struct CyclicTridiagonalSystem {
    std::size_t n = 0;
    double sub = 0.0;
    double diag = 1.0;
    double sup = 0.0;
    double corner_lo = 0.0;
    double corner_hi = 0.0;

    static CyclicTridiagonalSystem periodic(std::size_t n, double alpha1) {
        return {n, alpha1, 1.0, alpha1, alpha1, alpha1};
    }
};

inline constexpr std::size_t kMinCyclicSize = 5;

/// Throws DimensionError for n < 5 and DominanceError unless every row is
/// strictly diagonally dominant.
void validate(const CyclicTridiagonalSystem& sys);

/// Prefactored solver for one CyclicTridiagonalSystem.
///
/// The periodic matrix is split into a strictly tridiagonal part plus a
/// rank-one wrap correction (Sherman-Morrison), so each solve is a single
/// Thomas sweep followed by one axpy with a precomputed correction vector.
/// Immutable after construction; safe to share between threads.
class CyclicTridiagonalSolver {
public:
    explicit CyclicTridiagonalSolver(const CyclicTridiagonalSystem& sys);

    std::size_t size() const { return n_; }
    const CyclicTridiagonalSystem& system() const { return sys_; }

    /// Solves in place for the unknowns x[k * stride], k = 0..n-1.
    void solve_in_place(std::span<double> x, std::size_t stride = 1) const;

    /// Solves `lanes` independent systems at once. Unknown k of lane l lives
    /// at x[k * stride + l]; lanes are contiguous, so the sweep vectorizes.
    void solve_lanes_in_place(std::span<double> x, std::size_t stride, std::size_t lanes) const;

private:
    CyclicTridiagonalSystem sys_;
    std::size_t n_;
    std::vector<double> upper_;    // Thomas c'_k
    std::vector<double> inv_piv_;  // 1 / pivot_k
    std::vector<double> wrap_;     // T^{-1} u for the rank-one correction
    double wrap_ratio_ = 0.0;      // corner_hi / gamma
    double wrap_scale_ = 0.0;      // 1 / (1 + v^T T^{-1} u)
};

/// Convenience one-shot solve.
std::vector<double> solve_cyclic_tridiagonal(const CyclicTridiagonalSystem& sys,
                                             std::span<const double> rhs);

}  // namespace displab
