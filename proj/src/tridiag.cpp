#include "displab/tridiag.hpp"

#include <cmath>
#include <string>

#include "displab/error.hpp"

namespace displab {

void validate(const CyclicTridiagonalSystem& sys) {
    if (sys.n < kMinCyclicSize) {
        throw DimensionError("cyclic tridiagonal system of size " + std::to_string(sys.n) +
                             " is below the minimum of " + std::to_string(kMinCyclicSize));
    }
    const double d = std::abs(sys.diag);
    const bool dominant = std::abs(sys.sub) + std::abs(sys.sup) < d &&
                          std::abs(sys.corner_hi) + std::abs(sys.sup) < d &&
                          std::abs(sys.sub) + std::abs(sys.corner_lo) < d;
    if (!dominant) {
        throw DominanceError("cyclic tridiagonal system is not strictly diagonally dominant (sub=" +
                             std::to_string(sys.sub) + ", diag=" + std::to_string(sys.diag) +
                             ", sup=" + std::to_string(sys.sup) + ")");
    }
}

CyclicTridiagonalSolver::CyclicTridiagonalSolver(const CyclicTridiagonalSystem& sys)
    : sys_(sys), n_(sys.n) {
    validate(sys);

    const double gamma = -sys.diag;
    upper_.resize(n_);
    inv_piv_.resize(n_);

    // Modified tridiagonal part T: the first and last pivots absorb the
    // diagonal of u v^T with u = (gamma, 0, ..., 0, corner_lo) and
    // v = (1, 0, ..., 0, corner_hi / gamma).
    for (std::size_t k = 0; k < n_; ++k) {
        double pivot = sys.diag;
        if (k == 0) pivot -= gamma;
        if (k == n_ - 1) pivot -= sys.corner_lo * sys.corner_hi / gamma;
        if (k > 0) pivot -= sys.sub * upper_[k - 1];
        inv_piv_[k] = 1.0 / pivot;
        upper_[k] = sys.sup * inv_piv_[k];
    }

    wrap_.assign(n_, 0.0);
    wrap_.front() = gamma;
    wrap_.back() = sys.corner_lo;
    wrap_[0] *= inv_piv_[0];
    for (std::size_t k = 1; k < n_; ++k) {
        wrap_[k] = (wrap_[k] - sys.sub * wrap_[k - 1]) * inv_piv_[k];
    }
    for (std::size_t k = n_ - 1; k-- > 0;) {
        wrap_[k] -= upper_[k] * wrap_[k + 1];
    }
    wrap_ratio_ = sys.corner_hi / gamma;
    wrap_scale_ = 1.0 / (1.0 + wrap_.front() + wrap_ratio_ * wrap_.back());
}

void CyclicTridiagonalSolver::solve_in_place(std::span<double> x, std::size_t stride) const {
    if (stride == 0 || x.size() < (n_ - 1) * stride + 1) {
        throw DimensionError("cyclic solve: storage too small for system of size " +
                             std::to_string(n_));
    }
    const double sub = sys_.sub;
    double prev = x[0] * inv_piv_[0];
    x[0] = prev;
    for (std::size_t k = 1; k < n_; ++k) {
        double& xk = x[k * stride];
        prev = (xk - sub * prev) * inv_piv_[k];
        xk = prev;
    }
    for (std::size_t k = n_ - 1; k-- > 0;) {
        x[k * stride] -= upper_[k] * x[(k + 1) * stride];
    }
    const double factor = (x[0] + wrap_ratio_ * x[(n_ - 1) * stride]) * wrap_scale_;
    for (std::size_t k = 0; k < n_; ++k) {
        x[k * stride] -= factor * wrap_[k];
    }
}

void CyclicTridiagonalSolver::solve_lanes_in_place(std::span<double> x, std::size_t stride,
                                                   std::size_t lanes) const {
    if (lanes == 0) return;
    if (stride < lanes || x.size() < (n_ - 1) * stride + lanes) {
        throw DimensionError("cyclic lane solve: storage too small for system of size " +
                             std::to_string(n_));
    }
    const double sub = sys_.sub;
    double* base = x.data();
    {
        const double s = inv_piv_[0];
        for (std::size_t l = 0; l < lanes; ++l) base[l] *= s;
    }
    for (std::size_t k = 1; k < n_; ++k) {
        double* row = base + k * stride;
        const double* prev = row - stride;
        const double s = inv_piv_[k];
        for (std::size_t l = 0; l < lanes; ++l) row[l] = (row[l] - sub * prev[l]) * s;
    }
    for (std::size_t k = n_ - 1; k-- > 0;) {
        double* row = base + k * stride;
        const double* next = row + stride;
        const double c = upper_[k];
        for (std::size_t l = 0; l < lanes; ++l) row[l] -= c * next[l];
    }
    // Per-lane rank-one correction factors, kept in a small scratch row.
    std::vector<double> factor(lanes);
    const double* first = base;
    const double* last = base + (n_ - 1) * stride;
    for (std::size_t l = 0; l < lanes; ++l) {
        factor[l] = (first[l] + wrap_ratio_ * last[l]) * wrap_scale_;
    }
    for (std::size_t k = 0; k < n_; ++k) {
        double* row = base + k * stride;
        const double w = wrap_[k];
        for (std::size_t l = 0; l < lanes; ++l) row[l] -= factor[l] * w;
    }
}

std::vector<double> solve_cyclic_tridiagonal(const CyclicTridiagonalSystem& sys,
                                             std::span<const double> rhs) {
    CyclicTridiagonalSolver solver(sys);
    if (rhs.size() != sys.n) {
        throw DimensionError("rhs length " + std::to_string(rhs.size()) +
                             " does not match system size " + std::to_string(sys.n));
    }
    std::vector<double> x(rhs.begin(), rhs.end());
    solver.solve_in_place(x);
    return x;
}

}  // namespace displab
