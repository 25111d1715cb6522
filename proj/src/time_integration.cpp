#include "displab/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "displab/error.hpp"

namespace displab {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

double default_cfl(SchemeId scheme) { return scheme.cell_centered() ? 0.011 : 0.11; }

double compute_timestep_1d(double cfl, double h, double max_gprime, double max_fprime) {
    if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
    if (!(cfl > 0.0)) throw DomainError("cfl must be positive");
    const double rate = std::abs(max_gprime) / h + std::abs(max_fprime) / (h * h * h);
    if (!(rate > 0.0)) throw DomainError("degenerate problem: no convection and no dispersion");
    return cfl / rate;
}

double compute_timestep_2d(double cfl, double hx, double hy, double max_g1p, double max_g2p,
                           double max_f1p, double max_f2p) {
    if (!(hx > 0.0) || !(hy > 0.0)) throw DomainError("grid spacing must be positive");
    if (!(cfl > 0.0)) throw DomainError("cfl must be positive");
    const double rate = std::abs(max_g1p) / hx + std::abs(max_g2p) / hy +
                        std::abs(max_f1p) / (hx * hx * hx) + std::abs(max_f2p) / (hy * hy * hy);
    if (!(rate > 0.0)) throw DomainError("degenerate problem: no convection and no dispersion");
    return cfl / rate;
}

Ssprk3Stepper::Ssprk3Stepper(std::size_t size) : u0_(size), stage_(size), slope_(size) {}

void Ssprk3Stepper::step(std::span<double> u, double dt, const RhsFunction& rhs) {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    const std::size_t n = u.size();
    u0_.resize(n);
    stage_.resize(n);
    slope_.resize(n);
    std::copy(u.begin(), u.end(), u0_.begin());

    auto fail = [](int stage) {
        throw DivergenceError(stage, "non-finite value in SSPRK3 stage " + std::to_string(stage));
    };

    rhs(u0_, slope_);
    for (std::size_t i = 0; i < n; ++i) stage_[i] = u0_[i] + dt * slope_[i];
    if (!all_finite(stage_)) fail(1);

    rhs(stage_, slope_);
    for (std::size_t i = 0; i < n; ++i) {
        stage_[i] = 0.75 * u0_[i] + 0.25 * stage_[i] + 0.25 * dt * slope_[i];
    }
    if (!all_finite(stage_)) fail(2);

    rhs(stage_, slope_);
    // (u0 + 2 (u2 + dt S)) / 3 rather than 1/3 u0 + 2/3 u2 + ...: the rounded
    // weights 1/3 and 2/3 sum to 1 - 2^-54, which would shrink the mean every step.
    for (std::size_t i = 0; i < n; ++i) {
        slope_[i] = (u0_[i] + 2.0 * (stage_[i] + dt * slope_[i])) / 3.0;
    }
    if (!all_finite(slope_)) fail(3);
    std::copy(slope_.begin(), slope_.end(), u.begin());
}

std::vector<double> ssprk3_step(std::span<const double> u, double dt, const RhsFunction& rhs) {
    std::vector<double> out(u.begin(), u.end());
    Ssprk3Stepper stepper(out.size());
    stepper.step(out, dt, rhs);
    return out;
}

}  // namespace displab
