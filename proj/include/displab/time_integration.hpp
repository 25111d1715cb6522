#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "displab/schemes.hpp"

namespace displab {

/// Right-hand side S(u) of du/dt = S(u), written into `out` (same size as `u`).
using RhsFunction = std::function<void(std::span<const double> u, std::span<double> out)>;

struct StepControl {
    double cfl = 0.11;
    double t_final = 0.0;
    bool clamp_last_step = true;
};

/// 0.11 for node-centered schemes, 0.011 for the cell-centered scheme.
double default_cfl(SchemeId scheme);

/// dt = cfl / (max|g'|/h + max|f'|/h^3). Throws DomainError when both maxima vanish.
double compute_timestep_1d(double cfl, double h, double max_gprime, double max_fprime);

/// dt = cfl / (max|g1'|/hx + max|g2'|/hy + max|f1'|/hx^3 + max|f2'|/hy^3).
double compute_timestep_2d(double cfl, double hx, double hy, double max_g1p, double max_g2p,
                           double max_f1p, double max_f2p);

/// Three-stage SSPRK3 with reusable stage buffers:
///   u1 = u0 + dt S(u0)
///   u2 = 3/4 u0 + 1/4 u1 + 1/4 dt S(u1)
///   u  = 1/3 u0 + 2/3 u2 + 2/3 dt S(u2)
class Ssprk3Stepper {
public:
    explicit Ssprk3Stepper(std::size_t size = 0);

    /// Advances `u` in place. Throws DivergenceError (stage 1..3) if a stage
    /// produces a non-finite value; `u` is left unchanged in that case.
    void step(std::span<double> u, double dt, const RhsFunction& rhs);

private:
    std::vector<double> u0_, stage_, slope_;
};

/// One-shot convenience wrapper around Ssprk3Stepper.
std::vector<double> ssprk3_step(std::span<const double> u, double dt, const RhsFunction& rhs);

}  // namespace displab
