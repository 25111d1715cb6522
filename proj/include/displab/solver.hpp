#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "displab/field.hpp"
#include "displab/problems.hpp"
#include "displab/schemes.hpp"

namespace displab {

/// Spatial discretization of one problem on one lattice: the bound compact
/// operators plus flux scratch space. Not thread-safe (owns scratch buffers).
class SemiDiscrete {
public:
    /// ny is ignored in 1D; ny == 0 in 2D means ny = nx.
    SemiDiscrete(const ProblemSpec& problem, SchemeId scheme, std::size_t nx, std::size_t ny = 0);

    const ProblemSpec& problem() const { return problem_; }
    SchemeId scheme() const { return scheme_; }

    /// Field on this lattice with the initial condition sampled at every
    /// stored point (cell centers included for the refined layout).
    SolutionField initial_field() const;

    /// Empty field with this lattice's geometry.
    SolutionField blank_field() const;

    /// out = -[Dx g1(u) + Dy g2(u) + Dxxx f1(u) + Dyyy f2(u)].
    void rhs(std::span<const double> u, std::span<double> out);

    /// Stable step from the current wave speeds: max |g'(u)| and max |f'(u)|
    /// over every stored sample.
    double stable_dt(std::span<const double> u, double cfl) const;

    std::size_t storage_size() const { return ex_ * ey_; }

private:
    void check_layout(const SolutionField& field) const;

    ProblemSpec problem_;
    SchemeId scheme_;
    std::size_t nx_, ny_;  // nodes per axis
    std::size_t ex_, ey_;  // stored samples per axis
    double hx_, hy_;
    std::optional<LineOperator> d1x_, d3x_, d1y_, d3y_;
    std::vector<double> flux_, deriv_;

    friend std::vector<double> assemble_rhs(const ProblemSpec&, SchemeId, const SolutionField&);
};

/// One-shot RHS evaluation. Throws UsageError if the field layout does not
/// match the scheme family or lattice.
std::vector<double> assemble_rhs(const ProblemSpec& problem, SchemeId scheme,
                                 const SolutionField& state);

struct RunConfig {
    ProblemSpec problem;
    SchemeId scheme;
    std::size_t n = 0;   // nodes along x (0 selects the problem default)
    std::size_t ny = 0;  // nodes along y in 2D (0 means ny = n)
    double cfl = 0.0;    // 0 selects the scheme default
    double t_final = 0.0;
    std::vector<double> snapshot_times;  // sorted, within [0, t_final]
    /// Overrides the CFL rule with a constant step (final and snapshot steps still clamp).
    std::optional<double> fixed_dt;
    bool track_error = true;
    std::size_t history_points = 2000;
};

struct RunResult {
    std::vector<SolutionField> snapshots;
    SolutionField final_state;  // last finite state (at failure time if diverged)
    FieldDiagnostics diagnostics;

    bool diverged() const { return diagnostics.diverged; }
};

/// Integrates config.problem to t_final. Divergence does not throw: the
/// result is marked diverged and carries diagnostics up to the failure.
RunResult run(const RunConfig& config);

/// Post-processing applied to every snapshot of a small-dispersion run.
using SnapshotFilter = std::function<void(SolutionField&)>;

/// Small-dispersion KdV from the smooth or top-hat initial condition. n == 0
/// selects 200, 800 or 1500 nodes for eps of 1e-4, 1e-5 or 1e-6. The filter
/// defaults to a no-op.
RunResult run_small_dispersion(double eps, const std::string& ic, SchemeId scheme, std::size_t n,
                               double t_final, std::vector<double> snapshot_times = {},
                               const SnapshotFilter& filter = {});

}  // namespace displab
