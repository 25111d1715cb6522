#include "displab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "displab/error.hpp"
#include "displab/io.hpp"
#include "displab/time_integration.hpp"

namespace displab {

namespace {

void fill_flux(const Flux& f, std::span<const double> u, std::vector<double>& out) {
    out.resize(u.size());
    if (f.linear) {
        const double c = *f.linear;
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = c * u[i];
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = f.value(u[i]);
    }
}

double max_slope(const Flux& f, std::span<const double> u) {
    if (!f.present()) return 0.0;
    if (f.linear) return std::abs(*f.linear);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(f.derivative(v)));
    return m;
}

double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

SemiDiscrete::SemiDiscrete(const ProblemSpec& problem, SchemeId scheme, std::size_t nx,
                           std::size_t ny)
    : problem_(problem), scheme_(scheme), nx_(nx), ny_(problem.dim == 2 ? (ny ? ny : nx) : 1) {
    if (problem.dim != 1 && problem.dim != 2) throw UsageError("problems must be 1D or 2D");
    if (nx == 0) throw DimensionError("grid needs at least one node");
    const std::size_t r = scheme.cell_centered() ? 2 : 1;
    ex_ = nx_ * r;
    ey_ = problem.dim == 2 ? ny_ * r : 1;
    hx_ = problem.x_len / static_cast<double>(nx_);
    hy_ = problem.dim == 2 ? problem.y_len / static_cast<double>(ny_) : 0.0;
    const CompactOperator first(scheme, Derivative::first);
    const CompactOperator third(scheme, Derivative::third);
    if (problem.g1.present()) d1x_.emplace(first, ex_, hx_);
    if (problem.f1.present()) d3x_.emplace(third, ex_, hx_);
    if (problem.dim == 2) {
        if (problem.g2.present()) d1y_.emplace(first, ey_, hy_);
        if (problem.f2.present()) d3y_.emplace(third, ey_, hy_);
    }
    flux_.resize(ex_ * ey_);
    deriv_.resize(ex_ * ey_);
}

SolutionField SemiDiscrete::blank_field() const {
    SolutionField f;
    f.dim = problem_.dim;
    f.layout = scheme_.cell_centered() ? Layout::refined : Layout::node;
    f.nodes_x = nx_;
    f.nodes_y = ny_;
    f.hx = hx_;
    f.hy = hy_;
    f.x0 = problem_.x_lo;
    f.y0 = problem_.y_lo;
    f.values.assign(ex_ * ey_, 0.0);
    return f;
}

SolutionField SemiDiscrete::initial_field() const {
    SolutionField f = blank_field();
    for (std::size_t r = 0; r < ey_; ++r) {
        const double y = problem_.dim == 2 ? f.y_at(r) : 0.0;
        for (std::size_t s = 0; s < ex_; ++s) f.at(s, r) = problem_.initial(f.x_at(s), y);
    }
    f.diagnostics.initial_mass = f.mean();
    f.diagnostics.mass = f.diagnostics.initial_mass;
    return f;
}

void SemiDiscrete::check_layout(const SolutionField& field) const {
    const Layout want = scheme_.cell_centered() ? Layout::refined : Layout::node;
    if (field.layout != want || field.dim != problem_.dim || field.nodes_x != nx_ ||
        (problem_.dim == 2 && field.nodes_y != ny_) || field.values.size() != ex_ * ey_) {
        throw UsageError("solution layout does not match " + scheme_.name() + " on this lattice");
    }
}

void SemiDiscrete::rhs(std::span<const double> u, std::span<double> out) {
    if (u.size() != ex_ * ey_ || out.size() != u.size()) {
        throw DimensionError("state size does not match the lattice");
    }
    std::fill(out.begin(), out.end(), 0.0);
    auto accumulate = [&](const Flux& f, const std::optional<LineOperator>& op, bool along_x) {
        if (!op) return;
        fill_flux(f, u, flux_);
        if (along_x) {
            op->apply_rows(flux_, deriv_, ey_);
        } else {
            op->apply_columns(flux_, deriv_, ex_);
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= deriv_[i];
    };
    accumulate(problem_.g1, d1x_, true);
    accumulate(problem_.f1, d3x_, true);
    if (problem_.dim == 2) {
        accumulate(problem_.g2, d1y_, false);
        accumulate(problem_.f2, d3y_, false);
    }
}

double SemiDiscrete::stable_dt(std::span<const double> u, double cfl) const {
    const double g1 = max_slope(problem_.g1, u);
    const double f1 = max_slope(problem_.f1, u);
    if (problem_.dim == 1) return compute_timestep_1d(cfl, hx_, g1, f1);
    return compute_timestep_2d(cfl, hx_, hy_, g1, max_slope(problem_.g2, u), f1,
                               max_slope(problem_.f2, u));
}

std::vector<double> assemble_rhs(const ProblemSpec& problem, SchemeId scheme,
                                 const SolutionField& state) {
    const Layout want = scheme.cell_centered() ? Layout::refined : Layout::node;
    if (state.layout != want) {
        throw UsageError("solution layout does not match the family of " + scheme.name());
    }
    if (state.dim != problem.dim) {
        throw UsageError("solution is " + std::to_string(state.dim) + "D but " + problem.name + " is " +
                         std::to_string(problem.dim) + "D");
    }
    SemiDiscrete sd(problem, scheme, state.nodes_x, state.nodes_y);
    sd.check_layout(state);
    std::vector<double> out(state.values.size());
    sd.rhs(state.values, out);
    return out;
}

RunResult run(const RunConfig& config) {
    const ProblemSpec& problem = config.problem;
    const std::size_t n = config.n ? config.n : problem.default_n;
    const double cfl = config.cfl > 0.0 ? config.cfl : default_cfl(config.scheme);
    if (!(config.t_final >= 0.0)) throw DomainError("final time must be non-negative");
    if (config.fixed_dt && !(*config.fixed_dt > 0.0)) throw DomainError("fixed dt must be positive");
    std::vector<double> snaps = config.snapshot_times;
    for (double s : snaps) {
        if (!(s >= 0.0 && s <= config.t_final)) {
            throw DomainError("snapshot times must lie within [0, t_final]");
        }
    }
    if (!std::is_sorted(snaps.begin(), snaps.end())) throw DomainError("snapshot times must be sorted");

    SemiDiscrete sd(problem, config.scheme, n, config.ny);
    SolutionField state = sd.initial_field();
    FieldDiagnostics& diag = state.diagnostics;
    const bool track = config.track_error && problem.has_exact();

    RunResult result;
    auto record = [&](double t) {
        diag.max_amplitude_history.push_back({t, max_abs(state.values)});
        if (track) diag.error_history.push_back({t, linf_error(state, *problem.exact, t)});
    };
    auto capture = [&] {
        diag.mass = state.mean();
        result.snapshots.push_back(state);
    };

    record(0.0);
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
        capture();
        ++next_snap;
    }

    const double dt0 = config.fixed_dt ? *config.fixed_dt : sd.stable_dt(state.values, cfl);
    const double est_steps = config.t_final / dt0;
    const std::size_t stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(est_steps / static_cast<double>(std::max<std::size_t>(1, config.history_points))));

    Ssprk3Stepper stepper(state.values.size());
    RhsFunction rhs = [&sd](std::span<const double> u, std::span<double> out) { sd.rhs(u, out); };
    double t = 0.0;
    const double eps_t = 1e-12 * std::max(1.0, config.t_final);
    while (t < config.t_final - eps_t) {
        const double target =
            next_snap < snaps.size() ? std::min(snaps[next_snap], config.t_final) : config.t_final;
        double dt = config.fixed_dt ? *config.fixed_dt : sd.stable_dt(state.values, cfl);
        bool lands = false;
        if (t + dt >= target - eps_t) {
            dt = target - t;
            lands = true;
        }
        if (dt <= 0.0) {
            lands = true;
        } else {
            try {
                stepper.step(state.values, dt, rhs);
            } catch (const DivergenceError& e) {
                diag.diverged = true;
                diag.failed_stage = e.stage();
                diag.failed_step = diag.step_count + 1;
                diag.message = e.what();
                break;
            }
            ++diag.step_count;
            diag.dt_min = diag.step_count == 1 ? dt : std::min(diag.dt_min, dt);
            diag.dt_max = std::max(diag.dt_max, dt);
            diag.dt_last = dt;
        }
        t = lands ? target : t + dt;
        state.time = t;
        if (diag.step_count % stride == 0 || lands) record(t);
        while (lands && next_snap < snaps.size() && snaps[next_snap] <= t + eps_t) {
            capture();
            ++next_snap;
        }
    }
    state.time = t;
    diag.mass = state.mean();
    if (diag.max_amplitude_history.empty() || diag.max_amplitude_history.back().t != t) {
        if (!diag.diverged) record(t);
    }
    result.diagnostics = diag;
    result.final_state = std::move(state);
    return result;
}

RunResult run_small_dispersion(double eps, const std::string& ic, SchemeId scheme, std::size_t n,
                               double t_final, std::vector<double> snapshot_times,
                               const SnapshotFilter& filter) {
    RunConfig cfg;
    cfg.problem = builtin("kdv-small-dispersion", {{"eps", format_double(eps)}, {"ic", ic}});
    cfg.scheme = scheme;
    cfg.n = n;
    cfg.t_final = t_final;
    cfg.snapshot_times = snapshot_times.empty() ? std::vector<double>{t_final} : std::move(snapshot_times);
    cfg.track_error = false;
    RunResult r = run(cfg);
    if (filter) {
        for (auto& s : r.snapshots) filter(s);
    }
    return r;
}

}  // namespace displab
