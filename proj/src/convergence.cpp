#include "displab/error.hpp"
#include "displab/problems.hpp"
#include "displab/solver.hpp"

namespace displab {

std::vector<ErrorReport> convergence_table(const ProblemSpec& problem, SchemeId scheme,
                                           std::span<const std::size_t> n_list, double cfl,
                                           double t_final) {
    if (!problem.has_exact()) {
        throw UnsupportedMetricError("problem '" + problem.name +
                                     "' has no exact solution; cannot build a convergence table");
    }
    std::vector<ErrorReport> rows;
    for (std::size_t n : n_list) {
        RunConfig cfg;
        cfg.problem = problem;
        cfg.scheme = scheme;
        cfg.n = n;
        cfg.cfl = cfl;
        cfg.t_final = t_final;
        cfg.track_error = false;
        const RunResult r = run(cfg);
        if (r.diverged()) {
            throw DivergenceError(r.diagnostics.failed_stage,
                                  "run with N = " + std::to_string(n) + " diverged: " +
                                      r.diagnostics.message);
        }
        rows.push_back({n, linf_error(r.final_state, problem), std::nullopt});
    }
    fill_rates(rows);
    return rows;
}

}  // namespace displab
