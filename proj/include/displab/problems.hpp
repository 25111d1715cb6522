#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "displab/field.hpp"
#include "displab/schemes.hpp"

namespace displab {

/// Pointwise flux g(u) with its derivative. `linear` holds the coefficient
/// when g(u) = linear * u, which lets callers skip the function calls.
struct Flux {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::optional<double> linear;

    bool present() const { return static_cast<bool>(value); }
    double operator()(double u) const { return linear ? *linear * u : value(u); }
    double slope(double u) const { return linear ? *linear : derivative(u); }

    static Flux linear_flux(double coefficient);
    static Flux none() { return {}; }
};

/// Initial condition u(x, y) and exact solution u(x, y, t); y is ignored in 1D.
using InitialCondition = std::function<double(double x, double y)>;
using ExactSolution = std::function<double(double x, double y, double t)>;

/// A benchmark of the form
///   u_t + g1(u)_x + g2(u)_y + f1(u)_xxx + f2(u)_yyy = 0
/// on a periodic box.
struct ProblemSpec {
    std::string name;
    int dim = 1;
    double x_lo = 0.0;
    double x_len = 0.0;
    double y_lo = 0.0;
    double y_len = 0.0;
    Flux g1, g2, f1, f2;
    InitialCondition initial;
    std::optional<ExactSolution> exact;
    std::map<std::string, double> constants;
    std::string variant;  // initial-condition variant where several exist
    std::size_t default_n = 100;
    double default_t_final = 0.5;

    bool has_exact() const { return exact.has_value(); }
};

/// Problem parameters as given on the command line (key -> raw value).
using ProblemParams = std::map<std::string, std::string>;

/// Registry names: linear-1d (k), kdv-single-soliton (alias kdv-single),
/// kdv-double-soliton (alias kdv-double), kdv-small-dispersion (eps, ic =
/// smooth | tophat), mkdv-single (c, x0, mu, eps), mkdv-double (c1, c2, x1,
/// x2, mu, eps), linear-2d. Throws RegistryError for unknown names or keys.
ProblemSpec builtin(std::string_view name, const ProblemParams& params = {});

/// Parses "NAME" or "NAME:key=value,key=value" (':' also accepted between pairs).
ProblemSpec builtin_from_string(std::string_view spec);

/// Names accepted by builtin(), aliases excluded.
std::vector<std::string> builtin_names();

/// Max |u_num - u_exact| over grid nodes at time t. Centers of the refined
/// layout are not compared.
double linf_error(const SolutionField& field, const ExactSolution& exact, double t);

/// Throws UnsupportedMetricError when the problem has no exact solution.
double linf_error(const SolutionField& field, const ProblemSpec& problem);

struct ErrorReport {
    std::size_t n = 0;
    double linf_error = 0.0;
    std::optional<double> rate;
};

/// Fills rate = log(e_prev / e_cur) / log(N_cur / N_prev) for rows after the first.
void fill_rates(std::vector<ErrorReport>& rows);

/// Runs the solver for each N and tabulates the errors at t_final.
/// cfl <= 0 selects the scheme default.
std::vector<ErrorReport> convergence_table(const ProblemSpec& problem, SchemeId scheme,
                                           std::span<const std::size_t> n_list, double cfl,
                                           double t_final);

struct PeakChange {
    double x_initial = 0.0;
    double initial = 0.0;
    double x_final = 0.0;
    double final = 0.0;
    double change = 0.0;  // |final - initial|
};

/// Local maxima of the node samples of a 1D field above `fraction` times the
/// global maximum, sorted by decreasing height.
std::vector<std::pair<double, double>> find_peaks(const SolutionField& field,
                                                  double fraction = 0.5);

struct AmplitudeDiagnostics {
    std::vector<TimeSample> max_amplitude_history;
    /// Peaks matched by rank of height: entry 0 is the tallest soliton.
    std::vector<PeakChange> peaks;
};

AmplitudeDiagnostics amplitude_diagnostics(const SolutionField& initial,
                                           const SolutionField& final_field);

}  // namespace displab
