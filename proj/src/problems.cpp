#include "displab/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include "displab/error.hpp"

namespace displab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sech(double x) { return 1.0 / std::cosh(x); }

class Params {
public:
    Params(std::string problem, const ProblemParams& raw, std::set<std::string> allowed)
        : problem_(std::move(problem)), raw_(raw) {
        for (const auto& [key, value] : raw_) {
            if (!allowed.contains(key)) {
                throw RegistryError("problem '" + problem_ + "' has no parameter '" + key + "'");
            }
        }
    }

    double number(const std::string& key, double fallback) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string& s = it->second;
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw RegistryError("parameter " + key + "='" + s + "' of '" + problem_ +
                                "' is not a number");
        }
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = raw_.find(key);
        return it == raw_.end() ? fallback : it->second;
    }

private:
    std::string problem_;
    const ProblemParams& raw_;
};

void require_positive(const std::string& what, double v) {
    if (!(v > 0.0)) throw RegistryError(what + " must be positive");
}

ProblemSpec linear_1d(const ProblemParams& raw) {
    const Params p("linear-1d", raw, {"k"});
    const double k = p.number("k", 1.0);
    require_positive("k", k);
    ProblemSpec s;
    s.name = "linear-1d";
    s.x_lo = 0.0;
    s.x_len = kTwoPi;
    s.g1 = Flux::linear_flux(2.0);
    s.f1 = Flux::linear_flux(1.0 / (k * k));
    s.initial = [k](double x, double) { return std::sin(k * x); };
    s.exact = [k](double x, double, double t) { return std::sin(k * (x - t)); };
    s.constants = {{"k", k}, {"c", 2.0}, {"alpha", 1.0 / (k * k)}};
    return s;
}

Flux kdv_flux() {
    return {[](double u) { return 3.0 * u * u; }, [](double u) { return 6.0 * u; }, std::nullopt};
}

ProblemSpec kdv_single(const ProblemParams& raw) {
    const Params p("kdv-single-soliton", raw, {});
    ProblemSpec s;
    s.name = "kdv-single-soliton";
    s.x_lo = -10.0;
    s.x_len = 22.0;
    s.g1 = kdv_flux();
    s.f1 = Flux::linear_flux(1.0);
    s.initial = [](double x, double) { return 2.0 * sech(x) * sech(x); };
    s.exact = [](double x, double, double t) {
        const double q = sech(x - 4.0 * t);
        return 2.0 * q * q;
    };
    s.constants = {{"c", 4.0}};
    s.default_n = 140;
    return s;
}

ProblemSpec kdv_double(const ProblemParams& raw) {
    const Params p("kdv-double-soliton", raw, {});
    ProblemSpec s;
    s.name = "kdv-double-soliton";
    s.x_lo = -10.0;
    s.x_len = 30.0;
    s.g1 = kdv_flux();
    s.f1 = Flux::linear_flux(1.0);
    s.initial = [](double x, double) { return 6.0 * sech(x) * sech(x); };
    s.exact = [](double x, double, double t) {
        const double num = 3.0 + 4.0 * std::cosh(2.0 * x - 8.0 * t) + std::cosh(4.0 * x - 64.0 * t);
        const double den = 3.0 * std::cosh(x - 28.0 * t) + std::cosh(3.0 * x - 36.0 * t);
        return 12.0 * num / (den * den);
    };
    s.default_n = 400;
    return s;
}

ProblemSpec kdv_small_dispersion(const ProblemParams& raw) {
    const Params p("kdv-small-dispersion", raw, {"eps", "ic"});
    const double eps = p.number("eps", 1e-4);
    require_positive("eps", eps);
    const std::string ic = p.text("ic", "smooth");
    ProblemSpec s;
    s.name = "kdv-small-dispersion";
    s.x_lo = 0.0;
    s.x_len = 1.0;
    s.g1 = {[](double u) { return 0.5 * u * u; }, [](double u) { return u; }, std::nullopt};
    s.f1 = Flux::linear_flux(eps);
    if (ic == "smooth") {
        s.initial = [](double x, double) { return 2.0 + 0.5 * std::sin(kTwoPi * x); };
    } else if (ic == "tophat") {
        s.initial = [](double x, double) { return (x > 0.25 && x < 0.4) ? 1.0 : 0.0; };
    } else {
        throw RegistryError("kdv-small-dispersion: ic must be 'smooth' or 'tophat', got '" + ic + "'");
    }
    s.variant = ic;
    s.constants = {{"eps", eps}};
    s.default_n = eps >= 1e-4 ? 200 : (eps >= 1e-5 ? 800 : 1500);
    return s;
}

Flux mkdv_flux(double mu) {
    return {[mu](double u) { return mu / 3.0 * u * u * u; }, [mu](double u) { return mu * u * u; },
            std::nullopt};
}

ProblemSpec mkdv_single(const ProblemParams& raw) {
    const Params p("mkdv-single", raw, {"c", "x0", "mu", "eps"});
    const double c = p.number("c", 0.845);
    const double x0 = p.number("x0", 20.0);
    const double mu = p.number("mu", 3.0);
    const double eps = p.number("eps", 1.0);
    require_positive("c", c);
    require_positive("mu", mu);
    require_positive("eps", eps);
    const double amp = std::sqrt(6.0 * c / mu);
    const double k = std::sqrt(c / eps);
    ProblemSpec s;
    s.name = "mkdv-single";
    s.x_lo = 0.0;
    s.x_len = 80.0;
    s.g1 = mkdv_flux(mu);
    s.f1 = Flux::linear_flux(eps);
    s.initial = [=](double x, double) { return amp * sech(k * (x - x0)); };
    s.exact = [=](double x, double, double t) { return amp * sech(k * ((x - x0) - c * t)); };
    s.constants = {{"c", c}, {"x0", x0}, {"mu", mu}, {"eps", eps}, {"A", amp}, {"k", k}};
    s.default_n = 400;
    s.default_t_final = 20.0;
    return s;
}

ProblemSpec mkdv_double(const ProblemParams& raw) {
    const Params p("mkdv-double", raw, {"c1", "c2", "x1", "x2", "mu", "eps"});
    const double c1 = p.number("c1", 2.0);
    const double c2 = p.number("c2", 1.0);
    const double x1 = p.number("x1", 15.0);
    const double x2 = p.number("x2", 25.0);
    const double mu = p.number("mu", 3.0);
    const double eps = p.number("eps", 1.0);
    require_positive("c1", c1);
    require_positive("c2", c2);
    require_positive("mu", mu);
    require_positive("eps", eps);
    const double a1 = std::sqrt(6.0 * c1 / mu), k1 = std::sqrt(c1 / eps);
    const double a2 = std::sqrt(6.0 * c2 / mu), k2 = std::sqrt(c2 / eps);
    ProblemSpec s;
    s.name = "mkdv-double";
    s.x_lo = 0.0;
    s.x_len = 80.0;
    s.g1 = mkdv_flux(mu);
    s.f1 = Flux::linear_flux(eps);
    s.initial = [=](double x, double) {
        return a1 * sech(k1 * (x - x1)) + a2 * sech(k2 * (x - x2));
    };
    s.constants = {{"c1", c1}, {"c2", c2}, {"x1", x1}, {"x2", x2}, {"mu", mu},
                   {"eps", eps}, {"A1", a1}, {"A2", a2}, {"k1", k1}, {"k2", k2}};
    s.default_n = 500;
    s.default_t_final = 20.0;
    return s;
}

ProblemSpec linear_2d(const ProblemParams& raw) {
    const Params p("linear-2d", raw, {});
    ProblemSpec s;
    s.name = "linear-2d";
    s.dim = 2;
    s.x_lo = 0.0;
    s.x_len = kTwoPi;
    s.y_lo = 0.0;
    s.y_len = kTwoPi;
    s.g1 = Flux::linear_flux(2.0);
    s.g2 = Flux::linear_flux(2.0);
    s.f1 = Flux::linear_flux(1.0);
    s.f2 = Flux::linear_flux(1.0);
    s.initial = [](double x, double y) { return std::sin(x + y); };
    s.exact = [](double x, double y, double t) { return std::sin(x + y - 2.0 * t); };
    s.constants = {{"c", 2.0}, {"alpha", 1.0}};
    return s;
}

}  // namespace

Flux Flux::linear_flux(double coefficient) {
    return {[coefficient](double u) { return coefficient * u; },
            [coefficient](double) { return coefficient; }, coefficient};
}

std::vector<std::string> builtin_names() {
    return {"linear-1d",   "kdv-single-soliton", "kdv-double-soliton", "kdv-small-dispersion",
            "mkdv-single", "mkdv-double",        "linear-2d"};
}

ProblemSpec builtin(std::string_view name, const ProblemParams& params) {
    if (name == "linear-1d") return linear_1d(params);
    if (name == "kdv-single-soliton" || name == "kdv-single") return kdv_single(params);
    if (name == "kdv-double-soliton" || name == "kdv-double") return kdv_double(params);
    if (name == "kdv-small-dispersion") return kdv_small_dispersion(params);
    if (name == "mkdv-single") return mkdv_single(params);
    if (name == "mkdv-double") return mkdv_double(params);
    if (name == "linear-2d") return linear_2d(params);
    std::string known;
    for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
    throw RegistryError("unknown problem '" + std::string(name) + "' (known: " + known + ")");
}

ProblemSpec builtin_from_string(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    ProblemParams params;
    if (colon != std::string_view::npos) {
        std::string_view rest = spec.substr(colon + 1);
        while (!rest.empty()) {
            const auto sep = rest.find_first_of(",:");
            const std::string_view item = rest.substr(0, sep);
            rest = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw RegistryError("malformed problem parameter '" + std::string(item) +
                                    "' (expected key=value)");
            }
            params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        }
    }
    return builtin(name, params);
}

double linf_error(const SolutionField& field, const ExactSolution& exact, double t) {
    const std::size_t ny = field.dim == 2 ? field.nodes_y : 1;
    double err = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = field.y0 + static_cast<double>(j) * field.hy;
        for (std::size_t i = 0; i < field.nodes_x; ++i) {
            const double x = field.x0 + static_cast<double>(i) * field.hx;
            err = std::max(err, std::abs(field.node(i, j) - exact(x, y, t)));
        }
    }
    return err;
}

double linf_error(const SolutionField& field, const ProblemSpec& problem) {
    if (!problem.has_exact()) {
        throw UnsupportedMetricError("problem '" + problem.name +
                                     "' has no exact solution; L-infinity error is undefined");
    }
    return linf_error(field, *problem.exact, field.time);
}

void fill_rates(std::vector<ErrorReport>& rows) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == 0) {
            rows[r].rate.reset();
            continue;
        }
        const auto& prev = rows[r - 1];
        const auto& cur = rows[r];
        rows[r].rate = std::log(prev.linf_error / cur.linf_error) /
                       std::log(static_cast<double>(cur.n) / static_cast<double>(prev.n));
    }
}

std::vector<std::pair<double, double>> find_peaks(const SolutionField& field, double fraction) {
    if (field.dim != 1) throw UsageError("peak detection is defined for 1D fields");
    const std::vector<double> u = field.node_values();
    const std::size_t n = u.size();
    std::vector<std::pair<double, double>> peaks;
    if (n < 3) return peaks;
    const double top = *std::max_element(u.begin(), u.end());
    for (std::size_t i = 0; i < n; ++i) {
        const double left = u[(i + n - 1) % n];
        const double right = u[(i + 1) % n];
        if (u[i] > left && u[i] >= right && u[i] > fraction * top) {
            peaks.emplace_back(field.x0 + static_cast<double>(i) * field.hx, u[i]);
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    return peaks;
}

AmplitudeDiagnostics amplitude_diagnostics(const SolutionField& initial,
                                           const SolutionField& final_field) {
    AmplitudeDiagnostics d;
    d.max_amplitude_history = final_field.diagnostics.max_amplitude_history;
    const auto before = find_peaks(initial);
    const auto after = find_peaks(final_field);
    const std::size_t m = std::min(before.size(), after.size());
    for (std::size_t r = 0; r < m; ++r) {
        PeakChange c;
        c.x_initial = before[r].first;
        c.initial = before[r].second;
        c.x_final = after[r].first;
        c.final = after[r].second;
        c.change = std::abs(c.final - c.initial);
        d.peaks.push_back(c);
    }
    return d;
}

}  // namespace displab
