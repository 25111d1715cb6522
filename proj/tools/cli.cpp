#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>

#include "displab/error.hpp"
#include "displab/gsa.hpp"
#include "displab/io.hpp"
#include "displab/problems.hpp"
#include "displab/solver.hpp"
#include "displab/time_integration.hpp"

namespace displab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double parse_number(const std::string& text, const std::string& flag) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw UsageError(flag + ": '" + text + "' is not a number");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (const auto& p : split(text, ',')) out.push_back(parse_number(p, flag));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
    std::vector<std::size_t> out;
    for (const auto& p : split(text, ',')) {
        std::size_t v = 0;
        const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
        if (res.ec != std::errc() || res.ptr != p.data() + p.size() || v == 0) {
            throw UsageError(flag + ": '" + p + "' is not a positive integer");
        }
        out.push_back(v);
    }
    return out;
}

double parse_kh_max(const std::string& text) {
    if (text.empty()) return 0.0;
    if (text == "pi") return std::numbers::pi;
    if (text == "2pi") return 2.0 * std::numbers::pi;
    const double v = parse_number(text, "--kh-max");
    if (!(v > 0.0)) throw DomainError("--kh-max must be positive");
    return v;
}

PhaseBranch parse_branch(const std::string& text) {
    if (text == "continuous") return PhaseBranch::continuous;
    if (text == "principal") return PhaseBranch::principal;
    throw UsageError("--phase-branch must be 'continuous' or 'principal'");
}

Normalization parse_normalization(const std::string& text) {
    if (text == "projected") return Normalization::projected;
    if (text == "nominal") return Normalization::nominal;
    throw UsageError("--normalization must be 'projected' or 'nominal'");
}

const char* branch_name(PhaseBranch b) {
    return b == PhaseBranch::continuous ? "continuous" : "principal";
}

const char* normalization_name(Normalization n) {
    return n == Normalization::projected ? "projected" : "nominal";
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json metadata(const std::string& kind, const std::string& scheme, double wall_seconds) {
    json j;
    j["kind"] = kind;
    j["tool"] = "displab";
    j["tool_version"] = kToolVersion;
    j["scheme"] = scheme;
    j["wall_time_s"] = wall_seconds;
    j["created_utc"] = utc_timestamp();
    return j;
}

fs::path sidecar_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".json");
    return p;
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json history_json(const std::vector<TimeSample>& h) {
    json a = json::array();
    for (const auto& s : h) a.push_back({s.t, s.value});
    return a;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Analyze1DArgs {
    std::string scheme = "cncs6";
    double dalpha = 0.11;
    std::optional<double> nc_max;
    std::string kh_max;
    std::size_t grid = 401;
    std::string branch = "continuous";
    std::string out;
};

int analyze1d(const Analyze1DArgs& a, std::ostream& out) {
    const Timer timer;
    const SchemeId scheme = SchemeId::parse(a.scheme);
    Map1DOptions opt;
    opt.dalpha = a.dalpha;
    opt.nc_max = a.nc_max.value_or(scheme.cell_centered() ? 1.0 : 2.0);
    opt.kh_max = parse_kh_max(a.kh_max);
    opt.grid = a.grid;
    opt.branch = parse_branch(a.branch);
    const PropertyMap map = compute_map_1d(scheme, opt);
    write_text_file(a.out, map_csv(map));
    json j = metadata("map1d", scheme.name(), timer.seconds());
    j["parameters"] = {{"dalpha", opt.dalpha},
                       {"nc_max", opt.nc_max},
                       {"kh_max", map.axis2.back()},
                       {"phase_branch", branch_name(opt.branch)}};
    j["grid"] = {{"nc", map.axis1.size()}, {"kh", map.axis2.size()}};
    j["max_gmag"] = *std::max_element(map.gmag.begin(), map.gmag.end());
    write_json(sidecar_path(a.out), j);
    out << "wrote " << a.out << "\n";
    return kSuccess;
}

struct Analyze2DArgs {
    std::string scheme = "cncs6";
    double nc = 0.9;
    double dalpha = 0.11;
    double ar = 1.0;
    double theta = 45.0;
    std::string kh_max;
    std::size_t grid = 401;
    std::string branch = "continuous";
    std::string normalization = "projected";
    std::string out;
};

int analyze2d(const Analyze2DArgs& a, std::ostream& out) {
    const Timer timer;
    const SchemeId scheme = SchemeId::parse(a.scheme);
    if (!(a.ar > 0.0)) throw DomainError("--ar must be positive");
    Map2DOptions opt;
    opt.nc = a.nc;
    opt.dalpha = a.dalpha;
    opt.ar = a.ar;
    opt.theta = a.theta;
    opt.kh_max = parse_kh_max(a.kh_max);
    opt.grid = a.grid;
    opt.branch = parse_branch(a.branch);
    opt.normalization = parse_normalization(a.normalization);
    const PropertyMap map = compute_map_2d(scheme, opt);
    write_text_file(a.out, map_csv(map));
    json j = metadata("map2d", scheme.name(), timer.seconds());
    j["parameters"] = {{"nc", opt.nc},
                       {"dalpha", opt.dalpha},
                       {"ar", opt.ar},
                       {"theta_deg", opt.theta},
                       {"kh_max", map.axis1.back()},
                       {"phase_branch", branch_name(opt.branch)},
                       {"normalization", normalization_name(opt.normalization)}};
    j["grid"] = {{"kxhx", map.axis1.size()}, {"kyhy", map.axis2.size()}};
    j["max_gmag"] = *std::max_element(map.gmag.begin(), map.gmag.end());
    write_json(sidecar_path(a.out), j);
    out << "wrote " << a.out << "\n";
    return kSuccess;
}

struct SolveArgs {
    std::string problem;
    std::string scheme = "cncs6";
    std::string n;
    std::optional<double> cfl;
    std::optional<double> tfinal;
    std::string snapshots;
    std::string out;
};

int solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const Timer timer;
    RunConfig cfg;
    cfg.problem = builtin_from_string(a.problem);
    cfg.scheme = SchemeId::parse(a.scheme);
    if (!a.n.empty()) {
        const auto ns = parse_size_list(a.n, "--n");
        if (ns.size() > 2) throw UsageError("--n takes one or two sizes");
        cfg.n = ns[0];
        cfg.ny = ns.size() == 2 ? ns[1] : 0;
    }
    cfg.cfl = a.cfl.value_or(default_cfl(cfg.scheme));
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw DomainError("--cfl must lie in (0, 1]");
    cfg.snapshot_times = parse_number_list(a.snapshots, "--snapshots");
    std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    if (a.tfinal) {
        cfg.t_final = *a.tfinal;
    } else if (!cfg.snapshot_times.empty()) {
        cfg.t_final = cfg.snapshot_times.back();
    } else {
        cfg.t_final = cfg.problem.default_t_final;
    }
    if (!(cfg.t_final >= 0.0)) throw DomainError("--tfinal must be non-negative");
    if (cfg.snapshot_times.empty()) cfg.snapshot_times = {cfg.t_final};

    const RunResult r = run(cfg);
    const fs::path dir(a.out);
    json snaps = json::array();
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const SolutionField& s = r.snapshots[k];
        const std::string file = "snapshot_" + std::to_string(k) + ".csv";
        write_text_file(dir / file, field_csv(s));
        json e = {{"index", k}, {"time", s.time}, {"file", file}, {"mean", s.mean()}};
        if (cfg.problem.has_exact()) e["linf_error"] = linf_error(s, cfg.problem);
        snaps.push_back(e);
    }

    const FieldDiagnostics& d = r.diagnostics;
    json j = metadata("solution", cfg.scheme.name(), timer.seconds());
    json constants = json::object();
    for (const auto& [k, v] : cfg.problem.constants) constants[k] = v;
    j["parameters"] = {{"problem", cfg.problem.name},
                       {"problem_arg", a.problem},
                       {"constants", constants},
                       {"n", r.final_state.nodes_x},
                       {"cfl", cfg.cfl},
                       {"t_final", cfg.t_final}};
    if (cfg.problem.dim == 2) j["parameters"]["ny"] = r.final_state.nodes_y;
    j["layout"] = r.final_state.layout == Layout::refined ? "refined" : "node";
    j["snapshots"] = snaps;
    j["steps"] = d.step_count;
    j["dt"] = {{"min", d.dt_min}, {"max", d.dt_max}, {"last", d.dt_last}};
    j["time_reached"] = r.final_state.time;
    j["mass"] = {{"initial", d.initial_mass}, {"final", d.mass}};
    j["max_amplitude_history"] = history_json(d.max_amplitude_history);
    if (!d.error_history.empty()) j["error_history"] = history_json(d.error_history);
    if (cfg.problem.dim == 1 && !r.diverged()) {
        const SolutionField initial =
            SemiDiscrete(cfg.problem, cfg.scheme, r.final_state.nodes_x).initial_field();
        const AmplitudeDiagnostics amp = amplitude_diagnostics(initial, r.final_state);
        json peaks = json::array();
        for (const auto& p : amp.peaks) {
            peaks.push_back({{"x_initial", p.x_initial},
                             {"initial", p.initial},
                             {"x_final", p.x_final},
                             {"final", p.final},
                             {"change", p.change}});
        }
        j["peaks"] = peaks;
    }
    j["diverged"] = d.diverged;
    if (d.diverged) {
        j["failure"] = {{"step", d.failed_step}, {"stage", d.failed_stage}, {"message", d.message}};
    }
    write_json(dir / "diagnostics.json", j);
    if (d.diverged) {
        err << "error: run diverged at step " << d.failed_step << " (stage " << d.failed_stage
            << ", t = " << r.final_state.time << "); diagnostics written to " << (dir / "diagnostics.json").string()
            << "\n";
        return kDivergence;
    }
    out << "wrote " << r.snapshots.size() << " snapshot(s) to " << dir.string() << "\n";
    return kSuccess;
}

struct ConvergeArgs {
    std::string problem;
    std::string scheme = "cncs6";
    std::string n;
    std::optional<double> cfl;
    std::optional<double> tfinal;
    std::string out;
};

int converge(const ConvergeArgs& a, std::ostream& out) {
    const Timer timer;
    const ProblemSpec problem = builtin_from_string(a.problem);
    const SchemeId scheme = SchemeId::parse(a.scheme);
    const auto ns = parse_size_list(a.n, "--n");
    const double cfl = a.cfl.value_or(default_cfl(scheme));
    if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("--cfl must lie in (0, 1]");
    const double t_final = a.tfinal.value_or(problem.default_t_final);
    const auto rows = convergence_table(problem, scheme, ns, cfl, t_final);
    write_text_file(a.out, table_csv(rows));
    json j = metadata("table", scheme.name(), timer.seconds());
    j["parameters"] = {{"problem", problem.name}, {"problem_arg", a.problem}, {"cfl", cfl},
                       {"t_final", t_final}, {"n", ns}};
    write_json(sidecar_path(a.out), j);
    out << "wrote " << a.out << "\n";
    return kSuccess;
}

struct CriticalArgs {
    std::string scheme = "cncs6";
    std::optional<double> nc_max;
    std::size_t grid = 401;
    std::string out;
};

int critical(const CriticalArgs& a, std::ostream& out) {
    const Timer timer;
    const SchemeId scheme = SchemeId::parse(a.scheme);
    const double nc_max = a.nc_max.value_or(default_critical_nc_max(scheme));
    const CriticalDalpha c = find_critical_dalpha(scheme, nc_max, 0.0, a.grid);
    json j;
    j["kind"] = "scan";
    j["scheme"] = scheme.name();
    j["dalpha_cr"] = c.dalpha_cr;
    j["grid"] = c.grid;
    j["tolerance"] = kStabilityTolerance;
    j["threshold"] = c.threshold;
    j["bisection_resolution"] = c.resolution;
    j["nc_max"] = c.nc_max;
    j["kh_max"] = c.kh_max;
    j["tool"] = "displab";
    j["tool_version"] = kToolVersion;
    j["wall_time_s"] = timer.seconds();
    write_json(a.out, j);
    out << scheme.name() << ": dalpha_cr = " << format_double(c.dalpha_cr)
        << " (threshold " << format_double(c.threshold) << ")\n";
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compact-scheme dispersion analysis and KdV-family solver", "displab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Analyze1DArgs a1;
    auto* c1 = app.add_subcommand("analyze1d", "1D amplification, phase-speed and group-velocity maps");
    c1->add_option("--scheme", a1.scheme, "cncs6 | cncs8 | ccs8")->capture_default_str();
    c1->add_option("--dalpha", a1.dalpha, "dispersion number")->capture_default_str();
    c1->add_option("--nc-max", a1.nc_max, "largest Courant number (default 2, or 1 for ccs8)");
    c1->add_option("--kh-max", a1.kh_max, "pi | 2pi | number (default: Nyquist limit)");
    c1->add_option("--grid", a1.grid, "points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
    c1->add_option("--phase-branch", a1.branch, "continuous | principal")->capture_default_str();
    c1->add_option("--out", a1.out, "CSV path; metadata goes next to it as .json")->required();

    Analyze2DArgs a2;
    auto* c2 = app.add_subcommand("analyze2d", "2D maps over the (kx hx, ky hy) plane");
    c2->add_option("--scheme", a2.scheme, "cncs6 | cncs8 | ccs8")->capture_default_str();
    c2->add_option("--nc", a2.nc, "Courant number")->capture_default_str();
    c2->add_option("--dalpha", a2.dalpha, "dispersion number")->capture_default_str();
    c2->add_option("--ar", a2.ar, "cell aspect ratio hy/hx")->capture_default_str();
    c2->add_option("--theta", a2.theta, "propagation angle in degrees")->capture_default_str();
    c2->add_option("--kh-max", a2.kh_max, "pi | 2pi | number (default: Nyquist limit)");
    c2->add_option("--grid", a2.grid, "points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
    c2->add_option("--phase-branch", a2.branch, "continuous | principal")->capture_default_str();
    c2->add_option("--normalization", a2.normalization,
                   "projected | nominal Courant numbers in the ratio denominators")
        ->capture_default_str();
    c2->add_option("--out", a2.out, "CSV path; metadata goes next to it as .json")->required();

    SolveArgs s;
    auto* c3 = app.add_subcommand("solve", "run one simulation and write snapshots");
    c3->add_option("--problem", s.problem, "NAME[:key=value,...]")->required();
    c3->add_option("--scheme", s.scheme, "cncs6 | cncs8 | ccs8")->capture_default_str();
    c3->add_option("--n", s.n, "nodes per axis: N or NX,NY");
    c3->add_option("--cfl", s.cfl, "CFL number (default 0.11, or 0.011 for ccs8)");
    c3->add_option("--tfinal", s.tfinal, "final time");
    c3->add_option("--snapshots", s.snapshots, "comma-separated snapshot times");
    c3->add_option("--out", s.out, "output directory")->required();

    ConvergeArgs cv;
    auto* c4 = app.add_subcommand("converge", "L-infinity errors and observed rates over N");
    c4->add_option("--problem", cv.problem, "NAME[:key=value,...]")->required();
    c4->add_option("--scheme", cv.scheme, "cncs6 | cncs8 | ccs8")->capture_default_str();
    c4->add_option("--n", cv.n, "comma-separated grid sizes")->required();
    c4->add_option("--cfl", cv.cfl, "CFL number (default 0.11, or 0.011 for ccs8)");
    c4->add_option("--tfinal", cv.tfinal, "final time");
    c4->add_option("--out", cv.out, "CSV path; metadata goes next to it as .json")->required();

    CriticalArgs cr;
    auto* c5 = app.add_subcommand("critical-dalpha", "smallest unstable dispersion number");
    c5->add_option("--scheme", cr.scheme, "cncs6 | cncs8 | ccs8")->capture_default_str();
    c5->add_option("--nc-max", cr.nc_max, "largest Courant number scanned (default 0.8, or 0.4 for ccs8)");
    c5->add_option("--grid", cr.grid, "points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
    c5->add_option("--out", cr.out, "JSON path")->required();

    std::vector<char*> argv;
    std::vector<std::string> storage(args.begin(), args.end());
    if (storage.empty()) storage.emplace_back("displab");
    for (auto& a : storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (c1->parsed()) return analyze1d(a1, out);
        if (c2->parsed()) return analyze2d(a2, out);
        if (c3->parsed()) return solve(s, out, err);
        if (c4->parsed()) return converge(cv, out);
        if (c5->parsed()) return critical(cr, out);
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << "\n";
        return kDivergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace displab::cli
