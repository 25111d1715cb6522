#include "displab/gsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "displab/error.hpp"
#include "displab/parallel.hpp"

namespace displab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Largest kh step used when following the continuous phase branch.
constexpr double kSweepStep = 2e-3;

struct Coeffs {
    double alpha, a, b, c;
};

Coeffs load(SchemeId scheme, Derivative d) {
    const auto s = coefficients(scheme, d);
    return {s.alpha1.value(), s.a1.value(), s.b1.value(), s.c1.value()};
}

void check_kh(SchemeId scheme, double kh) {
    const double top = scheme.kh_max();
    if (!(kh >= 0.0 && kh <= top * (1.0 + 1e-12))) {
        throw DomainError("kh = " + std::to_string(kh) + " is outside [0, " +
                          std::to_string(top) + "] for " + scheme.name());
    }
}

// Numerator and its derivative of each closed form; denominators are shared.
struct Fraction {
    double num, dnum, den, dden;
    double value() const { return num / den; }
    double derivative() const { return (dnum * den - num * dden) / (den * den); }
};

Fraction first_fraction(SchemeId scheme, double x) {
    const Coeffs k = load(scheme, Derivative::first);
    Fraction f{};
    f.den = 1.0 + 2.0 * k.alpha * std::cos(x);
    f.dden = -2.0 * k.alpha * std::sin(x);
    if (!scheme.cell_centered()) {
        f.num = k.a * std::sin(x) + k.b / 2.0 * std::sin(2 * x) + k.c / 3.0 * std::sin(3 * x);
        f.dnum = k.a * std::cos(x) + k.b * std::cos(2 * x) + k.c * std::cos(3 * x);
    } else {
        f.num = 2.0 * (k.a * std::sin(x / 2) + k.b / 2.0 * std::sin(x) +
                       k.c / 3.0 * std::sin(1.5 * x));
        f.dnum = k.a * std::cos(x / 2) + k.b * std::cos(x) + k.c * std::cos(1.5 * x);
    }
    return f;
}

Fraction third_fraction(SchemeId scheme, double x) {
    const Coeffs k = load(scheme, Derivative::third);
    Fraction f{};
    f.den = 1.0 + 2.0 * k.alpha * std::cos(x);
    f.dden = -2.0 * k.alpha * std::sin(x);
    if (!scheme.cell_centered()) {
        f.num = k.a * (2 * std::sin(x) - std::sin(2 * x)) +
                k.b / 4.0 * (3 * std::sin(x) - std::sin(3 * x)) +
                k.c / 10.0 * (4 * std::sin(x) - std::sin(4 * x));
        f.dnum = k.a * (2 * std::cos(x) - 2 * std::cos(2 * x)) +
                 0.75 * k.b * (std::cos(x) - std::cos(3 * x)) +
                 0.4 * k.c * (std::cos(x) - std::cos(4 * x));
    } else {
        const double p = 2 * k.a * (8 * std::sin(x / 2) - 4 * std::sin(x));
        const double q = 2 * k.b / 5 * (12 * std::sin(x) - 8 * std::sin(1.5 * x));
        const double r = 2 * k.c / 35 * (20 * std::sin(x) - 8 * std::sin(2.5 * x));
        const double dp = 2 * k.a * (4 * std::cos(x / 2) - 4 * std::cos(x));
        const double dq = 2 * k.b / 5 * (12 * std::cos(x) - 12 * std::cos(1.5 * x));
        const double dr = 2 * k.c / 35 * (20 * std::cos(x) - 20 * std::cos(2.5 * x));
        f.num = p + q + r;
        f.dnum = dp + dq + dr;
    }
    return f;
}

// Spectral symbols at one kh, cached for map sweeps.
struct Symbol {
    double k1 = 0.0, k3 = 0.0, dk1 = 0.0, dk3 = 0.0;
};

Symbol symbol(SchemeId scheme, double kh) {
    const Fraction f1 = first_fraction(scheme, kh);
    const Fraction f3 = third_fraction(scheme, kh);
    return {f1.value(), f3.value(), f1.derivative(), f3.derivative()};
}

cplx operator_a(double nc, double dalpha, const Symbol& s) {
    return {0.0, nc * s.k1 - dalpha * s.k3};
}

// -Im(G'/G) for G = P(A(kh)), with dA/dkh = i(nc k1' - dalpha k3').
double beta_derivative(cplx a, cplx da) {
    const cplx g = rk3_polynomial(a);
    const cplx dg = (-1.0 + a - a * a / 2.0) * da;
    return -std::imag(dg / g);
}

double principal_phase(cplx g) {
    if (g.real() == 0.0) return g.imag() == 0.0 ? 0.0 : std::copysign(kPi / 2, -g.imag());
    return std::atan(-g.imag() / g.real());
}

double raw_phase(cplx g) { return std::atan2(-g.imag(), g.real()); }

std::size_t sweep_steps(double span) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / kSweepStep)));
}

std::optional<double> masked_ratio(double num, double den, double scale) {
    if (!(std::abs(den) > kSingularTolerance * scale)) return std::nullopt;
    return num / den;
}

struct AxisNumbers {
    double cx, cy, dx, dy;
};

AxisNumbers denominators(const SpectralParams2D& p, Normalization norm) {
    if (norm == Normalization::projected) return {p.ncx, p.ncy, p.dax, p.day};
    const double nc = std::hypot(p.ncx, p.ncy * p.ar);
    return {nc, nc / p.ar, p.dax, p.dax / (p.ar * p.ar * p.ar)};
}

double resolve_kh_max(SchemeId scheme, double requested) {
    const double top = scheme.kh_max();
    if (requested == 0.0) return top;
    if (!(requested > 0.0) || requested > top * (1.0 + 1e-12)) {
        throw DomainError("kh-max " + std::to_string(requested) + " exceeds the Nyquist limit " +
                          std::to_string(top) + " of " + scheme.name());
    }
    return std::min(requested, top);
}

}  // namespace

double k1_eq(SchemeId scheme, double kh) {
    check_kh(scheme, kh);
    return first_fraction(scheme, kh).value();
}

double k3_eq_cubed(SchemeId scheme, double kh) {
    check_kh(scheme, kh);
    return third_fraction(scheme, kh).value();
}

double k1_eq_derivative(SchemeId scheme, double kh) {
    check_kh(scheme, kh);
    return first_fraction(scheme, kh).derivative();
}

double k3_eq_cubed_derivative(SchemeId scheme, double kh) {
    check_kh(scheme, kh);
    return third_fraction(scheme, kh).derivative();
}

SpectralParams2D SpectralParams2D::from_angle(double nc, double dalpha, double kxhx, double kyhy,
                                              double ar, double theta_deg) {
    if (!(ar > 0.0)) throw DomainError("aspect ratio must be positive");
    const double t = theta_deg * kPi / 180.0;
    SpectralParams2D p;
    p.ncx = nc * std::cos(t);
    p.ncy = nc * std::sin(t) / ar;
    p.dax = dalpha;
    p.day = dalpha / (ar * ar * ar);
    p.kxhx = kxhx;
    p.kyhy = kyhy;
    p.ar = ar;
    p.theta = theta_deg;
    return p;
}

cplx amplification_physical_1d(const SpectralParams1D& p) {
    const double kh3 = p.kh * p.kh * p.kh;
    return std::polar(1.0, -p.nc * p.kh + p.dalpha * kh3);
}

cplx rk3_polynomial(cplx a) { return 1.0 - a + a * a / 2.0 - a * a * a / 6.0; }

cplx amplification_numerical_1d(SchemeId scheme, const SpectralParams1D& p) {
    const cplx a{0.0, p.nc * k1_eq(scheme, p.kh) - p.dalpha * k3_eq_cubed(scheme, p.kh)};
    return rk3_polynomial(a);
}

cplx amplification_numerical_2d(SchemeId scheme, const SpectralParams2D& p) {
    const double y = p.ncx * k1_eq(scheme, p.kxhx) + p.ncy * k1_eq(scheme, p.kyhy) -
                     p.dax * k3_eq_cubed(scheme, p.kxhx) - p.day * k3_eq_cubed(scheme, p.kyhy);
    return rk3_polynomial({0.0, y});
}

double unwrap_phase(double previous, double candidate) {
    const double turns = std::round((previous - candidate) / (2.0 * kPi));
    return candidate + 2.0 * kPi * turns;
}

double phase_shift_1d(SchemeId scheme, const SpectralParams1D& p, PhaseBranch branch) {
    check_kh(scheme, p.kh);
    if (branch == PhaseBranch::principal) {
        return principal_phase(amplification_numerical_1d(scheme, p));
    }
    const std::size_t steps = sweep_steps(p.kh);
    double beta = 0.0;
    for (std::size_t s = 1; s <= steps; ++s) {
        const double kh = p.kh * static_cast<double>(s) / static_cast<double>(steps);
        beta = unwrap_phase(beta, raw_phase(amplification_numerical_1d(scheme, {p.nc, p.dalpha, kh})));
    }
    return beta;
}

double phase_shift_derivative_1d(SchemeId scheme, const SpectralParams1D& p) {
    check_kh(scheme, p.kh);
    const Symbol s = symbol(scheme, p.kh);
    const cplx a = operator_a(p.nc, p.dalpha, s);
    const cplx da{0.0, p.nc * s.dk1 - p.dalpha * s.dk3};
    return beta_derivative(a, da);
}

double phase_shift_derivative_2d(SchemeId scheme, const SpectralParams2D& p, Axis axis) {
    check_kh(scheme, p.kxhx);
    check_kh(scheme, p.kyhy);
    const Symbol sx = symbol(scheme, p.kxhx);
    const Symbol sy = symbol(scheme, p.kyhy);
    const cplx a{0.0, p.ncx * sx.k1 + p.ncy * sy.k1 - p.dax * sx.k3 - p.day * sy.k3};
    const cplx da = axis == Axis::x ? cplx{0.0, p.ncx * sx.dk1 - p.dax * sx.dk3}
                                    : cplx{0.0, p.ncy * sy.dk1 - p.day * sy.dk3};
    return beta_derivative(a, da);
}

std::optional<double> phase_speed_ratio_1d(SchemeId scheme, const SpectralParams1D& p,
                                           PhaseBranch branch) {
    const double kh = p.kh;
    const double den = kh * p.nc - kh * kh * kh * p.dalpha;
    const double scale = std::max(p.nc, p.dalpha * kh * kh) * kh;
    if (!(std::abs(den) > kSingularTolerance * scale)) return std::nullopt;
    return phase_shift_1d(scheme, p, branch) / den;
}

std::optional<double> group_velocity_ratio_1d(SchemeId scheme, const SpectralParams1D& p) {
    const double den = p.nc - 3.0 * p.dalpha * p.kh * p.kh;
    return masked_ratio(phase_shift_derivative_1d(scheme, p), den, 1.0);
}

double phase_shift_2d(SchemeId scheme, const SpectralParams2D& p, PhaseBranch branch) {
    check_kh(scheme, p.kxhx);
    check_kh(scheme, p.kyhy);
    if (branch == PhaseBranch::principal) {
        return principal_phase(amplification_numerical_2d(scheme, p));
    }
    double beta = 0.0;
    SpectralParams2D q = p;
    q.kxhx = 0.0;
    const std::size_t ny = sweep_steps(p.kyhy);
    for (std::size_t s = 1; s <= ny; ++s) {
        q.kyhy = p.kyhy * static_cast<double>(s) / static_cast<double>(ny);
        beta = unwrap_phase(beta, raw_phase(amplification_numerical_2d(scheme, q)));
    }
    q.kyhy = p.kyhy;
    const std::size_t nx = sweep_steps(p.kxhx);
    for (std::size_t s = 1; s <= nx; ++s) {
        q.kxhx = p.kxhx * static_cast<double>(s) / static_cast<double>(nx);
        beta = unwrap_phase(beta, raw_phase(amplification_numerical_2d(scheme, q)));
    }
    return beta;
}

std::optional<double> phase_speed_ratio_2d(SchemeId scheme, const SpectralParams2D& p,
                                           PhaseBranch branch, Normalization norm) {
    const AxisNumbers d = denominators(p, norm);
    const double kx = p.kxhx, ky = p.kyhy;
    const double conv = d.cx * kx + d.cy * ky;
    const double disp = d.dx * kx * kx * kx + d.dy * ky * ky * ky;
    const double scale = std::abs(d.cx) * kx + std::abs(d.cy) * ky +
                         std::abs(d.dx) * kx * kx * kx + std::abs(d.dy) * ky * ky * ky;
    if (!(std::abs(conv - disp) > kSingularTolerance * scale)) return std::nullopt;
    return phase_shift_2d(scheme, p, branch) / (conv - disp);
}

std::optional<double> group_velocity_ratio_2d(SchemeId scheme, const SpectralParams2D& p,
                                              Axis axis, Normalization norm) {
    const AxisNumbers d = denominators(p, norm);
    const double den = axis == Axis::x ? d.cx - 3.0 * d.dx * p.kxhx * p.kxhx
                                       : d.cy - 3.0 * d.dy * p.kyhy * p.kyhy;
    return masked_ratio(phase_shift_derivative_2d(scheme, p, axis), den, 1.0);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) throw DomainError("grid must have at least one point");
    std::vector<double> v(n, lo);
    if (n == 1) return v;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v.back() = hi;
    return v;
}

PropertyMap compute_map_1d(SchemeId scheme, const Map1DOptions& opt) {
    if (!(opt.nc_max >= 0.0) || !(opt.dalpha >= 0.0)) {
        throw DomainError("Courant and dispersion numbers must be non-negative");
    }
    const double kh_max = resolve_kh_max(scheme, opt.kh_max);
    PropertyMap m;
    m.kind = PropertyMap::Kind::map1d;
    m.scheme = scheme;
    m.dalpha = opt.dalpha;
    m.branch = opt.branch;
    m.axis1 = linspace(0.0, opt.nc_max, opt.grid);
    m.axis2 = linspace(0.0, kh_max, opt.grid);
    const std::size_t n1 = m.axis1.size(), n2 = m.axis2.size();
    m.gmag.assign(n1 * n2, 0.0);
    m.phase_ratio.assign(n1 * n2, kNaN);
    m.vgx_ratio.assign(n1 * n2, kNaN);
    m.singular.assign(n1 * n2, 0);

    std::vector<Symbol> sym(n2);
    for (std::size_t j = 0; j < n2; ++j) sym[j] = symbol(scheme, m.axis2[j]);
    const double dalpha = opt.dalpha;

    parallel_for(n1, [&](std::size_t i) {
        const double nc = m.axis1[i];
        double beta = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t c = m.index(i, j);
            const double kh = m.axis2[j];
            const cplx a = operator_a(nc, dalpha, sym[j]);
            const cplx g = rk3_polynomial(a);
            m.gmag[c] = std::abs(g);
            beta = opt.branch == PhaseBranch::principal ? principal_phase(g)
                                                        : unwrap_phase(beta, raw_phase(g));
            const double den = kh * nc - kh * kh * kh * dalpha;
            const auto pr = masked_ratio(beta, den, std::max(nc, dalpha * kh * kh) * kh);
            const cplx da{0.0, nc * sym[j].dk1 - dalpha * sym[j].dk3};
            const auto vg = masked_ratio(beta_derivative(a, da), nc - 3.0 * dalpha * kh * kh, 1.0);
            if (pr) m.phase_ratio[c] = *pr;
            if (vg) m.vgx_ratio[c] = *vg;
            m.singular[c] = (!pr || !vg) ? 1 : 0;
        }
    });
    return m;
}

PropertyMap compute_map_2d(SchemeId scheme, const Map2DOptions& opt) {
    if (!(opt.nc >= 0.0) || !(opt.dalpha >= 0.0)) {
        throw DomainError("Courant and dispersion numbers must be non-negative");
    }
    const double kh_max = resolve_kh_max(scheme, opt.kh_max);
    PropertyMap m;
    m.kind = PropertyMap::Kind::map2d;
    m.scheme = scheme;
    m.nc = opt.nc;
    m.dalpha = opt.dalpha;
    m.ar = opt.ar;
    m.theta = opt.theta;
    m.branch = opt.branch;
    m.normalization = opt.normalization;
    m.axis1 = linspace(0.0, kh_max, opt.grid);
    m.axis2 = m.axis1;
    const std::size_t n1 = m.axis1.size(), n2 = m.axis2.size();
    m.gmag.assign(n1 * n2, 0.0);
    m.phase_ratio.assign(n1 * n2, kNaN);
    m.vgx_ratio.assign(n1 * n2, kNaN);
    m.vgy_ratio.assign(n1 * n2, kNaN);
    m.singular.assign(n1 * n2, 0);

    const SpectralParams2D base =
        SpectralParams2D::from_angle(opt.nc, opt.dalpha, 0.0, 0.0, opt.ar, opt.theta);
    const AxisNumbers d = denominators(base, opt.normalization);
    std::vector<Symbol> sym(n1);
    for (std::size_t j = 0; j < n1; ++j) sym[j] = symbol(scheme, m.axis1[j]);

    // Raw phases in parallel; the branch is fixed afterwards in one sequential pass.
    std::vector<double> raw(n1 * n2);
    parallel_for(n1, [&](std::size_t i) {
        const Symbol& sx = sym[i];
        for (std::size_t j = 0; j < n2; ++j) {
            const Symbol& sy = sym[j];
            const std::size_t c = m.index(i, j);
            const cplx a{0.0, base.ncx * sx.k1 + base.ncy * sy.k1 - base.dax * sx.k3 -
                                  base.day * sy.k3};
            const cplx g = rk3_polynomial(a);
            m.gmag[c] = std::abs(g);
            raw[c] = opt.branch == PhaseBranch::principal ? principal_phase(g) : raw_phase(g);
            const double kx = m.axis1[i], ky = m.axis2[j];
            const cplx dax{0.0, base.ncx * sx.dk1 - base.dax * sx.dk3};
            const cplx day{0.0, base.ncy * sy.dk1 - base.day * sy.dk3};
            const auto vx = masked_ratio(beta_derivative(a, dax), d.cx - 3.0 * d.dx * kx * kx, 1.0);
            const auto vy = masked_ratio(beta_derivative(a, day), d.cy - 3.0 * d.dy * ky * ky, 1.0);
            if (vx) m.vgx_ratio[c] = *vx;
            if (vy) m.vgy_ratio[c] = *vy;
            m.singular[c] = (!vx || !vy) ? 1 : 0;
        }
    });

    if (opt.branch == PhaseBranch::continuous) {
        raw[m.index(0, 0)] = unwrap_phase(0.0, raw[m.index(0, 0)]);
        for (std::size_t j = 1; j < n2; ++j) {
            raw[m.index(0, j)] = unwrap_phase(raw[m.index(0, j - 1)], raw[m.index(0, j)]);
        }
        for (std::size_t i = 1; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                raw[m.index(i, j)] = unwrap_phase(raw[m.index(i - 1, j)], raw[m.index(i, j)]);
            }
        }
    }

    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t c = m.index(i, j);
            const double kx = m.axis1[i], ky = m.axis2[j];
            const double den = (d.cx * kx + d.cy * ky) - (d.dx * kx * kx * kx + d.dy * ky * ky * ky);
            const double scale = std::abs(d.cx) * kx + std::abs(d.cy) * ky +
                                 std::abs(d.dx) * kx * kx * kx + std::abs(d.dy) * ky * ky * ky;
            const auto pr = masked_ratio(raw[c], den, scale);
            if (pr) {
                m.phase_ratio[c] = *pr;
            } else {
                m.singular[c] = 1;
            }
        }
    }
    return m;
}

StabilityReport stability_scan(SchemeId scheme, double dalpha, double nc_max, double kh_max,
                               std::size_t grid) {
    kh_max = resolve_kh_max(scheme, kh_max);
    if (grid < 2) throw DomainError("stability scan needs at least a 2 x 2 grid");
    StabilityReport r;
    r.nc = linspace(0.0, nc_max, grid);
    const std::vector<double> kh = linspace(0.0, kh_max, grid);
    std::vector<double> k1(grid), k3(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        k1[j] = first_fraction(scheme, kh[j]).value();
        k3[j] = third_fraction(scheme, kh[j]).value();
    }
    r.max_stable_kh.assign(grid, kh_max);
    std::vector<double> row_max(grid, 0.0);
    std::vector<std::size_t> first_bad(grid, grid);
    parallel_for(grid, [&](std::size_t i) {
        const double nc = r.nc[i];
        for (std::size_t j = 0; j < grid; ++j) {
            const double g = std::abs(rk3_polynomial({0.0, nc * k1[j] - dalpha * k3[j]}));
            row_max[i] = std::max(row_max[i], g);
            if (g > 1.0 + kStabilityTolerance && first_bad[i] == grid) first_bad[i] = j;
        }
    });
    r.max_stable_nc = -1.0;
    bool prefix_stable = true;
    std::size_t min_bad = grid;
    for (std::size_t i = 0; i < grid; ++i) {
        r.max_gmag = std::max(r.max_gmag, row_max[i]);
        if (first_bad[i] < grid) {
            r.stable = false;
            prefix_stable = false;
            r.max_stable_kh[i] = first_bad[i] == 0 ? -1.0 : kh[first_bad[i] - 1];
            min_bad = std::min(min_bad, first_bad[i]);
        } else if (prefix_stable) {
            r.max_stable_nc = r.nc[i];
        }
    }
    r.min_unstable_kh = min_bad < grid ? kh[min_bad] : kNaN;
    return r;
}

double round_up_two_digits(double x) {
    if (!(x > 0.0)) return x;
    const int e = static_cast<int>(std::floor(std::log10(x)));
    const double inv = std::pow(10.0, 1 - e);
    const double m = x * inv;
    double up = std::ceil(m - 1e-9 * m);
    if (up < 10.0) up = 10.0;
    return up / inv;
}

double default_critical_nc_max(SchemeId scheme) { return scheme.cell_centered() ? 0.4 : 0.8; }

CriticalDalpha find_critical_dalpha(SchemeId scheme, double nc_max, double kh_max,
                                    std::size_t grid) {
    kh_max = resolve_kh_max(scheme, kh_max);
    if (!(nc_max >= 0.0)) throw DomainError("nc-max must be non-negative");
    auto unstable = [&](double dalpha) {
        return !stability_scan(scheme, dalpha, nc_max, kh_max, grid).stable;
    };
    if (unstable(0.0)) {
        throw DomainError("the scan is unstable even without dispersion; lower nc-max below the "
                          "convective stability limit of " + scheme.name());
    }
    double lo = 0.0;
    double hi = 1e-3;
    while (!unstable(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) throw DomainError("no critical dispersion number below 1e3");
    }
    CriticalDalpha out;
    out.resolution = 1e-4 * hi;
    while (hi - lo > out.resolution) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
    }
    out.threshold = hi;
    out.dalpha_cr = round_up_two_digits(hi);
    out.grid = grid;
    out.nc_max = nc_max;
    out.kh_max = kh_max;
    return out;
}

}  // namespace displab
