#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>

#include "displab/error.hpp"
#include "displab/gsa.hpp"
#include "oracles.hpp"

using namespace displab;

namespace {

constexpr double kPi = std::numbers::pi;

oracle::Coeff first_of(SchemeId s) {
    if (s == Schemes::cncs6) return oracle::cncs6_first();
    if (s == Schemes::cncs8) return oracle::cncs8_first();
    return oracle::ccs8_first();
}

oracle::Coeff third_of(SchemeId s) {
    if (s == Schemes::cncs6) return oracle::cncs6_third();
    if (s == Schemes::cncs8) return oracle::cncs8_third();
    return oracle::ccs8_third();
}

double k1_ref(SchemeId s, double kh) {
    return s.cell_centered() ? oracle::k1h_cell(first_of(s), kh) : oracle::k1h_node(first_of(s), kh);
}

double k3_ref(SchemeId s, double kh) {
    return s.cell_centered() ? oracle::k3h_cell(third_of(s), kh) : oracle::k3h_node(third_of(s), kh);
}

// G written out term by term from A = i (nc k1 - dalpha k3).
std::complex<double> g_ref(SchemeId s, double nc, double da, double kh) {
    const std::complex<double> a(0.0, nc * k1_ref(s, kh) - da * k3_ref(s, kh));
    return 1.0 - a + a * a / 2.0 - a * a * a / 6.0;
}

struct ThreadsGuard {
    explicit ThreadsGuard(const char* value) { setenv("DISPLAB_THREADS", value, 1); }
    ~ThreadsGuard() { unsetenv("DISPLAB_THREADS"); }
};

}  // namespace

TEST_CASE("equivalent wavenumbers follow the closed forms") {
    for (SchemeId s : Schemes::all) {
        for (double kh : linspace(0.0, s.kh_max(), 97)) {
            CHECK(k1_eq(s, kh) == doctest::Approx(k1_ref(s, kh)).epsilon(1e-13).scale(1.0));
            CHECK(k3_eq_cubed(s, kh) == doctest::Approx(k3_ref(s, kh)).epsilon(1e-13).scale(1.0));
        }
        CHECK_THROWS_AS(k1_eq(s, -0.1), DomainError);
        CHECK_THROWS_AS(k3_eq_cubed(s, s.kh_max() + 0.1), DomainError);
    }
    CHECK(k1_eq(Schemes::cncs6, kPi / 2) == doctest::Approx(14.0 / 9).epsilon(1e-15));
    // At the Nyquist limit a node-centered first derivative sees nothing.
    CHECK(std::abs(k1_eq(Schemes::cncs8, kPi)) < 1e-14);
    CHECK(std::abs(k1_eq(Schemes::ccs8, 2 * kPi)) < 1e-14);
}

TEST_CASE("wavenumber derivatives agree with central differences") {
    const double step = 1e-5;
    for (SchemeId s : Schemes::all) {
        for (double kh : linspace(0.2, s.kh_max() - 0.2, 23)) {
            const double fd1 = (k1_eq(s, kh + step) - k1_eq(s, kh - step)) / (2 * step);
            const double fd3 = (k3_eq_cubed(s, kh + step) - k3_eq_cubed(s, kh - step)) / (2 * step);
            CHECK(k1_eq_derivative(s, kh) == doctest::Approx(fd1).epsilon(1e-7).scale(1.0));
            CHECK(k3_eq_cubed_derivative(s, kh) == doctest::Approx(fd3).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("equivalent wavenumbers approach kh at the design order") {
    for (SchemeId s : Schemes::all) {
        const double order = s.order();
        const double a = 0.3, b = 0.6;
        const double e1a = std::abs(k1_ref(s, a) / a - 1), e1b = std::abs(k1_ref(s, b) / b - 1);
        const double e3a = std::abs(k3_ref(s, a) / (a * a * a) - 1), e3b = std::abs(k3_ref(s, b) / (b * b * b) - 1);
        CHECK(std::log(e1b / e1a) / std::log(b / a) >= order - 0.5);
        CHECK(std::log(e3b / e3a) / std::log(b / a) >= order - 0.5);
        CHECK(std::abs(k1_eq(s, a) - k1_ref(s, a)) <= 1e-15);
    }
}

TEST_CASE("first-derivative resolution improves from CNCS6 to CNCS8 to CCS8") {
    const double kh = 2.0;
    auto gap1 = [&](SchemeId s) { return std::abs(k1_eq(s, kh) / kh - 1); };
    CHECK(gap1(Schemes::ccs8) < gap1(Schemes::cncs8));
    CHECK(gap1(Schemes::cncs8) < gap1(Schemes::cncs6));
}

TEST_CASE("physical amplification is a pure rotation") {
    for (double nc : {0.0, 0.3, 1.7}) {
        for (double da : {0.0, 0.05, 0.12}) {
            for (double kh : {0.0, 0.4, 2.0, 3.1}) {
                CHECK(std::abs(std::abs(amplification_physical_1d({nc, da, kh})) - 1.0) <= 1e-15);
            }
        }
    }
}

TEST_CASE("numerical amplification matches the RK3 polynomial of the stencil symbol") {
    CHECK(amplification_numerical_1d(Schemes::cncs6, {0.0, 0.0, 1.3}) == cplx(1.0, 0.0));
    for (SchemeId s : Schemes::all) {
        for (double kh : linspace(0.0, s.kh_max(), 31)) {
            const auto g = amplification_numerical_1d(s, {0.7, 0.09, kh});
            CHECK(std::abs(g - g_ref(s, 0.7, 0.09, kh)) <= 1e-13);
        }
    }
    const cplx a(0.0, 0.3);
    CHECK(std::abs(rk3_polynomial(a) - (1.0 - a + a * a / 2.0 - a * a * a / 6.0)) <= 1e-16);
}

TEST_CASE("RK3 polynomial agrees with exp(-A) to fourth order") {
    std::vector<double> sizes, errs;
    for (double r : {0.02, 0.04, 0.08}) {
        const cplx a(0.0, r);
        sizes.push_back(r);
        errs.push_back(std::abs(rk3_polynomial(a) - std::exp(-a)));
    }
    CHECK(oracle::loglog_slope(sizes, errs) == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("2D factor reduces to the 1D polynomial at twice the symbol") {
    for (SchemeId s : Schemes::all) {
        for (double kh : {0.3, 1.1, 2.9}) {
            SpectralParams2D p;
            p.ncx = p.ncy = 0.4;
            p.dax = p.day = 0.07;
            p.kxhx = p.kyhy = kh;
            const cplx a1(0.0, 0.4 * k1_ref(s, kh) - 0.07 * k3_ref(s, kh));
            CHECK(std::abs(amplification_numerical_2d(s, p) - rk3_polynomial(2.0 * a1)) <= 1e-14);
        }
        SpectralParams2D zero;
        zero.ncx = zero.ncy = zero.dax = zero.day = 0.0;
        CHECK(amplification_numerical_2d(s, zero) == cplx(1.0, 0.0));
    }
}

TEST_CASE("angle split of the Courant and dispersion numbers") {
    const auto p = SpectralParams2D::from_angle(0.9, 0.11, 1.0, 2.0, 2.0, 30.0);
    CHECK(p.ncx == doctest::Approx(0.9 * std::cos(kPi / 6)));
    CHECK(p.ncy == doctest::Approx(0.9 * 0.5 / 2.0));
    CHECK(p.dax == doctest::Approx(0.11));
    CHECK(p.day == doctest::Approx(0.11 / 8.0));
    CHECK_THROWS_AS(SpectralParams2D::from_angle(0.9, 0.11, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("phase shift branches") {
    CHECK(phase_shift_1d(Schemes::cncs6, {0.5, 0.1, 0.0}) == 0.0);
    CHECK(unwrap_phase(3.0, -3.1) == doctest::Approx(-3.1 + 2 * kPi));
    CHECK(unwrap_phase(-3.0, 3.1) == doctest::Approx(3.1 - 2 * kPi));
    CHECK(unwrap_phase(0.2, 0.25) == 0.25);
    // Large dispersion drives beta past pi; the continuous branch keeps going
    // while the principal value folds back into (-pi/2, pi/2).
    const SpectralParams1D p{0.0, 0.5, 2.5};
    const double cont = phase_shift_1d(Schemes::cncs6, p);
    const double prin = phase_shift_1d(Schemes::cncs6, p, PhaseBranch::principal);
    CHECK(std::abs(prin) < kPi / 2);
    CHECK(std::abs(cont) > kPi / 2);
    const double folded = std::remainder(cont - prin, kPi);
    CHECK(std::abs(folded) <= 1e-9);
    // Small Courant number: beta -> Nc k1.
    for (SchemeId s : Schemes::all) {
        const double kh = 1.0, nc = 1e-4;
        CHECK(phase_shift_1d(s, {nc, 0.0, kh}) == doctest::Approx(nc * k1_ref(s, kh)).epsilon(1e-7));
    }
}

TEST_CASE("phase-shift derivative agrees with central differences") {
    const double step = 1e-5;
    for (SchemeId s : Schemes::all) {
        for (double kh : linspace(0.3, s.kh_max() - 0.3, 17)) {
            const double nc = 0.6, da = s.cell_centered() ? 0.01 : 0.1;
            const double fd = (phase_shift_1d(s, {nc, da, kh + step}) - phase_shift_1d(s, {nc, da, kh - step})) /
                              (2 * step);
            const double an = phase_shift_derivative_1d(s, {nc, da, kh});
            CHECK(an == doctest::Approx(fd).epsilon(1e-6).scale(1e-3));
        }
        for (double kx : {0.4, 1.3, 2.2}) {
            for (double ky : {0.5, 1.7}) {
                auto p = SpectralParams2D::from_angle(0.5, s.cell_centered() ? 0.01 : 0.1, kx, ky, 1.5, 35.0);
                auto at = [&](double dx, double dy) {
                    auto q = p;
                    q.kxhx += dx;
                    q.kyhy += dy;
                    return phase_shift_2d(s, q);
                };
                const double fdx = (at(step, 0) - at(-step, 0)) / (2 * step);
                const double fdy = (at(0, step) - at(0, -step)) / (2 * step);
                CHECK(phase_shift_derivative_2d(s, p, Axis::x) == doctest::Approx(fdx).epsilon(1e-6).scale(1e-3));
                CHECK(phase_shift_derivative_2d(s, p, Axis::y) == doctest::Approx(fdy).epsilon(1e-6).scale(1e-3));
            }
        }
    }
}

TEST_CASE("ratios tend to one in the continuum limit") {
    for (SchemeId s : Schemes::all) {
        const SpectralParams1D p{0.01, 0.001, 1e-3};
        CHECK(*phase_speed_ratio_1d(s, p) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(*group_velocity_ratio_1d(s, p) == doctest::Approx(1.0).epsilon(1e-6));
        const auto q = SpectralParams2D::from_angle(0.01, 0.001, 1e-3, 1e-3, 1.0, 45.0);
        CHECK(*phase_speed_ratio_2d(s, q) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(*group_velocity_ratio_2d(s, q, Axis::x) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(*group_velocity_ratio_2d(s, q, Axis::y) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("singular denominators are masked") {
    const SchemeId s = Schemes::cncs6;
    CHECK_FALSE(phase_speed_ratio_1d(s, {0.5, 0.1, 0.0}).has_value());
    // kh nc = kh^3 dalpha at kh = sqrt(nc / dalpha) = 1.
    CHECK_FALSE(phase_speed_ratio_1d(s, {0.12, 0.12, 1.0}).has_value());
    CHECK(phase_speed_ratio_1d(s, {0.12, 0.12, 1.01}).has_value());
    // nc = 3 dalpha kh^2 at kh = 1.
    CHECK_FALSE(group_velocity_ratio_1d(s, {0.36, 0.12, 1.0}).has_value());
    CHECK(group_velocity_ratio_1d(s, {0.36, 0.12, 1.01}).has_value());
    SpectralParams2D p;
    p.ncx = 0.3;
    p.ncy = 0.36;
    p.dax = p.day = 0.12;
    p.kxhx = 0.5;
    p.kyhy = 1.0;
    CHECK_FALSE(group_velocity_ratio_2d(s, p, Axis::y).has_value());
    CHECK(group_velocity_ratio_2d(s, p, Axis::x).has_value());
}

TEST_CASE("q-wave regions of CNCS6 grow with the dispersion number") {
    auto count = [](double da, auto pred) {
        Map1DOptions o;
        o.dalpha = da;
        o.grid = 201;
        const auto m = compute_map_1d(Schemes::cncs6, o);
        int n = 0;
        for (std::size_t i = 0; i < m.axis1.size(); ++i) {
            for (std::size_t j = 0; j < m.axis2.size(); ++j) {
                n += pred(m, i, j) ? 1 : 0;
            }
        }
        return n;
    };
    auto neg_phase_arc = [](const PropertyMap& m, std::size_t i, std::size_t j) {
        const auto c = m.index(i, j);
        return m.axis2[j] > 2.4 && m.axis2[j] < 2.9 && !m.singular[c] && m.phase_ratio[c] < 0;
    };
    auto neg_vg_low = [](const PropertyMap& m, std::size_t i, std::size_t j) {
        const auto c = m.index(i, j);
        return m.axis1[i] >= 0.1 && m.axis1[i] <= 0.2 && !std::isnan(m.vgx_ratio[c]) && m.vgx_ratio[c] < 0;
    };
    const int arc11 = count(0.11, neg_phase_arc), arc12 = count(0.12, neg_phase_arc);
    CHECK(arc11 > 0);
    CHECK(arc12 > arc11);
    CHECK(count(0.12, neg_vg_low) > count(0.11, neg_vg_low));
}

TEST_CASE("stability scans") {
    for (SchemeId s : Schemes::all) {
        const auto r = stability_scan(s, 0.0, 0.1, 0.0, 41);
        CHECK(r.stable);
        CHECK(r.max_gmag <= 1.0 + kStabilityTolerance);
        CHECK(std::isnan(r.min_unstable_kh));
    }
    const auto r11 = stability_scan(Schemes::cncs6, 0.11, 1.3, 0.0, 201);
    CHECK(r11.stable);
    const auto r12 = stability_scan(Schemes::cncs6, 0.12, 1.38, 0.0, 201);
    CHECK_FALSE(r12.stable);
    CHECK(r12.min_unstable_kh > 2.4);
    CHECK(r12.min_unstable_kh < 2.6);
    REQUIRE(r12.nc.size() == 201);
    REQUIRE(r12.max_stable_kh.size() == 201);
    // The unstable pocket sits at small Nc; direct evaluation at Nc = 0.
    double worst = 0, first = -1;
    for (double kh : linspace(0.0, kPi, 2001)) {
        const double g = std::abs(g_ref(Schemes::cncs6, 0.0, 0.12, kh));
        worst = std::max(worst, g);
        if (g > 1.0 + kStabilityTolerance && first < 0) first = kh;
    }
    CHECK(worst > 1.05);
    CHECK(first == doctest::Approx(2.51).epsilon(0.01));
    CHECK(r12.max_stable_kh[0] < first);
    CHECK_THROWS_AS(stability_scan(Schemes::cncs6, 0.1, 1.0, 4.0, 11), DomainError);
}

TEST_CASE("critical dispersion number rounding") {
    CHECK(round_up_two_digits(0.111453) == doctest::Approx(0.12));
    CHECK(round_up_two_digits(0.114062) == doctest::Approx(0.12));
    CHECK(round_up_two_digits(0.0117607) == doctest::Approx(0.012));
    CHECK(round_up_two_digits(0.12) == doctest::Approx(0.12));
    CHECK(round_up_two_digits(0.1101) == doctest::Approx(0.12));
    CHECK(round_up_two_digits(1.0) == doctest::Approx(1.0));
    CHECK(round_up_two_digits(0.995) == doctest::Approx(1.0));
    const auto c = find_critical_dalpha(Schemes::cncs6, default_critical_nc_max(Schemes::cncs6), 0.0, 101);
    CHECK(c.threshold > 0.1);
    CHECK(c.threshold < 0.13);
    CHECK(c.dalpha_cr >= c.threshold);
    CHECK_FALSE(stability_scan(Schemes::cncs6, c.threshold + 2 * c.resolution, c.nc_max, 0.0, 101).stable);
    CHECK(stability_scan(Schemes::cncs6, c.threshold - 2 * c.resolution, c.nc_max, 0.0, 101).stable);
}

TEST_CASE("map layout and axes") {
    Map1DOptions o;
    o.dalpha = 0.1;
    o.nc_max = 1.0;
    o.grid = 5;
    const auto m = compute_map_1d(Schemes::cncs8, o);
    CHECK(m.axis1 == linspace(0.0, 1.0, 5));
    CHECK(m.axis2 == linspace(0.0, kPi, 5));
    CHECK(m.cells() == 25);
    CHECK(m.vgy_ratio.empty());
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            const auto c = m.index(i, j);
            const SpectralParams1D p{m.axis1[i], 0.1, m.axis2[j]};
            CHECK(m.gmag[c] == doctest::Approx(std::abs(amplification_numerical_1d(Schemes::cncs8, p))));
            const auto ratio = group_velocity_ratio_1d(Schemes::cncs8, p);
            if (ratio) CHECK(m.vgx_ratio[c] == doctest::Approx(*ratio));
        }
    }
    CHECK(m.singular[m.index(2, 0)]);  // kh = 0
}

TEST_CASE("maps do not depend on the thread count") {
    Map2DOptions o;
    o.nc = 0.9;
    o.dalpha = 0.11;
    o.grid = 61;
    Map1DOptions o1;
    o1.dalpha = 0.12;
    o1.grid = 61;
    PropertyMap a, b, a1, b1;
    {
        ThreadsGuard g("1");
        a = compute_map_2d(Schemes::cncs6, o);
        a1 = compute_map_1d(Schemes::ccs8, o1);
    }
    {
        ThreadsGuard g("7");
        b = compute_map_2d(Schemes::cncs6, o);
        b1 = compute_map_1d(Schemes::ccs8, o1);
    }
    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] == y[i] || (std::isnan(x[i]) && std::isnan(y[i])))) return false;
        }
        return true;
    };
    CHECK(same(a.gmag, b.gmag));
    CHECK(same(a.phase_ratio, b.phase_ratio));
    CHECK(same(a.vgx_ratio, b.vgx_ratio));
    CHECK(same(a.vgy_ratio, b.vgy_ratio));
    CHECK(a.singular == b.singular);
    CHECK(same(a1.phase_ratio, b1.phase_ratio));
    CHECK(same(a1.vgx_ratio, b1.vgx_ratio));
}

TEST_CASE("2D panel features") {
    Map2DOptions o;
    o.nc = 0.9;
    o.dalpha = 0.11;
    o.grid = 101;
    const auto m = compute_map_2d(Schemes::cncs6, o);
    const double top = *std::max_element(m.gmag.begin(), m.gmag.end());
    CHECK(top <= 1.0 + kStabilityTolerance);
    CHECK(m.gmag[m.index(0, 0)] == 1.0);
    // Symmetric angle and unit aspect ratio make the map symmetric.
    for (std::size_t i = 0; i < 101; i += 10) {
        for (std::size_t j = 0; j < 101; j += 10) {
            CHECK(m.gmag[m.index(i, j)] == doctest::Approx(m.gmag[m.index(j, i)]).epsilon(1e-14));
        }
    }
}
