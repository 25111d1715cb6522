#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "displab/error.hpp"
#include "displab/gsa.hpp"
#include "displab/problems.hpp"
#include "displab/solver.hpp"
#include "displab/time_integration.hpp"
#include "oracles.hpp"

using namespace displab;

namespace {

constexpr double kPi = std::numbers::pi;

RhsFunction scalar(double lambda) {
    return [lambda](std::span<const double> u, std::span<double> out) {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * u[i];
    };
}

// Amplitude of the e^{ikx} component of samples taken at x_s.
std::complex<double> project(const SolutionField& f, double k) {
    std::complex<double> acc = 0;
    for (std::size_t s = 0; s < f.values.size(); ++s) {
        acc += f.values[s] * std::exp(std::complex<double>(0.0, -k * f.x_at(s)));
    }
    return acc / static_cast<double>(f.values.size());
}

}  // namespace

TEST_CASE("a zero right-hand side leaves the state unchanged") {
    std::vector<double> u = {1.0, -2.0, 3.5, 0.0};
    const auto before = u;
    Ssprk3Stepper stepper(u.size());
    stepper.step(u, 0.3, [](std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
    });
    CHECK(u == before);
}

TEST_CASE("scalar decay multiplies by the RK3 polynomial") {
    std::vector<double> u = {1.0};
    ssprk3_step(u, 0.1, scalar(-1.0)).swap(u);
    const double z = -0.1;
    CHECK(std::abs(u[0] - (1 + z + z * z / 2 + z * z * z / 6)) <= 1e-15);
    CHECK(std::abs(u[0] - 0.9048333333333333) <= 1e-15);
}

TEST_CASE("one step on a linear system equals the cubic matrix polynomial") {
    std::mt19937_64 rng(3);
    const std::size_t n = 16;
    oracle::Mat l = oracle::zeros(n, n);
    for (auto& row : l) row = oracle::random_vector(n, rng);
    const auto u0 = oracle::random_vector(n, rng);
    const double dt = 0.07;
    const auto rhs = [&](std::span<const double> u, std::span<double> out) {
        const auto y = oracle::matvec(l, {u.begin(), u.end()});
        std::copy(y.begin(), y.end(), out.begin());
    };
    const auto got = ssprk3_step(u0, dt, rhs);
    // (I + dt L + (dt L)^2 / 2 + (dt L)^3 / 6) u0 with explicit powers.
    oracle::Mat a = l;
    for (auto& row : a) {
        for (double& v : row) v *= dt;
    }
    const auto a2 = oracle::matmul(a, a);
    const auto a3 = oracle::matmul(a2, a);
    const auto t1 = oracle::matvec(a, u0), t2 = oracle::matvec(a2, u0), t3 = oracle::matvec(a3, u0);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(got[i] - (u0[i] + t1[i] + t2[i] / 2 + t3[i] / 6)) <= 1e-13);
    }
}

TEST_CASE("stage failures are reported and the state is kept") {
    for (int bad = 1; bad <= 3; ++bad) {
        int calls = 0;
        std::vector<double> u = {1.0, 2.0};
        const auto before = u;
        Ssprk3Stepper stepper(2);
        const auto rhs = [&](std::span<const double> v, std::span<double> out) {
            ++calls;
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = calls == bad ? NAN : -v[i];
        };
        try {
            stepper.step(u, 0.1, rhs);
            FAIL("expected divergence");
        } catch (const DivergenceError& e) {
            CHECK(e.stage() == bad);
        }
        CHECK(u == before);
    }
    // Overflow to infinity counts as divergence too.
    std::vector<double> u = {1e300};
    CHECK_THROWS_AS(ssprk3_step(u, 1.0, scalar(1e10)), DivergenceError);
}

TEST_CASE("time-step rules") {
    CHECK(compute_timestep_1d(0.11, 1.0, 1.0, 0.0) == doctest::Approx(0.11));
    const double h = 2 * kPi / 100;
    const double dt = compute_timestep_1d(0.11, h, 2.0, 1.0);
    CHECK(dt == doctest::Approx(0.11 / (2 / h + 1 / (h * h * h))).epsilon(1e-15));
    CHECK(dt == doctest::Approx(2.707e-5).epsilon(1e-3));
    CHECK(compute_timestep_1d(0.1, 2 * h, 0.0, 1.0) == doctest::Approx(8 * compute_timestep_1d(0.1, h, 0.0, 1.0)));
    CHECK_THROWS_AS(compute_timestep_1d(0.1, h, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(compute_timestep_1d(0.1, 0.0, 1.0, 1.0), DomainError);

    CHECK(compute_timestep_2d(0.11, h, h, 2.0, 2.0, 1.0, 1.0) == doctest::Approx(dt / 2));
    CHECK(compute_timestep_2d(0.11, h, h, 2.0, 2.0, 1.0, 1.0) ==
          doctest::Approx(0.11 / (2 * (2 / h) + 2 * (1 / (h * h * h)))));
    CHECK(compute_timestep_2d(0.5, 0.1, 0.2, 1.0, 3.0, 0.0, 0.0) == doctest::Approx(0.5 / (10.0 + 15.0)));
    CHECK_THROWS_AS(compute_timestep_2d(0.1, h, h, 0.0, 0.0, 0.0, 0.0), DomainError);

    CHECK(default_cfl(Schemes::cncs6) == 0.11);
    CHECK(default_cfl(Schemes::cncs8) == 0.11);
    CHECK(default_cfl(Schemes::ccs8) == 0.011);
}

TEST_CASE("global error is third order in the step") {
    const double lambda = -1.3, t_end = 1.0;
    std::vector<double> dts, errs;
    for (int steps : {20, 40, 80}) {
        std::vector<double> u = {1.0};
        Ssprk3Stepper stepper(1);
        const double dt = t_end / steps;
        for (int s = 0; s < steps; ++s) stepper.step(u, dt, scalar(lambda));
        dts.push_back(dt);
        errs.push_back(std::abs(u[0] - std::exp(lambda * t_end)));
    }
    const double slope = oracle::loglog_slope(dts, errs);
    CHECK(slope >= 2.7);
    CHECK(slope <= 3.3);
}

TEST_CASE("one step on a Fourier mode multiplies it by the GSA amplification factor") {
    for (SchemeId s : Schemes::all) {
        for (double k : {1.0, 3.0, 7.0}) {
            const auto problem = builtin("linear-1d", {{"k", "1"}});
            const std::size_t n = 24;
            SemiDiscrete sd(problem, s, n);
            SolutionField f = sd.blank_field();
            for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::sin(k * f.x_at(i));
            const double h = f.hx;
            const double dt = 0.02;
            const auto before = project(f, k);
            Ssprk3Stepper stepper(f.values.size());
            stepper.step(f.values, dt, [&](std::span<const double> u, std::span<double> out) { sd.rhs(u, out); });
            const auto ratio = project(f, k) / before;
            // u_t + 2 u_x + u_xxx = 0: Nc = 2 dt/h, Dalpha = dt/h^3.
            const SpectralParams1D p{2 * dt / h, dt / (h * h * h), k * h};
            const auto g = amplification_numerical_1d(s, p);
            CHECK_MESSAGE(std::abs(ratio - g) <= 1e-12 * std::abs(g), s.name(), " k=", k);
        }
    }
}
