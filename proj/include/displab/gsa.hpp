#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "displab/lattice.hpp"
#include "displab/schemes.hpp"

namespace displab {

using cplx = std::complex<double>;

inline constexpr double kStabilityTolerance = 1e-10;
inline constexpr double kSingularTolerance = 1e-12;

/// k1_eq·h of the first-derivative operator. Throws DomainError outside [0, kh_max].
double k1_eq(SchemeId scheme, double kh);

/// (k2_eq·h)^3 of the third-derivative operator.
double k3_eq_cubed(SchemeId scheme, double kh);

/// d(k1_eq·h)/d(kh).
double k1_eq_derivative(SchemeId scheme, double kh);

/// d(k2_eq·h)^3/d(kh).
double k3_eq_cubed_derivative(SchemeId scheme, double kh);

struct SpectralParams1D {
    double nc = 0.0;
    double dalpha = 0.0;
    double kh = 0.0;
};

/// Per-axis Courant and dispersion numbers of a 2D configuration.
struct SpectralParams2D {
    double ncx = 0.0;
    double ncy = 0.0;
    double dax = 0.0;
    double day = 0.0;
    double kxhx = 0.0;
    double kyhy = 0.0;
    double ar = 1.0;      // h_y / h_x
    double theta = 45.0;  // degrees

    /// Splits a wave speed at angle theta over a cell with aspect ratio ar:
    /// ncx = nc cos(theta), ncy = nc sin(theta)/ar, dax = dalpha, day = dalpha/ar^3.
    static SpectralParams2D from_angle(double nc, double dalpha, double kxhx, double kyhy,
                                       double ar = 1.0, double theta_deg = 45.0);
};

/// How beta_num is recovered from G_num.
///  - continuous: atan2 unwrapped along the sweep, anchored at beta(0) = 0.
///  - principal: single-argument arctan(-Im G / Re G), in (-pi/2, pi/2).
enum class PhaseBranch { continuous, principal };

/// Courant and dispersion numbers used in the physical denominators of the
/// 2D phase-speed and group-velocity ratios.
///  - projected: the per-axis numbers that enter G_num (ncx, ncy, dax, day).
///  - nominal: nc and dalpha scaled only by the aspect ratio
///    (nc, nc/ar, dalpha, dalpha/ar^3), i.e. without the angle split.
enum class Normalization { projected, nominal };

cplx amplification_physical_1d(const SpectralParams1D& p);

/// Third-order Runge-Kutta polynomial 1 - A + A^2/2 - A^3/6.
cplx rk3_polynomial(cplx a);

cplx amplification_numerical_1d(SchemeId scheme, const SpectralParams1D& p);
cplx amplification_numerical_2d(SchemeId scheme, const SpectralParams2D& p);

/// beta_num at p. With PhaseBranch::continuous the phase is followed from
/// kh = 0 up to p.kh on a fine sweep at fixed (nc, dalpha).
double phase_shift_1d(SchemeId scheme, const SpectralParams1D& p,
                      PhaseBranch branch = PhaseBranch::continuous);

/// d beta_num / d(kh) = -Im(G'/G), from the analytic derivative of G_num.
double phase_shift_derivative_1d(SchemeId scheme, const SpectralParams1D& p);

/// Partial derivative of the 2D beta_num along one wavenumber axis.
double phase_shift_derivative_2d(SchemeId scheme, const SpectralParams2D& p, Axis axis);

/// Empty when the physical phase (kh nc - kh^3 dalpha) is singular.
std::optional<double> phase_speed_ratio_1d(SchemeId scheme, const SpectralParams1D& p,
                                           PhaseBranch branch = PhaseBranch::continuous);

std::optional<double> group_velocity_ratio_1d(SchemeId scheme, const SpectralParams1D& p);

/// beta_num of the 2D factor. Continuous branch follows kyhy from 0 at kxhx = 0,
/// then kxhx from 0 at the target kyhy.
double phase_shift_2d(SchemeId scheme, const SpectralParams2D& p,
                      PhaseBranch branch = PhaseBranch::continuous);

std::optional<double> phase_speed_ratio_2d(SchemeId scheme, const SpectralParams2D& p,
                                           PhaseBranch branch = PhaseBranch::continuous,
                                           Normalization norm = Normalization::projected);

std::optional<double> group_velocity_ratio_2d(SchemeId scheme, const SpectralParams2D& p,
                                              Axis axis,
                                              Normalization norm = Normalization::projected);

/// Returns `candidate + 2 pi m` closest to `previous`.
double unwrap_phase(double previous, double candidate);

/// Evenly spaced grid of `n` points on [lo, hi] (n >= 2, or the single point lo).
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// GSA quantities on a rectangular parameter plane. Cell (i, j) pairs
/// axis1[i] with axis2[j] and is stored at index i * axis2.size() + j.
/// Masked ratios are NaN and flagged in `singular`.
struct PropertyMap {
    enum class Kind { map1d, map2d };

    Kind kind = Kind::map1d;
    SchemeId scheme;
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> gmag;
    std::vector<double> phase_ratio;
    std::vector<double> vgx_ratio;  // the only group-velocity ratio in 1D
    std::vector<double> vgy_ratio;  // empty in 1D
    std::vector<std::uint8_t> singular;

    // Fixed parameters.
    double dalpha = 0.0;
    double nc = 0.0;  // 2D only
    double ar = 1.0;
    double theta = 45.0;
    PhaseBranch branch = PhaseBranch::continuous;
    Normalization normalization = Normalization::projected;

    std::size_t index(std::size_t i, std::size_t j) const { return i * axis2.size() + j; }
    std::size_t cells() const { return axis1.size() * axis2.size(); }
};

struct Map1DOptions {
    double dalpha = 0.0;
    double nc_max = 2.0;
    double kh_max = 0.0;  // 0 selects the scheme's Nyquist limit
    std::size_t grid = 401;
    PhaseBranch branch = PhaseBranch::continuous;
};

/// axis1 = Nc in [0, nc_max], axis2 = kh in [0, kh_max].
PropertyMap compute_map_1d(SchemeId scheme, const Map1DOptions& opt);

struct Map2DOptions {
    double nc = 0.0;
    double dalpha = 0.0;
    double ar = 1.0;
    double theta = 45.0;
    double kh_max = 0.0;  // 0 selects the scheme's Nyquist limit
    std::size_t grid = 401;
    PhaseBranch branch = PhaseBranch::continuous;
    Normalization normalization = Normalization::projected;
};

/// axis1 = kxhx, axis2 = kyhy, both in [0, kh_max].
PropertyMap compute_map_2d(SchemeId scheme, const Map2DOptions& opt);

struct StabilityReport {
    bool stable = true;
    double max_gmag = 0.0;
    std::vector<double> nc;
    /// Per Nc: the largest kh such that every kh' <= kh on the grid is stable.
    std::vector<double> max_stable_kh;
    /// Largest grid Nc such that every Nc' <= Nc is stable over the full kh range;
    /// negative if even Nc = 0 is unstable.
    double max_stable_nc = 0.0;
    /// Smallest kh at which any Nc on the grid is unstable (NaN when stable).
    double min_unstable_kh = 0.0;
};

/// Evaluates |G_num| on a grid x grid plane Nc in [0, nc_max], kh in [0, kh_max].
/// Stable means |G_num| <= 1 + kStabilityTolerance everywhere.
StabilityReport stability_scan(SchemeId scheme, double dalpha, double nc_max, double kh_max,
                               std::size_t grid);

struct CriticalDalpha {
    /// Threshold rounded up to two significant digits: the first value on a
    /// two-digit ladder (0.11, 0.12, ... or 0.011, 0.012, ...) that is unstable.
    double dalpha_cr = 0.0;
    /// Bisected boundary between the last stable and first unstable Dalpha.
    double threshold = 0.0;
    double resolution = 0.0;
    std::size_t grid = 0;
    double nc_max = 0.0;
    double kh_max = 0.0;
};

/// Default Nc range for the critical-Dalpha scan: inside the convective
/// stability limit of each scheme so that Dalpha = 0 is stable.
double default_critical_nc_max(SchemeId scheme);

CriticalDalpha find_critical_dalpha(SchemeId scheme, double nc_max, double kh_max,
                                    std::size_t grid = 401);

/// Smallest value with two significant digits that is >= x.
double round_up_two_digits(double x);

}  // namespace displab
