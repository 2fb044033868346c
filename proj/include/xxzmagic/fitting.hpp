#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xxzmagic/evolve.hpp"

namespace xxzmagic {

struct FitResult {
    double exponent = 0.0;
    double stderr_ = 0.0;
    std::pair<double, double> window = {0.0, 0.0};
    double residual = 0.0;  // RMS of log-log residuals
    std::size_t points = 0;
};

enum class FitChannel { m2, m2_mf, m2_decay };

/// Least-squares slope of log2(value) vs log2(t) over the window. All values
/// inside the window must be strictly positive (throws otherwise); at least
/// 8 snapshots are required.
FitResult fit_power_law(const TimeSeries& series, FitChannel channel,
                        std::pair<double, double> window);

/// Plain linear regression y = a + b x; returns (b, stderr of b, rms residual).
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
    double r_squared = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Mean of m2 over t >= fraction * t_end; the operational "late-run mean"
/// used for saturation values.
double late_run_mean(const TimeSeries& series, double fraction = 0.8);

/// First time m2 reaches 95% of the late-run mean (saturation time t0).
double saturation_time(const TimeSeries& series);

/// Default growth-fit window: from the first snapshot above 5% of the
/// saturation value to the first above 50%.
std::pair<double, double> default_growth_window(const TimeSeries& series);

/// Light-cone front penetration depth per snapshot: innermost positions
/// (from each edge, x = 2j/L - 1) where |<Z>| first drops below
/// threshold_fraction times the snapshot maximum; an all-zero profile gives
/// depth 0 (fronts at the edges).
std::vector<std::pair<double, double>> lightcone_extent(
    const std::vector<std::vector<BlochVector>>& profiles, std::span<const double> times,
    double threshold_fraction = 0.25);

/// One rescaled curve for the collapse analysis: y = m2 / (mu^2 L) against
/// x = t / L^z.
struct CollapseCurve {
    std::size_t length = 0;
    double mu = 0.0;
    std::vector<double> times;
    std::vector<double> m2;
};

/// RMS relative spread between the rescaled curves interpolated on a common
/// log-spaced grid inside their overlap. Throws when fewer than 3 curves or
/// no overlap. Smaller is better; minimized over z it recovers the dynamical
/// exponent.
double scaling_collapse(std::span<const CollapseCurve> curves, double z);

/// Grid-plus-refine minimizer of scaling_collapse over z in [z_lo, z_hi].
double minimize_collapse_exponent(std::span<const CollapseCurve> curves, double z_lo, double z_hi);

}  // namespace xxzmagic
