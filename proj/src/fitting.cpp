#include "xxzmagic/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xxzmagic {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("linear_fit: need >= 2 matched points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.residual_rms = std::sqrt(ss_res / n);
    fit.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

FitResult fit_power_law(const TimeSeries& series, FitChannel channel,
                        std::pair<double, double> window) {
    const std::vector<double>& values =
        (channel == FitChannel::m2_mf) ? series.m2_mf : series.m2;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < window.first || t > window.second || t <= 0.0) continue;
        if (values[i] <= 0.0) {
            throw std::runtime_error("fit_power_law: non-positive value inside fit window");
        }
        lx.push_back(std::log2(t));
        ly.push_back(std::log2(values[i]));
    }
    if (lx.size() < 8) throw std::runtime_error("fit_power_law: window holds fewer than 8 snapshots");
    const LinearFit lf = linear_fit(lx, ly);
    FitResult out;
    out.exponent = lf.slope;
    out.stderr_ = lf.slope_stderr;
    out.window = window;
    out.residual = lf.residual_rms;
    out.points = lx.size();
    return out;
}

double late_run_mean(const TimeSeries& series, double fraction) {
    if (series.times.empty()) throw std::invalid_argument("late_run_mean: empty series");
    const double t_end = series.times.back();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] >= fraction * t_end) {
            sum += series.m2[i];
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

double saturation_time(const TimeSeries& series) {
    const double target = 0.95 * late_run_mean(series);
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.m2[i] >= target) return series.times[i];
    }
    return series.times.back();
}

std::pair<double, double> default_growth_window(const TimeSeries& series) {
    const double sat = late_run_mean(series);
    double lo = series.times.front(), hi = series.times.back();
    bool lo_set = false;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (!lo_set && series.m2[i] > 0.05 * sat && series.times[i] > 0.0) {
            lo = series.times[i];
            lo_set = true;
        }
        if (series.m2[i] >= 0.5 * sat) {
            hi = series.times[i];
            break;
        }
    }
    return {lo, hi};
}

std::vector<std::pair<double, double>> lightcone_extent(
    const std::vector<std::vector<BlochVector>>& profiles, std::span<const double> times,
    double threshold_fraction) {
    if (profiles.size() != times.size()) {
        throw std::invalid_argument("lightcone_extent: profiles/times size mismatch");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(profiles.size());
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const auto& profile = profiles[k];
        const std::size_t n = profile.size();
        double zmax = 0.0;
        for (const BlochVector& m : profile) zmax = std::max(zmax, std::abs(m.z));
        if (zmax < 1e-12) {
            out.emplace_back(times[k], 0.0);
            continue;
        }
        const double threshold = threshold_fraction * zmax;
        // count consecutive above-threshold sites inward from each edge;
        // depth in x units (x = 2j/L - 1 spans 2 across the chain)
        std::size_t left = 0;
        while (left < n && std::abs(profile[left].z) >= threshold) ++left;
        std::size_t right = 0;
        while (right < n && std::abs(profile[n - 1 - right].z) >= threshold) ++right;
        const double dx = (static_cast<double>(left) + static_cast<double>(right)) /
                          static_cast<double>(n);
        out.emplace_back(times[k], std::min(1.0, dx));
    }
    return out;
}

double scaling_collapse(std::span<const CollapseCurve> curves, double z) {
    if (curves.size() < 3) throw std::invalid_argument("scaling_collapse: >= 3 system sizes required");
    double x_lo = 0.0, x_hi = std::numeric_limits<double>::infinity();
    for (const CollapseCurve& c : curves) {
        const double lz = std::pow(static_cast<double>(c.length), z);
        double first_positive = 0.0;
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            if (c.times[i] > 0.0 && c.m2[i] > 0.0) {
                first_positive = c.times[i] / lz;
                break;
            }
        }
        x_lo = std::max(x_lo, first_positive);
        x_hi = std::min(x_hi, c.times.back() / lz);
    }
    if (!(x_hi > x_lo) || x_lo <= 0.0) {
        throw std::runtime_error("scaling_collapse: insufficient overlap in rescaled time");
    }

    constexpr std::size_t kGrid = 48;
    const double lo = std::log(x_lo), hi = std::log(x_hi);
    double spread_sq = 0.0, mean_sq = 0.0;
    for (std::size_t g = 0; g < kGrid; ++g) {
        const double x = std::exp(lo + (hi - lo) * (static_cast<double>(g) + 0.5) / kGrid);
        double sum = 0.0, sum2 = 0.0;
        for (const CollapseCurve& c : curves) {
            const double lz = std::pow(static_cast<double>(c.length), z);
            const double t = x * lz;
            // linear interpolation in log t
            const auto it = std::lower_bound(c.times.begin(), c.times.end(), t);
            std::size_t i1 = static_cast<std::size_t>(std::distance(c.times.begin(), it));
            if (i1 == 0) i1 = 1;
            if (i1 >= c.times.size()) i1 = c.times.size() - 1;
            const std::size_t i0 = i1 - 1;
            const double w = (t - c.times[i0]) / (c.times[i1] - c.times[i0]);
            const double y = (1.0 - w) * c.m2[i0] + w * c.m2[i1];
            const double scaled = y / (c.mu * c.mu * static_cast<double>(c.length));
            sum += scaled;
            sum2 += scaled * scaled;
        }
        const double mean = sum / static_cast<double>(curves.size());
        spread_sq += sum2 / static_cast<double>(curves.size()) - mean * mean;
        mean_sq += mean * mean;
    }
    return std::sqrt(std::max(0.0, spread_sq) / std::max(mean_sq, 1e-300));
}

double minimize_collapse_exponent(std::span<const CollapseCurve> curves, double z_lo, double z_hi) {
    double best_z = z_lo, best = std::numeric_limits<double>::infinity();
    constexpr int kCoarse = 120;
    for (int i = 0; i <= kCoarse; ++i) {
        const double z = z_lo + (z_hi - z_lo) * i / kCoarse;
        const double r = scaling_collapse(curves, z);
        if (r < best) {
            best = r;
            best_z = z;
        }
    }
    // golden-section refinement around the coarse minimum
    const double span = (z_hi - z_lo) / kCoarse;
    double a = std::max(z_lo, best_z - span), b = std::min(z_hi, best_z + span);
    constexpr double kGolden = 0.6180339887498949;
    double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
    double fc = scaling_collapse(curves, c), fd = scaling_collapse(curves, d);
    for (int iter = 0; iter < 40 && (b - a) > 1e-4; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = scaling_collapse(curves, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = scaling_collapse(curves, d);
        }
    }
    return (a + b) / 2.0;
}

}  // namespace xxzmagic
