#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xxzmagic/experiments.hpp"

namespace xxzmagic {

namespace {

nlohmann::ordered_json fit_to_json(const FitResult& fit) {
    return {{"exponent", fit.exponent},
            {"stderr", fit.stderr_},
            {"window", {fit.window.first, fit.window.second}},
            {"residual_rms", fit.residual},
            {"points", fit.points}};
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& file) {
    std::ofstream out = open_out(file);
    out << "t,m2,m2_mf,purity,trace_drift,max_truncation\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << format_double(series.times[i]) << ',' << format_double(series.m2[i]) << ','
            << format_double(series.m2_mf[i]) << ',' << format_double(series.purity[i]) << ','
            << format_double(series.trace_drift[i]) << ',' << format_double(series.truncation[i])
            << '\n';
    }
}

TimeSeries read_timeseries_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + file.string());
    TimeSeries series;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != 6) throw std::runtime_error("bad csv row in " + file.string());
        series.times.push_back(row[0]);
        series.m2.push_back(row[1]);
        series.m2_mf.push_back(row[2]);
        series.purity.push_back(row[3]);
        series.trace_drift.push_back(row[4]);
        series.truncation.push_back(row[5]);
    }
    return series;
}

void write_profiles_csv(const TimeSeries& series, const std::filesystem::path& file) {
    std::ofstream out = open_out(file);
    out << "t,site,x,mx,my,mz\n";
    for (std::size_t k = 0; k < series.profiles.size(); ++k) {
        const auto& profile = series.profiles[k];
        const auto n = static_cast<double>(profile.size());
        for (std::size_t j = 0; j < profile.size(); ++j) {
            const double x = 2.0 * static_cast<double>(j) / n - 1.0;
            out << format_double(series.times[k]) << ',' << j << ',' << format_double(x) << ','
                << format_double(profile[j].x) << ',' << format_double(profile[j].y) << ','
                << format_double(profile[j].z) << '\n';
        }
    }
}

void write_fits_json(const std::map<std::string, FitResult>& fits, const std::filesystem::path& file) {
    nlohmann::ordered_json j;
    for (const auto& [name, fit] : fits) j[name] = fit_to_json(fit);
    open_out(file) << j.dump(2) << '\n';
}

void write_manifest(const ExperimentConfig& config, const std::filesystem::path& file) {
    nlohmann::ordered_json j;
    switch (config.scenario) {
        case Scenario::boundary_quench: j["scenario"] = "boundary_quench"; break;
        case Scenario::dephasing_quench: j["scenario"] = "dephasing_quench"; break;
        case Scenario::sweep: j["scenario"] = "sweep"; break;
    }
    j["params"] = {{"L", config.params.length}, {"J", config.params.j}, {"delta", config.params.delta}};
    switch (config.diss.kind) {
        case DissipatorKind::none: j["diss"]["kind"] = "none"; break;
        case DissipatorKind::boundary_drive:
            j["diss"] = {{"kind", "boundary_drive"}, {"gamma", config.diss.gamma}, {"mu", config.diss.mu}};
            break;
        case DissipatorKind::bulk_dephasing:
            j["diss"] = {{"kind", "bulk_dephasing"}, {"gamma_z", config.diss.gamma_z}};
            break;
    }
    j["schedule"] = {{"t_max", config.schedule.t_max},
                     {"dt", config.schedule.dt},
                     {"record_dt", config.record_dt},
                     {"record_every_steps", config.record_every()},
                     {"chi_max", config.schedule.chi_max},
                     {"cutoff", config.schedule.cutoff}};
    switch (config.initial_state) {
        case InitialStateKind::infinite_temperature: j["initial_state"] = "infinite_temperature"; break;
        case InitialStateKind::neel: j["initial_state"] = "neel"; break;
        case InitialStateKind::bloch_product:
            j["initial_state"] = {{"kind", "bloch_product"},
                                  {"theta", config.initial_theta},
                                  {"phi", config.initial_phi}};
            break;
    }
    if (config.fit_window) j["fit_window"] = {config.fit_window->first, config.fit_window->second};
    j["conventions"] = {{"physical_index", "d = 2s + s'"},
                        {"pauli_order", "IXYZ"},
                        {"trotter", "order-2 symmetric, dephasing halves outermost"},
                        {"boundary_gamma_default", 1.0},
                        {"time_unit", "1/J"},
                        {"fit_window_default", "[first > 5% of late-run mean, first >= 50%]"},
                        {"late_run_mean", "mean of m2 over t >= 0.8 t_max"}};
    open_out(file) << j.dump(2) << '\n';
}

namespace {

struct SvgCanvas {
    std::ostringstream body;
    double width, height;

    SvgCanvas(double w, double h) : width(w), height(h) {}

    std::string finish() {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

void svg_text(SvgCanvas& svg, double x, double y, const std::string& text, int size = 11,
              const char* anchor = "middle") {
    svg.body << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << text
             << "</text>\n";
}

void svg_line(SvgCanvas& svg, double x1, double y1, double x2, double y2, const char* color,
              double width = 1.0, const char* dash = nullptr) {
    svg.body << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
             << "\" stroke=\"" << color << "\" stroke-width=\"" << width << '"';
    if (dash) svg.body << " stroke-dasharray=\"" << dash << '"';
    svg.body << "/>\n";
}

}  // namespace

void write_m2_loglog_svg(const TimeSeries& series, const std::map<std::string, FitResult>& fits,
                         const std::filesystem::path& file) {
    constexpr double kW = 640, kH = 480, kMargin = 60;
    SvgCanvas svg(kW, kH);

    std::vector<std::pair<double, double>> pts_m2, pts_mf;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] <= 0.0) continue;
        if (series.m2[i] > 0.0) pts_m2.emplace_back(std::log10(series.times[i]), std::log10(series.m2[i]));
        if (series.m2_mf[i] > 0.0) pts_mf.emplace_back(std::log10(series.times[i]), std::log10(series.m2_mf[i]));
    }
    if (pts_m2.empty()) {
        svg_text(svg, kW / 2, kH / 2, "no positive samples");
        open_out(file) << svg.finish();
        return;
    }
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto* pts : {&pts_m2, &pts_mf}) {
        for (const auto& [x, y] : *pts) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    if (xhi - xlo < 1e-9) xhi = xlo + 1;
    if (yhi - ylo < 1e-9) yhi = ylo + 1;
    auto px = [&](double x) { return kMargin + (x - xlo) / (xhi - xlo) * (kW - 2 * kMargin); };
    auto py = [&](double y) { return kH - kMargin - (y - ylo) / (yhi - ylo) * (kH - 2 * kMargin); };

    svg_line(svg, kMargin, kH - kMargin, kW - kMargin, kH - kMargin, "black");
    svg_line(svg, kMargin, kMargin, kMargin, kH - kMargin, "black");
    svg_text(svg, kW / 2, kH - 18, "log10 t  (units 1/J)");
    svg_text(svg, 16, kH / 2, "log10 M2", 11, "start");
    for (int e = static_cast<int>(std::ceil(xlo)); e <= static_cast<int>(std::floor(xhi)); ++e) {
        svg_line(svg, px(e), kH - kMargin, px(e), kH - kMargin + 5, "black");
        svg_text(svg, px(e), kH - kMargin + 18, "1e" + std::to_string(e));
    }
    for (int e = static_cast<int>(std::ceil(ylo)); e <= static_cast<int>(std::floor(yhi)); ++e) {
        svg_line(svg, kMargin - 5, py(e), kMargin, py(e), "black");
        svg_text(svg, kMargin - 10, py(e) + 4, "1e" + std::to_string(e), 11, "end");
    }

    auto draw = [&](const std::vector<std::pair<double, double>>& pts, const char* color) {
        if (pts.empty()) return;
        svg.body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) svg.body << px(x) << ',' << py(y) << ' ';
        svg.body << "\"/>\n";
    };
    draw(pts_m2, "#1f77b4");
    draw(pts_mf, "#2ca02c");
    svg_text(svg, kW - kMargin - 60, kMargin + 12, "M2", 12, "start");
    svg.body << "<rect x=\"" << kW - kMargin - 80 << "\" y=\"" << kMargin + 4
             << "\" width=\"14\" height=\"4\" fill=\"#1f77b4\"/>\n";
    svg_text(svg, kW - kMargin - 60, kMargin + 28, "M2_MF", 12, "start");
    svg.body << "<rect x=\"" << kW - kMargin - 80 << "\" y=\"" << kMargin + 20
             << "\" width=\"14\" height=\"4\" fill=\"#2ca02c\"/>\n";

    // fitted slope overlays, drawn across each fit window
    int slot = 0;
    for (const auto& [name, fit] : fits) {
        if (fit.window.second <= 0 || fit.window.first <= 0) continue;
        const double lx0 = std::log10(fit.window.first), lx1 = std::log10(fit.window.second);
        // anchor the overlay on the data at the window start
        double anchor_y = 0;
        bool found = false;
        const auto& pts = (name.find("mf") != std::string::npos) ? pts_mf : pts_m2;
        for (const auto& [x, y] : pts) {
            if (x >= lx0) {
                anchor_y = y;
                found = true;
                break;
            }
        }
        if (!found) continue;
        const double slope_log10 = fit.exponent;  // slope identical in any log base
        svg_line(svg, px(lx0), py(anchor_y + 0.15), px(lx1),
                 py(anchor_y + 0.15 + slope_log10 * (lx1 - lx0)), "#d62728", 1.2, "6,4");
        svg_text(svg, px(lx1) + 4, py(anchor_y + 0.15 + slope_log10 * (lx1 - lx0)),
                 name + " slope " + format_double(std::round(fit.exponent * 100) / 100), 10, "start");
        ++slot;
    }
    (void)slot;
    open_out(file) << svg.finish();
}

void write_magnetization_svg(const TimeSeries& series, const std::filesystem::path& file) {
    constexpr double kW = 640, kH = 480, kMargin = 60;
    SvgCanvas svg(kW, kH);
    if (series.profiles.empty()) {
        svg_text(svg, kW / 2, kH / 2, "no profiles recorded");
        open_out(file) << svg.finish();
        return;
    }
    const std::size_t nt = series.profiles.size();
    const std::size_t ns = series.profiles.front().size();
    double zmax = 1e-12;
    for (const auto& profile : series.profiles) {
        for (const BlochVector& m : profile) zmax = std::max(zmax, std::abs(m.z));
    }
    const double cw = (kW - 2 * kMargin) / static_cast<double>(nt);
    const double ch = (kH - 2 * kMargin) / static_cast<double>(ns);
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t j = 0; j < ns; ++j) {
            const double v = series.profiles[k][j].z / zmax;  // in [-1, 1]
            const int r = static_cast<int>(std::round(255 * std::clamp(1.0 + std::min(0.0, v), 0.0, 1.0)));
            const int b = static_cast<int>(std::round(255 * std::clamp(1.0 - std::max(0.0, v), 0.0, 1.0)));
            const int g = std::min(r, b);
            svg.body << "<rect x=\"" << kMargin + cw * static_cast<double>(k) << "\" y=\""
                     << kMargin + ch * static_cast<double>(j) << "\" width=\"" << cw + 0.5
                     << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb(" << r << ',' << g << ',' << b
                     << ")\"/>\n";
        }
    }
    svg_text(svg, kW / 2, kH - 18, "snapshot index (t = 0 .. " + format_double(series.times.back()) + ")");
    svg_text(svg, 20, kH / 2, "site", 11, "start");
    svg_text(svg, kW / 2, kMargin - 10, "<Z>(site, t), red > 0, blue < 0, |max| = " + format_double(zmax));
    open_out(file) << svg.finish();
}

}  // namespace xxzmagic
