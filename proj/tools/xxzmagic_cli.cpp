#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "xxzmagic/experiments.hpp"

namespace {

using namespace xxzmagic;

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& output_dir, bool do_resume) {
    std::vector<std::string> overrides = sets;
    if (!output_dir.empty()) overrides.push_back("output_dir = " + output_dir);
    const ExperimentConfig config = parse_config_file(config_path, overrides);
    const TimeSeries series = do_resume ? resume(config) : run(config);
    std::cout << "run complete: " << series.times.size() << " snapshots, final t = "
              << format_double(series.times.back()) << ", output in " << config.output_dir.string()
              << "\n";
    return 0;
}

int cmd_fit(const std::string& series_path, const std::string& channel, double t_lo, double t_hi) {
    const TimeSeries series = read_timeseries_csv(series_path);
    FitChannel ch;
    if (channel == "m2") ch = FitChannel::m2;
    else if (channel == "m2_mf") ch = FitChannel::m2_mf;
    else if (channel == "m2_decay") ch = FitChannel::m2_decay;
    else throw ConfigError("fit: channel must be m2, m2_mf or m2_decay");
    std::pair<double, double> window{t_lo, t_hi};
    if (t_hi <= t_lo) {
        if (ch == FitChannel::m2_decay) {
            std::size_t peak = 0;
            for (std::size_t i = 0; i < series.m2.size(); ++i) {
                if (series.m2[i] > series.m2[peak]) peak = i;
            }
            window = {1.5 * series.times[peak], series.times.back()};
        } else {
            window = default_growth_window(series);
        }
    }
    const FitResult fit = fit_power_law(series, ch, window);
    std::cout << "{\"channel\": \"" << channel << "\", \"exponent\": " << format_double(fit.exponent)
              << ", \"stderr\": " << format_double(fit.stderr_) << ", \"window\": ["
              << format_double(fit.window.first) << ", " << format_double(fit.window.second)
              << "], \"residual_rms\": " << format_double(fit.residual)
              << ", \"points\": " << fit.points << "}\n";
    return 0;
}

int cmd_collapse(const std::vector<std::string>& series_paths, const std::vector<std::size_t>& lengths,
                 double mu, double z_lo, double z_hi) {
    if (series_paths.size() != lengths.size()) {
        throw ConfigError("collapse: need one --length per series file");
    }
    std::vector<CollapseCurve> curves;
    for (std::size_t i = 0; i < series_paths.size(); ++i) {
        const TimeSeries s = read_timeseries_csv(series_paths[i]);
        curves.push_back({lengths[i], mu, s.times, s.m2});
    }
    const double best = minimize_collapse_exponent(curves, z_lo, z_hi);
    std::cout << "{\"z\": " << format_double(best)
              << ", \"residual\": " << format_double(scaling_collapse(curves, best)) << "}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lindblad MPS evolution and stabilizer-Renyi-entropy analysis for open XXZ chains"};
    app.require_subcommand(1);

    std::string config_path, output_dir, channel = "m2";
    std::vector<std::string> sets, series_paths;
    std::vector<std::size_t> lengths;
    bool do_resume = false;
    double t_lo = 0.0, t_hi = 0.0, mu = 1.0, z_lo = 0.5, z_hi = 3.0;

    CLI::App* c_run = app.add_subcommand("run", "execute one scenario run from a config file");
    c_run->add_option("--config", config_path, "config file (flat dotted keys)")->required();
    c_run->add_option("--set", sets, "override, e.g. --set params.delta=2.0");
    c_run->add_option("--output", output_dir, "override output_dir");
    c_run->add_flag("--resume", do_resume, "continue from the checkpoint in output_dir");

    CLI::App* c_fit = app.add_subcommand("fit", "power-law exponent fit of a recorded series");
    c_fit->add_option("--series", series_paths, "timeseries.csv path(s)")->required()->expected(1);
    c_fit->add_option("--channel", channel, "m2 | m2_mf | m2_decay");
    c_fit->add_option("--t-lo", t_lo, "fit window start");
    c_fit->add_option("--t-hi", t_hi, "fit window end");

    CLI::App* c_collapse = app.add_subcommand("collapse", "finite-size scaling collapse over L");
    c_collapse->add_option("--series", series_paths, "timeseries.csv, one per L")->required();
    c_collapse->add_option("--length", lengths, "system sizes matching --series order")->required();
    c_collapse->add_option("--mu", mu, "drive bias used in the runs");
    c_collapse->add_option("--z-lo", z_lo, "exponent scan lower bound");
    c_collapse->add_option("--z-hi", z_hi, "exponent scan upper bound");

    CLI::App* c_sweep = app.add_subcommand("sweep", "run a parameter sweep (scenario = sweep)");
    c_sweep->add_option("--config", config_path, "config file with sweep.* keys")->required();
    c_sweep->add_option("--set", sets, "override, e.g. --set sweep.values=0.01,0.02");
    c_sweep->add_option("--output", output_dir, "override output_dir");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) return cmd_run(config_path, sets, output_dir, do_resume);
        if (c_fit->parsed()) return cmd_fit(series_paths.front(), channel, t_lo, t_hi);
        if (c_collapse->parsed()) return cmd_collapse(series_paths, lengths, mu, z_lo, z_hi);
        if (c_sweep->parsed()) {
            std::vector<std::string> overrides = sets;
            if (!output_dir.empty()) overrides.push_back("output_dir = " + output_dir);
            xxzmagic::run_sweep(parse_config_file(config_path, overrides));
            return 0;
        }
    } catch (const xxzmagic::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const xxzmagic::EvolutionAbort& err) {
        std::cerr << "evolution aborted: " << err.what() << " (partial output preserved)\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
