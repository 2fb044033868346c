#include "xxzmagic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "xxzmagic/state_io.hpp"

namespace xxzmagic {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != std::floor(v)) throw ConfigError("config: " + key + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: " + key + " must be true/false");
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "scenario") {
        if (value == "boundary_quench") c.scenario = Scenario::boundary_quench;
        else if (value == "dephasing_quench") c.scenario = Scenario::dephasing_quench;
        else if (value == "sweep") c.scenario = Scenario::sweep;
        else throw ConfigError("config: unknown scenario '" + value + "'");
    } else if (key == "params.L") c.params.length = parse_size(key, value);
    else if (key == "params.J") c.params.j = parse_double(key, value);
    else if (key == "params.delta") c.params.delta = parse_double(key, value);
    else if (key == "diss.gamma") c.diss.gamma = parse_double(key, value);
    else if (key == "diss.mu") c.diss.mu = parse_double(key, value);
    else if (key == "diss.gamma_z") c.diss.gamma_z = parse_double(key, value);
    else if (key == "schedule.t_max") c.schedule.t_max = parse_double(key, value);
    else if (key == "schedule.dt") c.schedule.dt = parse_double(key, value);
    else if (key == "schedule.record_dt") c.record_dt = parse_double(key, value);
    else if (key == "schedule.chi_max") c.schedule.chi_max = parse_size(key, value);
    else if (key == "schedule.cutoff") c.schedule.cutoff = parse_double(key, value);
    else if (key == "initial_state") {
        if (value == "infinite_temperature") c.initial_state = InitialStateKind::infinite_temperature;
        else if (value == "bloch_product") c.initial_state = InitialStateKind::bloch_product;
        else if (value == "neel") c.initial_state = InitialStateKind::neel;
        else throw ConfigError("config: unknown initial_state '" + value + "'");
    } else if (key == "initial.theta") c.initial_theta = parse_double(key, value);
    else if (key == "initial.phi") c.initial_phi = parse_double(key, value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "fit.t_lo") c.fit_window = {parse_double(key, value), c.fit_window ? c.fit_window->second : 0.0};
    else if (key == "fit.t_hi") c.fit_window = {c.fit_window ? c.fit_window->first : 0.0, parse_double(key, value)};
    else if (key == "record_profiles") c.record_profiles = parse_bool(key, value);
    else if (key == "compute_m2") c.compute_m2 = parse_bool(key, value);
    else if (key == "checkpoint_every") c.checkpoint_every = parse_size(key, value);
    else if (key == "sweep.key") c.sweep_key = value;
    else if (key == "sweep.values") {
        c.sweep_values.clear();
        std::stringstream ss(value);
        std::string cell;
        while (std::getline(ss, cell, ',')) c.sweep_values.push_back(parse_double(key, trim(cell)));
    } else if (key == "sweep.base_scenario") {
        if (value == "boundary_quench") c.sweep_base = Scenario::boundary_quench;
        else if (value == "dephasing_quench") c.sweep_base = Scenario::dephasing_quench;
        else throw ConfigError("config: sweep.base_scenario must be a run scenario");
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

void apply_line(ExperimentConfig& c, const std::string& raw) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected 'key = value', got '" + line + "'");
    apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

}  // namespace

std::size_t ExperimentConfig::record_every() const {
    const auto every = static_cast<std::size_t>(std::llround(record_dt / schedule.dt));
    return std::max<std::size_t>(1, every);
}

void ExperimentConfig::validate() const {
    const Scenario effective = scenario == Scenario::sweep ? sweep_base : scenario;
    if (effective == Scenario::boundary_quench && diss.kind != DissipatorKind::boundary_drive) {
        throw ConfigError("config: boundary_quench requires a boundary_drive dissipator");
    }
    if (effective == Scenario::dephasing_quench && diss.kind != DissipatorKind::bulk_dephasing) {
        throw ConfigError("config: dephasing_quench requires a bulk_dephasing dissipator");
    }
    if (scenario == Scenario::sweep) {
        if (sweep_key.empty() || sweep_values.empty()) {
            throw ConfigError("config: sweep requires sweep.key and sweep.values");
        }
    }
    try {
        params.validate();
        diss.validate();
        schedule.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    if (record_dt <= 0) throw ConfigError("config: schedule.record_dt must be positive");
    if (fit_window && fit_window->second <= fit_window->first) {
        throw ConfigError("config: fit window must satisfy t_lo < t_hi");
    }
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    bool scenario_seen = false;
    // Two passes: the scenario determines the dissipator kind before rates land.
    std::vector<std::string> lines;
    while (std::getline(ss, line)) lines.push_back(line);
    for (const std::string& l : lines) {
        const std::string t = trim(l);
        if (t.rfind("scenario", 0) == 0 || t.rfind("sweep.base_scenario", 0) == 0) {
            apply_line(c, l);
            scenario_seen = true;
        }
    }
    if (!scenario_seen) throw ConfigError("config: missing scenario");
    const Scenario effective = c.scenario == Scenario::sweep ? c.sweep_base : c.scenario;
    c.diss.kind = effective == Scenario::boundary_quench ? DissipatorKind::boundary_drive
                                                         : DissipatorKind::bulk_dephasing;
    for (const std::string& l : lines) {
        const std::string t = trim(l);
        if (t.rfind("scenario", 0) == 0 || t.rfind("sweep.base_scenario", 0) == 0) continue;
        apply_line(c, l);
    }
    for (const std::string& o : overrides) apply_line(c, o);
    c.validate();
    return c;
}

ExperimentConfig parse_config_file(const std::filesystem::path& file,
                                   const std::vector<std::string>& overrides) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides);
}

VectorizedDensityMps make_initial_state(const ExperimentConfig& config) {
    switch (config.initial_state) {
        case InitialStateKind::infinite_temperature:
            return VectorizedDensityMps::infinite_temperature(config.params.length);
        case InitialStateKind::neel:
            return VectorizedDensityMps::neel(config.params.length);
        case InitialStateKind::bloch_product: {
            const BlochVector m = {std::sin(config.initial_theta) * std::cos(config.initial_phi),
                                   std::sin(config.initial_theta) * std::sin(config.initial_phi),
                                   std::cos(config.initial_theta)};
            std::vector<BlochVector> ms(config.params.length, m);
            return VectorizedDensityMps::bloch_product(ms);
        }
    }
    throw ConfigError("config: unreachable initial state");
}

namespace {

void write_checkpoint(const std::filesystem::path& dir, const VectorizedDensityMps& state,
                      std::size_t steps_done, const TimeSeries& series) {
    std::filesystem::create_directories(dir);
    save_state(state, dir / "state.vdmps");
    write_timeseries_csv(series, dir / "series.csv");
    nlohmann::ordered_json cursor;
    cursor["steps_done"] = steps_done;
    std::ofstream out(dir / "cursor.json", std::ios::trunc);
    out << cursor.dump(2) << '\n';
}

std::map<std::string, FitResult> default_fits(const ExperimentConfig& config, const TimeSeries& series) {
    std::map<std::string, FitResult> fits;
    auto attempt = [&](const std::string& name, FitChannel channel, std::pair<double, double> window) {
        try {
            fits[name] = fit_power_law(series, channel, window);
        } catch (const std::exception&) {
            // window without enough positive snapshots; omit the fit
        }
    };
    if (config.scenario == Scenario::boundary_quench) {
        const auto window = config.fit_window ? *config.fit_window : default_growth_window(series);
        attempt("m2_growth", FitChannel::m2, window);
        attempt("m2_mf_growth", FitChannel::m2_mf, window);
    } else {
        // decay tail: from 1.5x the peak time to the end
        std::size_t peak = 0;
        for (std::size_t i = 0; i < series.m2.size(); ++i) {
            if (series.m2[i] > series.m2[peak]) peak = i;
        }
        const double t_lo = config.fit_window ? config.fit_window->first
                                              : std::max(1.5 * series.times[peak], series.times[1]);
        const double t_hi = config.fit_window ? config.fit_window->second : series.times.back();
        attempt("m2_decay", FitChannel::m2_decay, {t_lo, t_hi});
    }
    return fits;
}

TimeSeries run_impl(const ExperimentConfig& config, const ResumePoint* resume_from) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    Schedule schedule = config.schedule;
    schedule.record_every = config.record_every();

    EvolveOptions options;
    options.record_profiles = config.record_profiles;
    options.compute_m2 = config.compute_m2;

    TimeSeries partial;
    std::size_t snapshot_count = 0;
    if (config.checkpoint_every > 0) {
        options.on_snapshot = [&](double t, const VectorizedDensityMps& state, const TimeSeries& so_far) {
            partial = so_far;
            ++snapshot_count;
            if (snapshot_count % config.checkpoint_every == 0) {
                const auto steps = static_cast<std::size_t>(std::llround(t / schedule.dt));
                write_checkpoint(config.output_dir / "checkpoint", state, steps, so_far);
            }
        };
    }

    TimeSeries series;
    try {
        series = evolve_and_record(make_initial_state(config), config.params, config.diss, schedule,
                                   options, resume_from);
    } catch (const std::exception& err) {
        if (!partial.times.empty()) {
            write_timeseries_csv(partial, config.output_dir / "timeseries.csv");
            if (config.record_profiles) write_profiles_csv(partial, config.output_dir / "profiles.csv");
        }
        write_manifest(config, config.output_dir / "manifest.json");
        throw EvolutionAbort(err.what());
    }

    const std::map<std::string, FitResult> fits = default_fits(config, series);
    write_timeseries_csv(series, config.output_dir / "timeseries.csv");
    if (config.record_profiles) write_profiles_csv(series, config.output_dir / "profiles.csv");
    write_fits_json(fits, config.output_dir / "fits.json");
    write_manifest(config, config.output_dir / "manifest.json");
    write_m2_loglog_svg(series, fits, config.output_dir / "m2_loglog.svg");
    write_magnetization_svg(series, config.output_dir / "magnetization.svg");
    return series;
}

}  // namespace

TimeSeries run(const ExperimentConfig& config) { return run_impl(config, nullptr); }

TimeSeries resume(const ExperimentConfig& config) {
    const std::filesystem::path dir = config.output_dir / "checkpoint";
    if (!std::filesystem::exists(dir / "cursor.json")) {
        throw ConfigError("resume: no checkpoint under " + dir.string());
    }
    ResumePoint point{load_state(dir / "state.vdmps"), 0, read_timeseries_csv(dir / "series.csv")};
    std::ifstream cursor_in(dir / "cursor.json");
    nlohmann::json cursor = nlohmann::json::parse(cursor_in);
    point.steps_done = cursor.at("steps_done").get<std::size_t>();
    // Profiles are not checkpointed; a resumed run records them from here on.
    return run_impl(config, &point);
}

void run_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.scenario != Scenario::sweep) throw ConfigError("run_sweep: scenario must be sweep");

    std::vector<ExperimentConfig> variants;
    for (double value : config.sweep_values) {
        ExperimentConfig v = config;
        v.scenario = config.sweep_base;
        if (config.sweep_key == "diss.mu") v.diss.mu = value;
        else if (config.sweep_key == "params.delta") v.params.delta = value;
        else if (config.sweep_key == "params.L") v.params.length = static_cast<std::size_t>(value);
        else if (config.sweep_key == "schedule.chi_max") v.schedule.chi_max = static_cast<std::size_t>(value);
        else throw ConfigError("run_sweep: unsupported sweep.key '" + config.sweep_key + "'");
        std::ostringstream name;
        name << config.sweep_key << '=' << format_double(value);
        std::string dir_name = name.str();
        std::replace(dir_name.begin(), dir_name.end(), '/', '_');
        v.output_dir = config.output_dir / dir_name;
        v.validate();
        variants.push_back(std::move(v));
    }

    const std::size_t workers = std::max<std::size_t>(
        1, std::min<std::size_t>(variants.size(), std::thread::hardware_concurrency()));
    std::vector<std::future<void>> futures;
    std::size_t next = 0;
    while (next < variants.size() || !futures.empty()) {
        while (futures.size() < workers && next < variants.size()) {
            const ExperimentConfig& v = variants[next++];
            futures.push_back(std::async(std::launch::async, [&v] { run(v); }));
        }
        futures.front().get();
        futures.erase(futures.begin());
    }
}

}  // namespace xxzmagic
