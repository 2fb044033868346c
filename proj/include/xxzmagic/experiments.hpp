#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xxzmagic/evolve.hpp"
#include "xxzmagic/fitting.hpp"

namespace xxzmagic {

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a run's evolution diverges; partial output is preserved in the
/// output directory (CLI exit code 3).
struct EvolutionAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { boundary_quench, dephasing_quench, sweep };
enum class InitialStateKind { infinite_temperature, bloch_product, neel };

struct ExperimentConfig {
    Scenario scenario = Scenario::boundary_quench;
    XxzParams params;
    DissipatorSpec diss;
    Schedule schedule;
    double record_dt = 0.5;  // physical snapshot cadence; record_every = round(record_dt/dt)
    InitialStateKind initial_state = InitialStateKind::infinite_temperature;
    double initial_theta = 0.0;
    double initial_phi = 0.0;
    std::filesystem::path output_dir = "run_output";
    std::optional<std::pair<double, double>> fit_window;
    bool record_profiles = true;
    bool compute_m2 = true;
    std::size_t checkpoint_every = 0;  // snapshots between checkpoints, 0 = off

    // sweep scenario only
    std::string sweep_key;
    std::vector<double> sweep_values;
    Scenario sweep_base = Scenario::boundary_quench;

    void validate() const;
    std::size_t record_every() const;
};

/// Parse the flat dotted-key config format ("key = value" per line, '#'
/// comments). Unknown keys are rejected. `overrides` are applied after the
/// file, same syntax key=value.
ExperimentConfig parse_config_file(const std::filesystem::path& file,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

VectorizedDensityMps make_initial_state(const ExperimentConfig& config);

/// Execute one scenario run: evolves, fits the default channels, writes
/// timeseries.csv, profiles.csv, fits.json, manifest.json and SVG plots into
/// output_dir. Returns the recorded series.
TimeSeries run(const ExperimentConfig& config);

/// Resume a checkpointed run from output_dir; throws ConfigError when no
/// checkpoint is present.
TimeSeries resume(const ExperimentConfig& config);

/// Sweep scenario: one run per value of sweep_key, each in its own
/// subdirectory, scheduled over a small worker pool.
void run_sweep(const ExperimentConfig& config);

// --- output emission (outputs.cpp) ---

void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& file);
TimeSeries read_timeseries_csv(const std::filesystem::path& file);
void write_profiles_csv(const TimeSeries& series, const std::filesystem::path& file);
void write_fits_json(const std::map<std::string, FitResult>& fits, const std::filesystem::path& file);
void write_manifest(const ExperimentConfig& config, const std::filesystem::path& file);

/// Log-log M2 / M2_MF plot with the fitted slopes overlaid; self-contained SVG.
void write_m2_loglog_svg(const TimeSeries& series, const std::map<std::string, FitResult>& fits,
                         const std::filesystem::path& file);
/// Site-resolved <Z>(x, t) heatmap; self-contained SVG.
void write_magnetization_svg(const TimeSeries& series, const std::filesystem::path& file);

/// Shortest round-trip decimal form of a double (CSV/JSON float format).
std::string format_double(double v);

}  // namespace xxzmagic
