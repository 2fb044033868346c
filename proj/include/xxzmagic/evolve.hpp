#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "xxzmagic/density_mps.hpp"
#include "xxzmagic/model.hpp"

namespace xxzmagic {

struct Schedule {
    double t_max = 10.0;
    double dt = 0.05;
    std::size_t record_every = 10;  // steps between snapshots
    std::size_t chi_max = 32;
    double cutoff = 1e-12;

    void validate() const;
};

/// Recorded observables of one run. All lists share length; times strictly
/// increasing. `truncation` is the running sum of per-step maximal discarded
/// weights; `trace_drift` is the largest pre-renormalization |Tr rho - 1|
/// seen since the previous snapshot.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> m2;
    std::vector<double> m2_mf;
    std::vector<double> purity;
    std::vector<double> trace_drift;
    std::vector<double> truncation;
    std::vector<std::vector<BlochVector>> profiles;  // empty unless requested
};

struct StepReport {
    double max_discarded_weight = 0.0;
    std::size_t max_kept = 0;
    double trace_drift = 0.0;  // |trace - 1| before renormalization
};

/// Apply one two-site superoperator gate (site-major 16x16) at the given bond
/// and truncate the bond back to chi_max.
TruncationReport apply_bond_gate(VectorizedDensityMps& state, std::size_t bond,
                                 const CMatrix& gate, std::size_t chi_max, double cutoff);

/// One full Trotter step: applies the gate sequence, truncates, renormalizes
/// the trace. Throws std::runtime_error on a vanishing trace (divergence).
StepReport step(VectorizedDensityMps& state, const std::vector<LiouvillianGate>& gates,
                std::size_t chi_max, double cutoff);

struct EvolveOptions {
    bool record_profiles = false;
    bool compute_m2 = true;
    double drift_guard = 1e-8;   // per-step trace-drift bound before dt halving
    int max_dt_halvings = 3;
    // Observables are evaluated on a trace-normalized snapshot; this hook
    // lets callers watch progress (checkpointing lives in the experiment layer).
    std::function<void(double t, const VectorizedDensityMps&, const TimeSeries&)> on_snapshot;
};

/// Mid-run continuation point (loaded from a checkpoint).
struct ResumePoint {
    VectorizedDensityMps state;
    std::size_t steps_done = 0;
    TimeSeries series;
};

/// Evolve from the initial state, recording snapshots every record_every
/// steps including t = 0. If any step's trace drift exceeds the guard, the
/// run restarts from the initial state with dt halved. When resuming, dt
/// halving is unavailable (the original initial state is gone) and a guard
/// violation throws.
TimeSeries evolve_and_record(const VectorizedDensityMps& initial, const XxzParams& params,
                             const DissipatorSpec& diss, Schedule schedule,
                             const EvolveOptions& options = {},
                             const ResumePoint* resume_from = nullptr);

}  // namespace xxzmagic
