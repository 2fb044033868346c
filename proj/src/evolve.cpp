#include "xxzmagic/evolve.hpp"

#include <cmath>
#include <stdexcept>

#include "xxzmagic/magic.hpp"

namespace xxzmagic {

void Schedule::validate() const {
    if (t_max <= 0.0) throw std::invalid_argument("Schedule: t_max > 0 required");
    if (dt <= 0.0) throw std::invalid_argument("Schedule: dt > 0 required");
    if (record_every < 1) throw std::invalid_argument("Schedule: record_every >= 1 required");
    if (chi_max < 1) throw std::invalid_argument("Schedule: chi_max >= 1 required");
    if (cutoff < 0.0) throw std::invalid_argument("Schedule: cutoff >= 0 required");
}

TruncationReport apply_bond_gate(VectorizedDensityMps& state, std::size_t bond,
                                 const CMatrix& gate, std::size_t chi_max, double cutoff) {
    if (bond + 1 >= state.length()) throw std::invalid_argument("apply_bond_gate: bond out of range");
    if (gate.rows() != 16 || gate.cols() != 16) {
        throw std::invalid_argument("apply_bond_gate: 16x16 site-major gate required");
    }
    const auto center = state.ortho_center();
    if (!center || (*center != bond && *center != bond + 1)) state.move_center_to(bond);

    const DenseTensor& left = state.site(bond);
    const DenseTensor& right = state.site(bond + 1);
    const std::size_t l = left.extent(0), r = right.extent(2);

    DenseTensor blob = contract(left, right, {{2, 0}});  // (l, d1, d2, r)
    DenseTensor g = DenseTensor::from_matrix(gate).reshaped({4, 4, 4, 4});
    // out[e1, e2, l, r] = sum_{d1 d2} g[e1, e2, d1, d2] blob[l, d1, d2, r]
    DenseTensor updated = contract(g, blob, {{2, 1}, {3, 2}}).permuted({2, 0, 1, 3});

    SvdResult svd = svd_truncate(updated.reshaped({l * 4, 4 * r}), chi_max, cutoff);
    const std::size_t k = svd.report.kept;
    state.set_site(bond, std::move(svd.u).reshaped({l, 4, k}));
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t b = 0; b < 4 * r; ++b) svd.v[c * 4 * r + b] *= svd.singular_values[c];
    }
    state.set_site(bond + 1, std::move(svd.v).reshaped({k, 4, r}));
    state.assume_center(bond + 1);
    return svd.report;
}

StepReport step(VectorizedDensityMps& state, const std::vector<LiouvillianGate>& gates,
                std::size_t chi_max, double cutoff) {
    StepReport report;
    for (const LiouvillianGate& gate : gates) {
        if (gate.span == 1) {
            state.apply_site_operator(gate.site, gate.matrix);
        } else {
            TruncationReport tr = apply_bond_gate(state, gate.site, gate.matrix, chi_max, cutoff);
            report.max_discarded_weight = std::max(report.max_discarded_weight, tr.discarded_weight);
            report.max_kept = std::max(report.max_kept, tr.kept);
        }
    }
    const double tr = state.normalize_trace();
    report.trace_drift = std::abs(tr - 1.0);
    return report;
}

TimeSeries evolve_and_record(const VectorizedDensityMps& initial, const XxzParams& params,
                             const DissipatorSpec& diss, Schedule schedule,
                             const EvolveOptions& options, const ResumePoint* resume_from) {
    schedule.validate();
    if (initial.length() != params.length) {
        throw std::invalid_argument("evolve_and_record: state length != params.length");
    }

    for (int halving = 0;; ++halving) {
        const std::vector<LiouvillianGate> gates = build_gates(params, diss, schedule.dt, 2);
        VectorizedDensityMps state = resume_from ? resume_from->state : initial;
        state.normalize_trace();

        TimeSeries series = resume_from ? resume_from->series : TimeSeries{};
        double cumulative_truncation = series.truncation.empty() ? 0.0 : series.truncation.back();
        double drift_since_snapshot = 0.0;
        bool restart = false;

        auto record = [&](double t, const VectorizedDensityMps& snapshot) {
            series.times.push_back(t);
            const std::vector<BlochVector> profile = snapshot.magnetization_profile();
            series.m2.push_back(options.compute_m2 ? stabilizer_renyi_m2(snapshot).m2 : 0.0);
            series.m2_mf.push_back(mean_field_m2(profile));
            series.purity.push_back(snapshot.purity());
            series.trace_drift.push_back(drift_since_snapshot);
            series.truncation.push_back(cumulative_truncation);
            if (options.record_profiles) series.profiles.push_back(profile);
            if (options.on_snapshot) options.on_snapshot(t, snapshot, series);
            drift_since_snapshot = 0.0;
        };

        if (!resume_from) record(0.0, state);
        const auto n_steps = static_cast<std::size_t>(std::llround(schedule.t_max / schedule.dt));
        const std::size_t first = resume_from ? resume_from->steps_done + 1 : 1;
        for (std::size_t n = first; n <= n_steps; ++n) {
            StepReport rep = step(state, gates, schedule.chi_max, schedule.cutoff);
            cumulative_truncation += rep.max_discarded_weight;
            drift_since_snapshot = std::max(drift_since_snapshot, rep.trace_drift);
            if (rep.trace_drift > options.drift_guard) {
                if (resume_from || halving >= options.max_dt_halvings) {
                    throw std::runtime_error("evolve_and_record: trace drift persists at minimal dt");
                }
                restart = true;
                break;
            }
            if (n % schedule.record_every == 0 || n == n_steps) {
                record(static_cast<double>(n) * schedule.dt, state);
            }
        }
        if (!restart) return series;
        schedule.dt /= 2.0;
        schedule.record_every *= 2;
    }
}

}  // namespace xxzmagic
