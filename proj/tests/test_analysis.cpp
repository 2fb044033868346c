#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "xxzmagic/experiments.hpp"

using namespace xxzmagic;

namespace {

TimeSeries synthetic_power_law(double amplitude, double exponent, double t_max, double dt) {
    TimeSeries s;
    for (double t = 0.0; t <= t_max + 1e-9; t += dt) {
        s.times.push_back(t);
        const double v = t > 0 ? amplitude * std::pow(t, exponent) : 0.0;
        s.m2.push_back(v);
        s.m2_mf.push_back(0.5 * v);
        s.purity.push_back(1.0);
        s.trace_drift.push_back(0.0);
        s.truncation.push_back(0.0);
    }
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("fit_power_law recovers an exact exponent") {
    const TimeSeries s = synthetic_power_law(3.0, 2.0 / 3.0, 20.0, 0.25);
    const FitResult fit = fit_power_law(s, FitChannel::m2, {1.0, 18.0});
    CHECK(fit.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(fit.stderr_ < 1e-6);
    CHECK(fit.residual < 1e-9);
}

TEST_CASE("fit_power_law rejects non-positive values and short windows") {
    TimeSeries s = synthetic_power_law(1.0, 1.0, 10.0, 0.5);
    s.m2[4] = -1.0;
    CHECK_THROWS_AS(fit_power_law(s, FitChannel::m2, {1.0, 9.0}), std::runtime_error);
    const TimeSeries s2 = synthetic_power_law(1.0, 1.0, 10.0, 0.5);
    CHECK_THROWS_AS(fit_power_law(s2, FitChannel::m2, {8.0, 9.0}), std::runtime_error);
}

TEST_CASE("linear_fit basics") {
    std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("lightcone_extent on synthetic fronts") {
    // profile with |Z| large within depth d of each edge, zero in the middle
    auto make_profile = [](std::size_t n, std::size_t depth) {
        std::vector<BlochVector> p(n);
        for (std::size_t j = 0; j < n; ++j) {
            const bool inside = j < depth || j + depth >= n;
            p[j] = {0, 0, inside ? (j < n / 2 ? 1.0 : -1.0) : 0.0};
        }
        return p;
    };
    std::vector<std::vector<BlochVector>> profiles{
        std::vector<BlochVector>(16, BlochVector{0, 0, 0}),  // all zero: depth 0
        make_profile(16, 2),
        make_profile(16, 4),
    };
    std::vector<double> times{0.0, 1.0, 2.0};
    const auto fronts = lightcone_extent(profiles, times, 0.25);
    REQUIRE(fronts.size() == 3);
    CHECK(fronts[0].second == doctest::Approx(0.0));
    CHECK(fronts[1].second == doctest::Approx(2.0 * 2.0 / 16.0).epsilon(1e-12));
    CHECK(fronts[2].second == doctest::Approx(2.0 * 4.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("scaling_collapse: synthetic family collapses at its generating exponent") {
    const double z_true = 1.5, mu = 0.03;
    auto g = [](double x) { return std::pow(x, 2.0 / 3.0) / (1.0 + std::pow(x, 2.0 / 3.0)); };
    std::vector<CollapseCurve> curves;
    for (std::size_t length : {16u, 24u, 32u}) {
        CollapseCurve c;
        c.length = length;
        c.mu = mu;
        const double lz = std::pow(static_cast<double>(length), z_true);
        for (double t = 0.25; t <= 220.0; t += 0.25) {
            c.times.push_back(t);
            c.m2.push_back(mu * mu * static_cast<double>(length) * g(t / lz));
        }
        curves.push_back(std::move(c));
    }
    CHECK(scaling_collapse(curves, z_true) < 1e-12);
    const double z_found = minimize_collapse_exponent(curves, 0.8, 2.5);
    CHECK(z_found == doctest::Approx(z_true).epsilon(0.02));
    CHECK(scaling_collapse(curves, 1.0) > 100.0 * scaling_collapse(curves, z_true));
}

TEST_CASE("timeseries csv round trip, header-only when empty") {
    const auto dir = std::filesystem::temp_directory_path() / "xxzmagic_analysis_test";
    std::filesystem::create_directories(dir);
    const TimeSeries s = synthetic_power_law(2.0, 0.5, 5.0, 0.5);
    write_timeseries_csv(s, dir / "ts.csv");
    const TimeSeries back = read_timeseries_csv(dir / "ts.csv");
    REQUIRE(back.times.size() == s.times.size());
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        CHECK(back.times[i] == s.times[i]);  // shortest round-trip form is exact
        CHECK(back.m2[i] == s.m2[i]);
    }
    write_timeseries_csv(TimeSeries{}, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "t,m2,m2_mf,purity,trace_drift,max_truncation\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing: happy path, overrides, rejection of junk") {
    const std::string text = R"(
# demo config
scenario = boundary_quench
params.L = 8
params.delta = 1.5
diss.mu = 0.03
schedule.t_max = 5
schedule.dt = 0.1
schedule.record_dt = 0.5
schedule.chi_max = 16
output_dir = /tmp/xxzmagic_cfg_demo
)";
    const ExperimentConfig c = parse_config_text(text, {"params.delta = 2.0"});
    CHECK(c.params.length == 8);
    CHECK(c.params.delta == 2.0);
    CHECK(c.diss.kind == DissipatorKind::boundary_drive);
    CHECK(c.diss.mu == 0.03);
    CHECK(c.record_every() == 5);

    CHECK_THROWS_AS(parse_config_text("scenario = boundary_quench\nbogus.key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("params.L = 8\n"), ConfigError);  // missing scenario
    CHECK_THROWS_AS(parse_config_text("scenario = boundary_quench\nparams.L = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scenario = dephasing_quench\nparams.L = x\n"), ConfigError);
}

TEST_CASE("run is deterministic: identical configs give byte-identical csv") {
    const auto base = std::filesystem::temp_directory_path() / "xxzmagic_determinism";
    std::filesystem::remove_all(base);
    const std::string text =
        "scenario = boundary_quench\nparams.L = 6\nparams.delta = 1.0\ndiss.mu = 0.05\n"
        "schedule.t_max = 1.5\nschedule.dt = 0.05\nschedule.record_dt = 0.25\nschedule.chi_max = 16\n";
    ExperimentConfig c1 = parse_config_text(text, {"output_dir = " + (base / "a").string()});
    ExperimentConfig c2 = parse_config_text(text, {"output_dir = " + (base / "b").string()});
    run(c1);
    run(c2);
    CHECK(slurp(base / "a" / "timeseries.csv") == slurp(base / "b" / "timeseries.csv"));
    CHECK(slurp(base / "a" / "profiles.csv") == slurp(base / "b" / "profiles.csv"));
    CHECK(!slurp(base / "a" / "manifest.json").empty());
    CHECK(slurp(base / "a" / "m2_loglog.svg").find("</svg>") != std::string::npos);
    CHECK(slurp(base / "a" / "magnetization.svg").find("</svg>") != std::string::npos);
    std::filesystem::remove_all(base);
}

TEST_CASE("checkpoint and resume through the experiment layer") {
    const auto dir = std::filesystem::temp_directory_path() / "xxzmagic_ckpt";
    std::filesystem::remove_all(dir);
    const std::string text =
        "scenario = dephasing_quench\nparams.L = 4\nparams.delta = 1.0\ndiss.gamma_z = 1.0\n"
        "initial_state = bloch_product\ninitial.theta = 0.785398163397448\n"
        "initial.phi = 0.785398163397448\n"
        "schedule.t_max = 2.0\nschedule.dt = 0.05\nschedule.record_dt = 0.5\nschedule.chi_max = 8\n"
        "checkpoint_every = 1\n";
    ExperimentConfig full_cfg = parse_config_text(text, {"output_dir = " + (dir / "full").string()});
    const TimeSeries full = run(full_cfg);

    // interrupt: run only to t=1, then resume to t_max
    ExperimentConfig part_cfg =
        parse_config_text(text, {"output_dir = " + (dir / "part").string(), "schedule.t_max = 1.0"});
    run(part_cfg);
    ExperimentConfig resume_cfg =
        parse_config_text(text, {"output_dir = " + (dir / "part").string()});
    const TimeSeries resumed = resume(resume_cfg);
    REQUIRE(resumed.times.size() == full.times.size());
    for (std::size_t i = 0; i < full.times.size(); ++i) {
        CHECK(resumed.m2[i] == doctest::Approx(full.m2[i]).epsilon(1e-9));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep writes one run directory per value") {
    const auto dir = std::filesystem::temp_directory_path() / "xxzmagic_sweep";
    std::filesystem::remove_all(dir);
    const std::string text =
        "scenario = sweep\nsweep.base_scenario = boundary_quench\nsweep.key = diss.mu\n"
        "sweep.values = 0.02, 0.04\nparams.L = 4\nparams.delta = 1.0\n"
        "schedule.t_max = 0.5\nschedule.dt = 0.05\nschedule.record_dt = 0.25\nschedule.chi_max = 8\n"
        "output_dir = " + dir.string() + "\n";
    run_sweep(parse_config_text(text));
    CHECK(std::filesystem::exists(dir / "diss.mu=0.02" / "timeseries.csv"));
    CHECK(std::filesystem::exists(dir / "diss.mu=0.04" / "timeseries.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("format_double produces shortest round-trip forms") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}
