#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "solitonlab/collision.hpp"
#include "solitonlab/modulation.hpp"

namespace slab {

enum class ScenarioKind {
    single_soliton_stability,
    two_soliton_stability,
    collision,
    breather_stability,
    spectral_report,
    backlund_report,
};

ScenarioKind scenario_kind_from_string(const std::string& s);
std::string to_string(ScenarioKind k);

struct Perturbation {
    std::string shape = "gaussian";  // gaussian | mode | noise
    double amplitude = 0.0;
    double width = 1.0;
    double center = 0.0;
    int mode = 1;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::single_soliton_stability;
    nlohmann::json parameters;  // kind-specific block
    Perturbation perturbation;
    double t_end = 10.0;
    uint64_t seed = 0;

    static Scenario from_json(const nlohmann::json& j);
};

/// sampled perturbation (deterministic for a given seed)
Field build_perturbation(const Perturbation& p, const GridSpec& g,
                         uint64_t seed);

struct StabilityReport {
    ScenarioKind kind;
    bool diverged = false;
    double sup_residual = 0.0;
    double sup_residual_time = 0.0;
    double initial_residual = 0.0;
    double fitted_C0 = 0.0;  // sup_residual / perturbation amplitude
    ModulationTrack track;
    // two-soliton extras
    std::vector<double> m2_log;
    double m2_max_drift = 0.0;
    std::vector<double> mean_speed;      // fitted mean of rho_j'
    std::vector<double> nominal_speed;   // c_j
    bool speeds_ok = true;
    // breather extras
    std::vector<double> x1_track, x2_track;
    nlohmann::json extra;

    nlohmann::json to_json() const;
};

StabilityReport run_scenario(const Scenario& s);

struct CollisionSweepResult {
    std::vector<double> c_values;
    std::vector<DefectReport> reports;
    double exponent = 0.0;  // log-log slope of defect vs c
    double exponent_lo = 0.0, exponent_hi = 0.0;  // 95% bootstrap interval
    nlohmann::json to_json() const;
};

CollisionSweepResult run_collision_sweep(int p, const std::vector<double>& cs,
                                         const CollisionConfig& base,
                                         uint64_t seed = 12345);

/// write JSON summary, CSV time series and SVG line plots into out_dir
void emit_report(const StabilityReport& rep, const std::string& out_dir);
void emit_report(const CollisionSweepResult& rep, const std::string& out_dir);

namespace detail {
/// minimal SVG polyline plot
void write_svg_plot(const std::string& path, const std::vector<double>& x,
                    const std::vector<std::vector<double>>& ys,
                    const std::string& title);
/// run jobs over an index range with at most SOLITONLAB_THREADS workers
void parallel_for(int count, const std::function<void(int)>& job);
int max_threads();
}  // namespace detail

}  // namespace slab
