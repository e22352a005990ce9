#include "solitonlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

#include "solitonlab/backlund.hpp"
#include "solitonlab/spectral.hpp"

namespace slab {

using nlohmann::json;

ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "single_soliton_stability") return ScenarioKind::single_soliton_stability;
    if (s == "two_soliton_stability") return ScenarioKind::two_soliton_stability;
    if (s == "collision") return ScenarioKind::collision;
    if (s == "breather_stability") return ScenarioKind::breather_stability;
    if (s == "spectral_report") return ScenarioKind::spectral_report;
    if (s == "backlund_report") return ScenarioKind::backlund_report;
    throw Error("unknown scenario kind: " + s);
}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::single_soliton_stability: return "single_soliton_stability";
        case ScenarioKind::two_soliton_stability: return "two_soliton_stability";
        case ScenarioKind::collision: return "collision";
        case ScenarioKind::breather_stability: return "breather_stability";
        case ScenarioKind::spectral_report: return "spectral_report";
        case ScenarioKind::backlund_report: return "backlund_report";
    }
    return "?";
}

Scenario Scenario::from_json(const json& j) {
    Scenario s;
    s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    s.parameters = j.value("parameters", json::object());
    if (j.contains("perturbation")) {
        const json& p = j["perturbation"];
        s.perturbation.shape = p.value("shape", "gaussian");
        s.perturbation.amplitude = p.value("amplitude", 0.0);
        if (s.perturbation.amplitude < 0)
            throw Error("scenario: perturbation amplitude must be >= 0");
        s.perturbation.width = p.value("width", 1.0);
        s.perturbation.center = p.value("center", 0.0);
        s.perturbation.mode = p.value("mode", 1);
    }
    s.t_end = j.value("horizon", j.value("t_end", 10.0));
    s.seed = j.value("seed", 0ull);
    return s;
}

Field build_perturbation(const Perturbation& p, const GridSpec& g,
                         uint64_t seed) {
    Field f(g);
    if (p.amplitude == 0.0) return f;
    if (p.shape == "gaussian") {
        for (int i = 0; i < g.n; ++i) {
            const double s = (g.x(i) - p.center) / p.width;
            f[i] = p.amplitude * std::exp(-0.5 * s * s);
        }
    } else if (p.shape == "mode") {
        for (int i = 0; i < g.n; ++i)
            f[i] = p.amplitude *
                   std::cos(2.0 * std::numbers::pi * p.mode * g.x(i) / g.length);
    } else if (p.shape == "noise") {
        // seeded band-limited noise: random phases on the lowest modes
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::normal_distribution<double> amp(0.0, 1.0);
        const int kmax = std::max(2, p.mode);
        Field raw(g);
        for (int m = 1; m <= kmax; ++m) {
            const double a = amp(rng), ph = phase(rng);
            for (int i = 0; i < g.n; ++i)
                raw[i] += a * std::cos(2.0 * std::numbers::pi * m * g.x(i) / g.length + ph);
        }
        const double nrm = sobolev_norm(raw, 1.0);
        for (int i = 0; i < g.n; ++i) f[i] = p.amplitude * raw[i] / nrm;
    } else {
        throw Error("perturbation shape must be gaussian, mode or noise");
    }
    return f;
}

namespace {

GridSpec grid_from_json(const json& j, const GridSpec& fallback) {
    GridSpec g = fallback;
    if (j.contains("grid")) {
        g.length = j["grid"].value("length", fallback.length);
        g.n = j["grid"].value("n", fallback.n);
    }
    g.validate();
    return g;
}

StabilityReport run_single(const Scenario& s) {
    const json& p = s.parameters;
    const int pp = p.value("p", 2);
    const double c = p.value("c", 1.0);
    const GridSpec g = grid_from_json(p, GridSpec{100.0, 4096});
    const double dt = p.value("dt", 1e-3);
    const int stride = p.value("stride", 200);

    Field u0 = soliton_profile({pp, c, 0.0}, g);
    const Field pert = build_perturbation(s.perturbation, g, s.seed);
    for (int i = 0; i < g.n; ++i) u0[i] += pert[i];

    StabilityReport rep;
    rep.kind = s.kind;
    EvolveConfig cfg{pp, dt, s.t_end, stride};
    Trajectory traj;
    try {
        traj = evolve(u0, cfg);
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }

    std::vector<SolitonParams> warm{{pp, c, 0.0}};
    try {
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            const Field& snap = traj.snapshots[k];
            std::vector<SolitonParams> adv = warm;
            if (k > 0) adv[0].x0 += adv[0].c * (snap.time - traj.snapshots[k - 1].time);
            MultiFit fit = fit_multi(snap, adv);
            warm = fit.params;
            const double rn = sobolev_norm(fit.residual, 1.0);
            rep.track.times.push_back(snap.time);
            rep.track.rho.push_back({fit.params[0].x0});
            rep.track.c.push_back({fit.params[0].c});
            rep.track.residual_h1.push_back(rn);
            rep.track.residual_h2.push_back(sobolev_norm(fit.residual, 2.0));
            rep.track.converged.push_back(true);
            if (k == 0) rep.initial_residual = rn;
            if (rn >= rep.sup_residual) {
                rep.sup_residual = rn;
                rep.sup_residual_time = snap.time;
            }
        }
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }
    if (s.perturbation.amplitude > 0)
        rep.fitted_C0 = rep.sup_residual / s.perturbation.amplitude;
    return rep;
}

StabilityReport run_two(const Scenario& s) {
    const json& p = s.parameters;
    const int pp = p.value("p", 4);
    const double c1 = p.value("c1", 1.0), c2 = p.value("c2", 2.0);
    const double L0 = p.value("L0", 40.0);
    const GridSpec g = grid_from_json(p, GridSpec{200.0, 8192});
    const double dt = p.value("dt", 1e-3);
    const int stride = p.value("stride", 200);
    const double A = p.value("A", 8.0);
    const double m0 = p.value("m0", 0.5 * (c1 + c2));
    const double x1 = p.value("x1", -L0 / 2), x2 = p.value("x2", L0 / 2);

    Field u0 = soliton_profile({pp, c1, x1}, g);
    {
        const Field q2 = soliton_profile({pp, c2, x2}, g);
        for (int i = 0; i < g.n; ++i) u0[i] += q2[i];
    }
    const Field pert = build_perturbation(s.perturbation, g, s.seed);
    for (int i = 0; i < g.n; ++i) u0[i] += pert[i];

    StabilityReport rep;
    rep.kind = s.kind;
    rep.nominal_speed = {c1, c2};
    EvolveConfig cfg{pp, dt, s.t_end, stride};
    Trajectory traj;
    try {
        traj = evolve(u0, cfg);
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }

    std::vector<SolitonParams> warm{{pp, c1, x1}, {pp, c2, x2}};
    try {
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            const Field& snap = traj.snapshots[k];
            std::vector<SolitonParams> adv = warm;
            if (k > 0)
                for (auto& w : adv) w.x0 += w.c * (snap.time - traj.snapshots[k - 1].time);
            MultiFit fit = fit_multi(snap, adv);
            warm = fit.params;
            const double rn = sobolev_norm(fit.residual, 1.0);
            rep.track.times.push_back(snap.time);
            rep.track.rho.push_back({fit.params[0].x0, fit.params[1].x0});
            rep.track.c.push_back({fit.params[0].c, fit.params[1].c});
            rep.track.residual_h1.push_back(rn);
            rep.track.residual_h2.push_back(sobolev_norm(fit.residual, 2.0));
            rep.track.converged.push_back(true);
            rep.m2_log.push_back(localized_mass(snap, m0, A, snap.time));
            if (k == 0) rep.initial_residual = rn;
            if (rn >= rep.sup_residual) {
                rep.sup_residual = rn;
                rep.sup_residual_time = snap.time;
            }
        }
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }
    for (size_t k = 0; k < rep.m2_log.size(); ++k)
        rep.m2_max_drift = std::max(rep.m2_max_drift, rep.m2_log[k] - rep.m2_log[0]);
    // mean slope of rho_j via least squares against c_j
    const size_t nsnap = rep.track.times.size();
    if (nsnap >= 2) {
        for (int j = 0; j < 2; ++j) {
            double st = 0, sr = 0, stt = 0, str = 0;
            for (size_t k = 0; k < nsnap; ++k) {
                st += rep.track.times[k];
                sr += rep.track.rho[k][static_cast<size_t>(j)];
                stt += rep.track.times[k] * rep.track.times[k];
                str += rep.track.times[k] * rep.track.rho[k][static_cast<size_t>(j)];
            }
            const double nn = static_cast<double>(nsnap);
            const double slope = (nn * str - st * sr) / (nn * stt - st * st);
            rep.mean_speed.push_back(slope);
            const double cj = rep.nominal_speed[static_cast<size_t>(j)];
            if (std::abs(slope - cj) >= 0.05 * cj) rep.speeds_ok = false;
        }
    }
    if (s.perturbation.amplitude > 0)
        rep.fitted_C0 = rep.sup_residual / s.perturbation.amplitude;
    return rep;
}

StabilityReport run_breather(const Scenario& s) {
    const json& p = s.parameters;
    const double alpha = p.value("alpha", 1.5), beta = p.value("beta", 1.0);
    const GridSpec g = grid_from_json(p, GridSpec{100.0, 4096});
    const double dt = p.value("dt", 2.5e-4);
    const int stride = p.value("stride", 800);

    BreatherParams bp{alpha, beta, 0.0, 0.0};
    Field u0 = breather_profile(bp, 0.0, g);
    const Field pert = build_perturbation(s.perturbation, g, s.seed);
    for (int i = 0; i < g.n; ++i) u0[i] += pert[i];

    StabilityReport rep;
    rep.kind = s.kind;
    EvolveConfig cfg{3, dt, s.t_end, stride};
    Trajectory traj;
    try {
        traj = evolve(u0, cfg);
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }

    BreatherParams warm = bp;
    try {
        for (size_t k = 0; k < traj.snapshots.size(); ++k) {
            const Field& snap = traj.snapshots[k];
            BreatherFit fit = fit_breather(snap, warm, snap.time);
            warm = fit.params;
            const double rn = sobolev_norm(fit.residual, 2.0);
            rep.track.times.push_back(snap.time);
            rep.x1_track.push_back(fit.params.x1);
            rep.x2_track.push_back(fit.params.x2);
            rep.track.residual_h1.push_back(sobolev_norm(fit.residual, 1.0));
            rep.track.residual_h2.push_back(rn);
            rep.track.converged.push_back(true);
            if (k == 0) rep.initial_residual = rn;
            if (rn >= rep.sup_residual) {
                rep.sup_residual = rn;
                rep.sup_residual_time = snap.time;
            }
        }
    } catch (const Error&) {
        rep.diverged = true;
        return rep;
    }
    if (s.perturbation.amplitude > 0)
        rep.fitted_C0 = rep.sup_residual / s.perturbation.amplitude;
    return rep;
}

}  // namespace

StabilityReport run_scenario(const Scenario& s) {
    switch (s.kind) {
        case ScenarioKind::single_soliton_stability: return run_single(s);
        case ScenarioKind::two_soliton_stability: return run_two(s);
        case ScenarioKind::breather_stability: return run_breather(s);
        default:
            throw Error("run_scenario handles stability kinds; use the "
                        "dedicated entry points for " + to_string(s.kind));
    }
}

CollisionSweepResult run_collision_sweep(int p, const std::vector<double>& cs,
                                         const CollisionConfig& base,
                                         uint64_t seed) {
    CollisionSweepResult out;
    out.c_values = cs;
    out.reports.resize(cs.size());
    detail::parallel_for(static_cast<int>(cs.size()), [&](int i) {
        CollisionConfig cfg = base;
        cfg.p = p;
        cfg.c = cs[static_cast<size_t>(i)];
        out.reports[static_cast<size_t>(i)] = measure_defect(cfg);
    });

    // log-log least squares for the defect exponent
    const int n = static_cast<int>(cs.size());
    auto slope_of = [&](const std::vector<int>& idx) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i : idx) {
            const double lx = std::log(cs[static_cast<size_t>(i)]);
            const double ly = std::log(out.reports[static_cast<size_t>(i)].defect_norm);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        const double nn = static_cast<double>(idx.size());
        const double den = nn * sxx - sx * sx;
        return (den != 0.0) ? (nn * sxy - sx * sy) / den
                            : std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<int> all(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
    out.exponent = slope_of(all);

    if (n >= 2) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::vector<double> slopes;
        for (int b = 0; b < 2000; ++b) {
            std::vector<int> idx(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = pick(rng);
            // need at least two distinct c values for a slope
            bool distinct = false;
            for (int i = 1; i < n; ++i)
                if (cs[static_cast<size_t>(idx[static_cast<size_t>(i)])] !=
                    cs[static_cast<size_t>(idx[0])]) distinct = true;
            if (!distinct) continue;
            const double sl = slope_of(idx);
            if (std::isfinite(sl)) slopes.push_back(sl);
        }
        if (!slopes.empty()) {
            std::sort(slopes.begin(), slopes.end());
            out.exponent_lo = slopes[static_cast<size_t>(0.025 * (slopes.size() - 1))];
            out.exponent_hi = slopes[static_cast<size_t>(0.975 * (slopes.size() - 1))];
        }
    }
    return out;
}

json StabilityReport::to_json() const {
    json j;
    j["kind"] = slab::to_string(kind);
    j["diverged"] = diverged;
    j["sup_residual"] = sup_residual;
    j["sup_residual_time"] = sup_residual_time;
    j["initial_residual"] = initial_residual;
    j["fitted_C0"] = fitted_C0;
    if (!m2_log.empty()) {
        j["m2_max_drift"] = m2_max_drift;
        j["mean_speed"] = mean_speed;
        j["nominal_speed"] = nominal_speed;
        j["speeds_ok"] = speeds_ok;
    }
    j["snapshots"] = track.times.size();
    if (!extra.is_null()) j["extra"] = extra;
    return j;
}

json CollisionSweepResult::to_json() const {
    json j;
    j["c"] = c_values;
    json defects = json::array(), c1p = json::array(), c2p = json::array();
    for (const auto& r : reports) {
        defects.push_back(r.defect_norm);
        c1p.push_back(r.post_fit.size() > 1 ? r.post_fit[1].c : 0.0);
        c2p.push_back(!r.post_fit.empty() ? r.post_fit[0].c : 0.0);
    }
    j["defect_norm"] = defects;
    j["c1_plus"] = c1p;  // big soliton after collision
    j["c2_plus"] = c2p;  // small soliton after collision
    j["exponent"] = exponent;
    j["exponent_ci95"] = {exponent_lo, exponent_hi};
    return j;
}

namespace detail {

int max_threads() {
    if (const char* env = std::getenv("SOLITONLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int count, const std::function<void(int)>& job) {
    const int workers = std::min(count, max_threads());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void write_svg_plot(const std::string& path, const std::vector<double>& x,
                    const std::vector<std::vector<double>>& ys,
                    const std::string& title) {
    if (x.empty() || ys.empty()) return;
    const double W = 640, H = 400, m = 50;
    double xmin = x[0], xmax = x[0], ymin = 1e300, ymax = -1e300;
    for (double v : x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (const auto& y : ys)
        for (double v : y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    auto px = [&](double v) { return m + (v - xmin) / (xmax - xmin) * (W - 2 * m); };
    auto py = [&](double v) { return H - m - (v - ymin) / (ymax - ymin) * (H - 2 * m); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.precision(10);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
        << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='20' text-anchor='middle'>" << title
        << "</text>\n";
    out << "<line x1='" << m << "' y1='" << H - m << "' x2='" << W - m
        << "' y2='" << H - m << "' stroke='black'/>\n";
    out << "<line x1='" << m << "' y1='" << m << "' x2='" << m << "' y2='"
        << H - m << "' stroke='black'/>\n";
    out << "<text x='" << m << "' y='" << H - m + 30 << "'>" << xmin
        << "</text><text x='" << W - m << "' y='" << H - m + 30
        << "' text-anchor='end'>" << xmax << "</text>\n";
    out << "<text x='" << m - 5 << "' y='" << H - m
        << "' text-anchor='end'>" << ymin << "</text><text x='" << m - 5
        << "' y='" << m << "' text-anchor='end'>" << ymax << "</text>\n";
    for (size_t s = 0; s < ys.size(); ++s) {
        out << "<polyline fill='none' stroke='" << colors[s % 4]
            << "' stroke-width='1.5' points='";
        for (size_t i = 0; i < x.size() && i < ys[s].size(); ++i) {
            if (!std::isfinite(ys[s][i])) continue;
            out << px(x[i]) << ',' << py(ys[s][i]) << ' ';
        }
        out << "'/>\n";
    }
    out << "</svg>\n";
}

}  // namespace detail

void emit_report(const StabilityReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/summary.json");
        if (!out) throw IoError("cannot open for writing: " + out_dir + "/summary.json");
        out << rep.to_json().dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir + "/track.csv");
        if (!out) throw IoError("cannot open for writing: " + out_dir + "/track.csv");
        out.precision(17);
        out << "t";
        const size_t nstruct = rep.track.rho.empty() ? rep.x1_track.empty() ? 0 : 0
                                                     : rep.track.rho[0].size();
        for (size_t jx = 0; jx < nstruct; ++jx) out << ",rho_" << jx << ",c_" << jx;
        if (!rep.x1_track.empty()) out << ",x1,x2";
        out << ",res_h1,res_h2";
        if (!rep.m2_log.empty()) out << ",M2";
        out << '\n';
        for (size_t k = 0; k < rep.track.times.size(); ++k) {
            out << rep.track.times[k];
            for (size_t jx = 0; jx < nstruct; ++jx)
                out << ',' << rep.track.rho[k][jx] << ',' << rep.track.c[k][jx];
            if (!rep.x1_track.empty())
                out << ',' << rep.x1_track[k] << ',' << rep.x2_track[k];
            out << ',' << rep.track.residual_h1[k] << ',' << rep.track.residual_h2[k];
            if (!rep.m2_log.empty()) out << ',' << rep.m2_log[k];
            out << '\n';
        }
    }
    if (!rep.track.times.empty()) {
        detail::write_svg_plot(out_dir + "/residual.svg", rep.track.times,
                               {rep.kind == ScenarioKind::breather_stability
                                    ? rep.track.residual_h2
                                    : rep.track.residual_h1},
                               "modulated residual vs t");
        if (!rep.m2_log.empty())
            detail::write_svg_plot(out_dir + "/m2.svg", rep.track.times,
                                   {rep.m2_log}, "localized mass M2 vs t");
    }
}

void emit_report(const CollisionSweepResult& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/summary.json");
        if (!out) throw IoError("cannot open: " + out_dir + "/summary.json");
        out << rep.to_json().dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir + "/defects.csv");
        if (!out) throw IoError("cannot open: " + out_dir + "/defects.csv");
        out.precision(17);
        out << "c,defect_norm,defect_norm_full,c1_plus,c2_plus,t_measure\n";
        for (size_t i = 0; i < rep.c_values.size(); ++i) {
            const DefectReport& r = rep.reports[i];
            out << rep.c_values[i] << ',' << r.defect_norm << ','
                << r.defect_norm_full << ','
                << (r.post_fit.size() > 1 ? r.post_fit[1].c : 0.0) << ','
                << (!r.post_fit.empty() ? r.post_fit[0].c : 0.0) << ','
                << r.t_measure << '\n';
        }
    }
    if (rep.c_values.size() >= 2) {
        std::vector<double> lx, ly;
        for (size_t i = 0; i < rep.c_values.size(); ++i) {
            lx.push_back(std::log10(rep.c_values[i]));
            ly.push_back(std::log10(rep.reports[i].defect_norm));
        }
        detail::write_svg_plot(out_dir + "/defect_loglog.svg", lx, {ly},
                               "log10 defect vs log10 c");
    }
}

}  // namespace slab
