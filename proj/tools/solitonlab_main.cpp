// solitonlab command line: profile | evolve | spectrum | modulate |
// backlund | collide | stability, each driven by a JSON config.
// Exit codes: 0 pass, 2 diverged scenario, 1 error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "solitonlab/backlund.hpp"
#include "solitonlab/collision.hpp"
#include "solitonlab/experiments.hpp"
#include "solitonlab/modulation.hpp"
#include "solitonlab/profiles.hpp"
#include "solitonlab/solver.hpp"
#include "solitonlab/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slab;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    json j;
    in >> j;
    return j;
}

GridSpec grid_of(const json& j, GridSpec fallback = GridSpec{100.0, 4096}) {
    if (j.contains("grid")) {
        fallback.length = j["grid"].value("length", fallback.length);
        fallback.n = j["grid"].value("n", fallback.n);
    }
    fallback.validate();
    return fallback;
}

Field initial_field(const json& j, const GridSpec& g) {
    const json& init = j.at("initial");
    const std::string type = init.value("type", "soliton");
    if (type == "file") return read_bin_real(init.at("path").get<std::string>());
    if (type == "soliton") {
        return soliton_profile({init.value("p", j.value("p", 2)),
                                init.value("c", 1.0), init.value("x0", 0.0)},
                               g);
    }
    if (type == "soliton_sum") {
        Field u(g);
        for (const json& s : init.at("solitons")) {
            const Field q = soliton_profile(
                {s.value("p", j.value("p", 2)), s.value("c", 1.0), s.value("x0", 0.0)}, g);
            for (int i = 0; i < g.n; ++i) u[i] += q[i];
        }
        return u;
    }
    if (type == "breather") {
        return breather_profile({init.value("alpha", 1.0), init.value("beta", 1.0),
                                 init.value("x1", 0.0), init.value("x2", 0.0)},
                                init.value("t", 0.0), g);
    }
    throw Error("initial.type must be soliton, soliton_sum, breather or file");
}

int cmd_profile(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const GridSpec g = grid_of(cfg);
    const std::string type = cfg.value("type", "soliton");
    if (type == "soliton") {
        const Field q = soliton_profile(
            {cfg.value("p", 2), cfg.value("c", 1.0), cfg.value("x0", 0.0)}, g);
        write_csv(q, out_dir + "/profile.csv");
    } else if (type == "scaling_direction") {
        const Field q = scaling_direction(
            {cfg.value("p", 2), cfg.value("c", 1.0), cfg.value("x0", 0.0)}, g);
        write_csv(q, out_dir + "/profile.csv");
    } else if (type == "breather") {
        const Field b = breather_profile(
            {cfg.value("alpha", 1.0), cfg.value("beta", 1.0), cfg.value("x1", 0.0),
             cfg.value("x2", 0.0)},
            cfg.value("t", 0.0), g);
        write_csv(b, out_dir + "/profile.csv");
    } else if (type == "complex_soliton") {
        const ComplexSoliton cs = complex_soliton(
            {cfg.value("alpha", 1.0), cfg.value("beta", 1.0), cfg.value("x1", 0.0),
             cfg.value("x2", 0.0)},
            g);
        write_csv(cs.Q, out_dir + "/profile.csv");
        write_csv(cs.Qtilde, out_dir + "/primitive.csv");
    } else {
        throw Error("profile type must be soliton, scaling_direction, breather "
                    "or complex_soliton");
    }
    return 0;
}

int cmd_evolve(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const GridSpec g = grid_of(cfg);
    EvolveConfig ec;
    ec.p = cfg.value("p", 2);
    ec.dt = cfg.value("dt", 1e-3);
    ec.t_end = cfg.at("t_end").get<double>();
    ec.snapshot_stride = cfg.value("stride", 100);
    ec.dealias = cfg.value("dealias", true);
    ec.frame_speed = cfg.value("frame_speed", 0.0);
    const Field u0 = initial_field(cfg, g);
    const Trajectory traj = evolve(u0, ec);

    std::ofstream conserved(out_dir + "/conserved.csv");
    conserved.precision(17);
    conserved << (ec.p == 3 ? "t,M,E,F\n" : "t,M,E\n");
    json manifest;
    manifest["p"] = ec.p;
    manifest["snapshots"] = json::array();
    for (size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%06zu", k);
        write_bin(traj.snapshots[k], out_dir + "/" + name + ".bin");
        write_csv(traj.snapshots[k], out_dir + "/" + name + ".csv");
        manifest["snapshots"].push_back(std::string(name) + ".bin");
        const ConservedTriple& c = traj.conserved_log[k];
        conserved << traj.snapshots[k].time << ',' << c.M << ',' << c.E;
        if (c.F) conserved << ',' << *c.F;
        conserved << '\n';
    }
    std::ofstream(out_dir + "/manifest.json") << manifest.dump(2) << '\n';
    return 0;
}

int cmd_spectrum(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string kind = cfg.value("kind", "soliton");
    LinearizedOperator op = [&]() {
        if (kind == "soliton") {
            const double c = cfg.value("c", 1.0);
            const GridSpec g = grid_of(cfg, GridSpec{32.0 / std::sqrt(c), 1024});
            return assemble_soliton_operator({cfg.value("p", 2), c, 0.0}, g);
        }
        const double beta = cfg.value("beta", 1.0);
        const GridSpec g =
            grid_of(cfg, GridSpec{64.0, beta > 1.0 ? 2048 : 1024});
        return assemble_breather_operator(
            {cfg.value("alpha", 1.0), cfg.value("beta", 1.0), cfg.value("x1", 0.0),
             cfg.value("x2", 0.0)},
            cfg.value("t", 0.0), g);
    }();

    std::vector<Field> kernel;
    if (kind == "soliton") {
        kernel.push_back(soliton_profile_derivative(
            {cfg.value("p", 2), cfg.value("c", 1.0), 0.0}, op.grid, 1));
    } else {
        const BreatherDirections dir = breather_directions(
            {cfg.value("alpha", 1.0), cfg.value("beta", 1.0), cfg.value("x1", 0.0),
             cfg.value("x2", 0.0)},
            cfg.value("t", 0.0), op.grid);
        kernel.push_back(dir.B1);
        kernel.push_back(dir.B2);
    }
    const SpectralReport rep = eigen_report(op, cfg.value("k", 8), kernel);

    json j;
    j["eigenvalues"] = rep.eigenvalues;
    j["negative_count"] = rep.negative_count;
    j["lambda0"] = rep.lambda0;
    j["kernel_alignments"] = rep.kernel_alignments;
    j["spectrum_edge"] = rep.spectrum_edge;
    j["tol_zero"] = rep.tol_zero;
    if (kind == "breather") {
        const WronskianCount w = wronskian_negative_count(
            {cfg.value("alpha", 1.0), cfg.value("beta", 1.0), cfg.value("x1", 0.0),
             cfg.value("x2", 0.0)},
            cfg.value("t", 0.0));
        j["wronskian_count"] = w.count;
        j["wronskian_root"] = w.x0;
    }
    std::ofstream(out_dir + "/spectral_report.json") << j.dump(2) << '\n';
    std::ofstream ev(out_dir + "/eigenvalues.csv");
    ev.precision(17);
    ev << "index,eigenvalue\n";
    for (size_t i = 0; i < rep.eigenvalues.size(); ++i)
        ev << i << ',' << rep.eigenvalues[i] << '\n';
    return 0;
}

int cmd_modulate(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string traj_dir = cfg.at("trajectory").get<std::string>();
    json manifest = load_config(traj_dir + "/manifest.json");
    Trajectory traj;
    for (const json& name : manifest["snapshots"])
        traj.snapshots.push_back(
            read_bin_real(traj_dir + "/" + name.get<std::string>()));

    std::vector<SolitonParams> guesses;
    for (const json& s : cfg.at("guesses"))
        guesses.push_back({s.value("p", manifest.value("p", 2)), s.value("c", 1.0),
                           s.value("x0", 0.0)});
    const ModulationTrack track =
        track_trajectory(traj, guesses, cfg.value("fit_scaling", true));

    std::ofstream out(out_dir + "/modulation.csv");
    out.precision(17);
    out << "t";
    for (size_t jx = 0; jx < guesses.size(); ++jx) out << ",rho_" << jx << ",c_" << jx;
    out << ",res_h1,res_h2,converged\n";
    for (size_t k = 0; k < track.times.size(); ++k) {
        out << track.times[k];
        for (size_t jx = 0; jx < guesses.size(); ++jx)
            out << ',' << track.rho[k][jx] << ',' << track.c[k][jx];
        out << ',' << track.residual_h1[k] << ',' << track.residual_h2[k] << ','
            << (track.converged[k] ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_backlund(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const BreatherParams bp{cfg.value("alpha", 1.0), cfg.value("beta", 1.0),
                            cfg.value("x1", 0.0), cfg.value("x2", 0.0)};
    const double t = cfg.value("t", 0.0);
    const GridSpec g = grid_of(cfg);

    const BreatherIdentityResiduals ids = breather_identity_residuals(bp, t, g);
    json j;
    j["first"] = ids.first;
    j["second"] = ids.second;
    j["nonlocal"] = ids.nonlocal;
    j["elliptic"] = ids.elliptic;

    // vacuum <-> complex soliton <-> breather chain at frozen time
    const BreatherParams frozen{bp.alpha, bp.beta, bp.x1 + bp.delta() * t,
                                bp.x2 + bp.gamma() * t};
    const ComplexSoliton cs = complex_soliton(frozen, g);
    const CField zero(g), zter(g);
    const cplx m1(bp.beta, bp.alpha);
    {
        BacklundPair pair = BacklundPair::make(cs.Q, cs.Qtilde, zero, zter, m1);
        auto sup = [](const CField& f) {
            double s = 0;
            for (const cplx& z : f.v) s = std::max(s, std::abs(z));
            return s;
        };
        j["G_Q_vacuum"] = sup(backlund_residual(pair));
        j["time_Q_vacuum"] = sup(backlund_time_residual(pair, cs.Qtilde_t, zter));

        // breather side, primitives from the jet series
        Field B(g), Btil(g), Btil_t(g);
        for (int i = 0; i < g.n; ++i) {
            const auto s = detail::breather_series(bp, t, g.x(i));
            Btil[i] = s.deriv(0, 0).real();
            B[i] = (s.deriv(1, 0) + s.deriv(0, 1)).real();
            Btil_t[i] =
                (bp.delta() * s.deriv(1, 0) + bp.gamma() * s.deriv(0, 1)).real();
        }
        BacklundPair pair2 = BacklundPair::make(
            to_complex(B), to_complex(Btil), cs.Q, cs.Qtilde, std::conj(m1));
        j["G_B_Q"] = sup(backlund_residual(pair2));
        j["time_B_Q"] =
            sup(backlund_time_residual(pair2, to_complex(Btil_t), cs.Qtilde_t));
    }
    std::ofstream(out_dir + "/backlund_report.json") << j.dump(2) << '\n';
    return 0;
}

int cmd_collide(const json& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    CollisionConfig base;
    base.p = cfg.value("p", 4);
    base.delta0 = cfg.value("delta0", 0.05);
    base.dt = cfg.value("dt", 1e-3);
    base.settle_sep_factor = cfg.value("settle_sep_factor", 16.0);
    base.grid = grid_of(cfg, GridSpec{1000.0, 16384});
    std::vector<double> cs;
    if (cfg.contains("c_list"))
        cs = cfg["c_list"].get<std::vector<double>>();
    else
        cs = {cfg.value("c", 0.05)};
    base.c = cs[0];
    const CollisionSweepResult res =
        run_collision_sweep(base.p, cs, base, cfg.value("seed", 12345ull));
    emit_report(res, out_dir);
    return 0;
}

int cmd_stability(const json& cfg, const std::string& out_dir) {
    const Scenario s = Scenario::from_json(cfg);
    const StabilityReport rep = run_scenario(s);
    emit_report(rep, out_dir);
    return rep.diverged ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solitonlab: gKdV/mKdV soliton & breather laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    for (const char* name :
         {"profile", "evolve", "spectrum", "modulate", "backlund", "collide",
          "stability"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path);
        const std::string sub = app.get_subcommands().at(0)->get_name();
        if (sub == "profile") return cmd_profile(cfg, out_dir);
        if (sub == "evolve") return cmd_evolve(cfg, out_dir);
        if (sub == "spectrum") return cmd_spectrum(cfg, out_dir);
        if (sub == "modulate") return cmd_modulate(cfg, out_dir);
        if (sub == "backlund") return cmd_backlund(cfg, out_dir);
        if (sub == "collide") return cmd_collide(cfg, out_dir);
        if (sub == "stability") return cmd_stability(cfg, out_dir);
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
