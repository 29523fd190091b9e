#include "tqd/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqd/io.hpp"

namespace tqd {

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigInvalid, "config key '" + key + "': bad number '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long x = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigInvalid, "config key '" + key + "': bad integer '" + value + "'");
    }
}

IntegrationMethod parse_method(const std::string& value) {
    if (value == "rk4" || value == "rk4_fixed") return IntegrationMethod::rk4_fixed;
    if (value == "rk45" || value == "rk45_adaptive") return IntegrationMethod::rk45_adaptive;
    fail(ErrorCode::ConfigInvalid, "unknown integrator method '" + value + "'");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    out.back() = b;
    return out;
}

} // namespace

CorrectionMode parse_correction_mode(const std::string& name) {
    if (name == "none") return CorrectionMode::none;
    if (name == "general") return CorrectionMode::general;
    if (name == "unitary-frame" || name == "unitary_frame") return CorrectionMode::unitary_frame;
    if (name == "analytic") return CorrectionMode::analytic;
    fail(ErrorCode::ConfigInvalid, "unknown correction mode '" + name + "'");
}

const char* correction_mode_name(CorrectionMode mode) {
    switch (mode) {
    case CorrectionMode::none: return "none";
    case CorrectionMode::general: return "general";
    case CorrectionMode::unitary_frame: return "unitary-frame";
    case CorrectionMode::analytic: return "analytic";
    }
    return "unknown";
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "scenario") {
            scenario = value;
        } else if (key == "correction") {
            correction = parse_correction_mode(value);
        } else if (key == "out") {
            out_dir = value;
        } else if (key == "method") {
            method = parse_method(value);
        } else if (key == "dt") {
            dt = parse_double(key, value);
        } else if (key == "rtol") {
            rtol = parse_double(key, value);
        } else if (key == "atol") {
            atol = parse_double(key, value);
        } else if (key == "t_final") {
            t_final = parse_double(key, value);
        } else if (key == "grid_points") {
            grid_points = static_cast<int>(parse_long(key, value));
        } else if (key == "seed") {
            seed = static_cast<unsigned long>(parse_long(key, value));
        } else if (key == "theta0") {
            rotating.theta0 = closed.theta0 = parse_double(key, value);
        } else if (key == "omega") {
            rotating.omega = closed.omega = parse_double(key, value);
        } else if (key == "gamma") {
            rotating.gamma = bell.gamma = parse_double(key, value);
        } else if (key == "theta_f") {
            bell.theta_f = parse_double(key, value);
        } else if (key == "T") {
            bell.duration = parse_double(key, value);
        } else if (key == "B") {
            closed.field = parse_double(key, value);
        } else {
            fail(ErrorCode::ConfigInvalid, "unknown config key '" + key + "'");
        }
    }
}

void RunConfig::validate() const {
    if (scenario != "rotating" && scenario != "bell" && scenario != "closed")
        fail(ErrorCode::ConfigInvalid, "unknown scenario '" + scenario + "'");
    if (grid_points < 2)
        fail(ErrorCode::ConfigInvalid, "grid_points must be at least 2");
    if (!(dt > 0.0) || !(rtol > 0.0) || !(atol > 0.0))
        fail(ErrorCode::ConfigInvalid, "dt, rtol, atol must be positive");
    if (scenario == "rotating") rotating.validate();
    if (scenario == "bell") bell.validate();
    if (scenario == "closed") closed.validate();
}

std::map<std::string, std::string> RunConfig::resolved() const {
    std::map<std::string, std::string> out;
    out["scenario"] = scenario;
    out["correction"] = correction_mode_name(correction);
    out["out"] = out_dir;
    out["method"] =
        method == IntegrationMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
    out["dt"] = format_double(dt);
    out["rtol"] = format_double(rtol);
    out["atol"] = format_double(atol);
    if (t_final) out["t_final"] = format_double(*t_final);
    out["grid_points"] = std::to_string(grid_points);
    out["seed"] = std::to_string(seed);
    if (scenario == "rotating" || scenario == "closed") {
        out["theta0"] = format_double(scenario == "rotating" ? rotating.theta0 : closed.theta0);
        out["omega"] = format_double(scenario == "rotating" ? rotating.omega : closed.omega);
    }
    if (scenario == "rotating" || scenario == "bell")
        out["gamma"] = format_double(scenario == "rotating" ? rotating.gamma : bell.gamma);
    if (scenario == "bell") {
        out["theta_f"] = format_double(bell.theta_f);
        out["T"] = format_double(bell.duration);
    }
    if (scenario == "closed") out["B"] = format_double(closed.field);
    return out;
}

std::pair<DrivingProtocol, HermitianBasis> build_scenario(const RunConfig& config) {
    DrivingProtocol protocol;
    if (config.scenario == "rotating")
        protocol = rotating_dissipation(config.rotating);
    else if (config.scenario == "bell")
        protocol = bell_dragging(config.bell);
    else if (config.scenario == "closed")
        protocol = closed_spin(config.closed);
    else
        fail(ErrorCode::ConfigInvalid, "unknown scenario '" + config.scenario + "'");
    if (config.t_final) {
        if (!(*config.t_final > protocol.t_start))
            fail(ErrorCode::ConfigInvalid, "t_final must exceed the scenario start time");
        protocol.t_end = *config.t_final;
    }
    HermitianBasis basis = build_basis(protocol.dim, BasisKind::pauli);
    return {std::move(protocol), std::move(basis)};
}

namespace {

struct RunArtifacts {
    Trajectory trajectory;
    CPReport cp;
    double wall_time_s = 0.0;
};

nlohmann::json config_json(const RunConfig& config) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : config.resolved()) j[k] = v;
    return j;
}

int cmd_run(const RunConfig& config) {
    const auto wall0 = std::chrono::steady_clock::now();
    auto [protocol, basis] = build_scenario(config);
    const std::vector<double> grid =
        linspace(protocol.t_start, protocol.t_end, config.grid_points);
    const Operator rho0 = instantaneous_target(protocol, basis, grid.front());

    IntegratorConfig icfg;
    icfg.method = config.method;
    icfg.dt = config.dt;
    icfg.rtol = config.rtol;
    icfg.atol = config.atol;
    icfg.correction_mode = config.correction;
    const Trajectory traj = integrate(protocol, basis, rho0, icfg, grid);

    const FramePath fpath = track_frames(protocol, basis, grid);
    const double t_mid = grid[grid.size() / 2];
    const CorrectionTerm term =
        evaluate_correction(protocol, basis, config.correction, t_mid, true);
    const CPReport cp = cp_diagnostic(term.supermatrix, basis, 1e-9);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out(config.out_dir);
    write_text_file((out / "trajectory.csv").string(), trajectory_csv(traj));
    write_text_file((out / "eigenvalues.csv").string(), eigenvalues_csv(fpath));

    nlohmann::json cj = correction_to_json(term);
    cj["time"] = t_mid;
    cj["cp"] = cp_to_json(cp);
    write_text_file((out / "correction.json").string(), cj.dump(2) + "\n");

    nlohmann::json summary = {
        {"max_tracking_error", traj.max_trace_distance()},
        {"final_fidelity", traj.fidelities.back()},
        {"cp_conditional", cp.cp_conditional},
        {"min_kossakowski_eigenvalue", cp.min_kossakowski_eigenvalue},
        {"wall_time_s", wall},
        {"config", config_json(config)},
    };
    write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");

    std::cout << "run " << config.scenario << " correction=" << correction_mode_name(config.correction)
              << " max_tracking_error=" << format_double(traj.max_trace_distance())
              << " final_fidelity=" << format_double(traj.fidelities.back()) << "\n"
              << "artifacts in " << out.string() << "\n";
    return 0;
}

int cmd_compare(const RunConfig& config, std::vector<std::string> mode_names) {
    if (mode_names.empty()) mode_names = {"none", "general"};
    std::vector<CorrectionMode> modes;
    for (const auto& name : mode_names) {
        const CorrectionMode m = parse_correction_mode(name);
        for (CorrectionMode seen : modes)
            if (seen == m) fail(ErrorCode::ConfigInvalid, "compare: duplicate mode '" + name + "'");
        modes.push_back(m);
    }
    auto [protocol, basis] = build_scenario(config);
    const std::vector<double> grid =
        linspace(protocol.t_start, protocol.t_end, config.grid_points);
    const Operator rho0 = instantaneous_target(protocol, basis, grid.front());

    std::vector<Trajectory> runs;
    for (CorrectionMode mode : modes) {
        IntegratorConfig icfg;
        icfg.method = config.method;
        icfg.dt = config.dt;
        icfg.rtol = config.rtol;
        icfg.atol = config.atol;
        icfg.correction_mode = mode;
        runs.push_back(integrate(protocol, basis, rho0, icfg, grid));
    }

    std::string csv = "t";
    for (CorrectionMode mode : modes)
        csv += std::string(",tracking_error_") + correction_mode_name(mode);
    csv += '\n';
    for (size_t i = 0; i < grid.size(); ++i) {
        csv += format_double(grid[i]);
        for (const Trajectory& traj : runs) {
            csv += ',';
            csv += format_double(traj.trace_distances[i]);
        }
        csv += '\n';
    }
    std::filesystem::create_directories(config.out_dir);
    const std::string path =
        (std::filesystem::path(config.out_dir) / "compare.csv").string();
    write_text_file(path, csv);
    std::cout << "compare " << config.scenario << " wrote " << path << "\n";
    return 0;
}

int cmd_inspect_spectrum(const RunConfig& config) {
    auto [protocol, basis] = build_scenario(config);
    const std::vector<double> grid =
        linspace(protocol.t_start, protocol.t_end, config.grid_points);
    const FramePath fpath = track_frames(protocol, basis, grid);
    std::filesystem::create_directories(config.out_dir);
    const std::string path =
        (std::filesystem::path(config.out_dir) / "eigenvalues.csv").string();
    write_text_file(path, eigenvalues_csv(fpath));

    const SpectralFrame& f0 = fpath.frames.front();
    std::cout << "spectrum of " << config.scenario << " at t=" << format_double(fpath.times.front())
              << ": " << f0.block_count() << " blocks, " << f0.cluster_count() << " clusters\n";
    for (int b = 0; b < f0.block_count(); ++b)
        std::cout << "  block " << b << " size " << f0.block_sizes[static_cast<size_t>(b)]
                  << " cluster " << f0.cluster_ids[static_cast<size_t>(b)] << " eigenvalue ("
                  << format_double(f0.eigenvalues(b).real()) << ", "
                  << format_double(f0.eigenvalues(b).imag()) << ")\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

GeneratorSpec random_qubit_generator(std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    auto random_matrix = [&](int n) {
        Operator m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
        return m;
    };
    GeneratorSpec gen;
    const Operator a = random_matrix(2);
    gen.hamiltonian = 0.5 * (a + a.adjoint());
    const int jumps = 1 + static_cast<int>(std::abs(dist(rng))) % 2;
    for (int j = 0; j < jumps; ++j)
        gen.jumps.push_back({random_matrix(2), std::abs(dist(rng)) + 0.1});
    return gen;
}

int cmd_check(const RunConfig& config) {
    int failures = 0;
    auto check = [&](const std::string& name, auto&& body) {
        try {
            body();
            std::cout << "check " << name << ": pass\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "check " << name << ": FAIL (" << e.what() << ")\n";
        }
    };
    auto expect = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::NumericalFailure, what);
    };

    std::mt19937 rng(static_cast<unsigned>(config.seed));

    check("basis-orthonormality", [&] {
        for (int dim : {2, 4})
            for (BasisKind kind : {BasisKind::pauli, BasisKind::units}) {
                const HermitianBasis basis = build_basis(dim, kind);
                for (int i = 0; i < basis.size(); ++i)
                    for (int j = 0; j < basis.size(); ++j) {
                        const Complex ip = (basis.elements[static_cast<size_t>(i)].adjoint() *
                                            basis.elements[static_cast<size_t>(j)])
                                               .trace();
                        const Complex want = i == j ? 1.0 : 0.0;
                        expect(std::abs(ip - want) < 1e-12, "inner product off");
                    }
            }
    });

    check("damping-spectrum", [&] {
        const HermitianBasis basis = build_basis(2, BasisKind::pauli);
        GeneratorSpec gen;
        gen.hamiltonian = Operator::Zero(2, 2);
        gen.jumps.push_back({spin_lower_along(0.0, 0.0), 1.0});
        const SpectralFrame frame = spectral_frame(supermatrix(gen, basis));
        std::vector<double> res;
        for (int b = 0; b < frame.block_count(); ++b)
            res.push_back(frame.eigenvalues(b).real());
        std::sort(res.begin(), res.end());
        const std::vector<double> want = {-1.0, -0.5, -0.5, 0.0};
        for (size_t i = 0; i < want.size(); ++i)
            expect(std::abs(res[i] - want[i]) < 1e-9, "eigenvalue mismatch");
    });

    check("random-lindblad-cp-roundtrip", [&] {
        const HermitianBasis basis = build_basis(2, BasisKind::pauli);
        for (int trial = 0; trial < 20; ++trial) {
            const GeneratorSpec gen = random_qubit_generator(rng);
            const SuperMatrix l = supermatrix(gen, basis);
            expect(l.imag().norm() < 1e-10 * std::max(1.0, l.norm()),
                   "supermatrix not real in the Hermitian basis");
            const CPReport report = cp_diagnostic(l, basis);
            expect(report.reconstruction_error < 1e-8, "reconstruction error too large");
            expect(report.min_kossakowski_eigenvalue > -1e-9,
                   "valid generator scored non-CP");
            const SpectralFrame frame = spectral_frame(l);
            expect((frame.right * frame.jordan_form() * frame.left - l).norm() < 1e-8,
                   "spectral reconstruction failed");
            try {
                const Operator ss = steady_state(l, basis);
                expect((l * vectorize(ss, basis)).norm() < 1e-8, "fixed point not fixed");
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NonUniqueSteadyState) throw;
            }
        }
    });

    check("rotating-frame-consistency", [&] {
        const DrivingProtocol protocol = rotating_dissipation(config.rotating);
        const GeneratorSpec gen0 = protocol.generator(protocol.t_start);
        for (int i = 1; i <= 5; ++i) {
            const double t =
                protocol.t_start + protocol.span() * static_cast<double>(i) / 6.0;
            const Operator w = protocol.frame(t);
            const GeneratorSpec gen = protocol.generator(t);
            expect((gen.jumps[0].op - w * gen0.jumps[0].op * w.adjoint()).norm() < 1e-12,
                   "jump is not frame-conjugated");
            const Operator target = rotating_steady_state(config.rotating, t);
            expect(apply_lindblad(gen, target).norm() < 1e-12, "target not a fixed point");
        }
    });

    check("rk4-order-vs-expm", [&] {
        const HermitianBasis basis = build_basis(2, BasisKind::pauli);
        const GeneratorSpec gen = random_qubit_generator(rng);
        const SuperMatrix l = supermatrix(gen, basis);
        DrivingProtocol protocol;
        protocol.t_start = 0.0;
        protocol.t_end = 1.0;
        protocol.dim = 2;
        protocol.generator = [gen](double) { return gen; };
        // Fixed reference target; only the endpoint state matters here.
        protocol.target_state = [](double) { return (0.5 * pauli_id()).eval(); };
        const Operator rho0 = 0.5 * Operator::Identity(2, 2);
        const CoherenceVector ref = expm_reference(l, vectorize(rho0, basis), 1.0);
        auto err_at = [&](double dt) {
            IntegratorConfig icfg;
            icfg.method = IntegrationMethod::rk4_fixed;
            icfg.dt = dt;
            const Trajectory traj =
                integrate(protocol, basis, rho0, icfg, {0.0, 1.0});
            return (traj.states.back() - ref).norm();
        };
        const double coarse = err_at(4e-3);
        const double fine = err_at(2e-3);
        expect(fine < 1e-8, "rk4 error too large at dt=2e-3");
        expect(coarse / fine > 10.0 && coarse / fine < 26.0, "rk4 order not near 4");
    });

    check("rotating-general-vs-analytic", [&] {
        const DrivingProtocol protocol = rotating_dissipation(config.rotating);
        const HermitianBasis basis = build_basis(2, BasisKind::pauli);
        for (double frac : {0.25, 0.5, 0.75}) {
            const double t = protocol.t_start + frac * protocol.span();
            const CorrectionTerm general =
                evaluate_correction(protocol, basis, CorrectionMode::general, t, false);
            const SuperMatrix analytic =
                hamiltonian_superop(analytic_htqd_rotating(config.rotating, t), basis);
            expect((general.supermatrix - analytic).norm() < 1e-6,
                   "general correction deviates from the closed form");
        }
    });

    if (failures > 0)
        fail(ErrorCode::NumericalFailure,
             "check suite: " + std::to_string(failures) + " failing check(s)");
    std::cout << "all checks passed\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"superadiabatic correction toolkit for driven Lindblad dynamics"};
    app.fallthrough(true);
    app.require_subcommand(1);

    std::optional<std::string> scenario, config_path, correction, out_dir;
    std::optional<double> dt, rtol, t_final;
    std::optional<int> grid_points;
    std::optional<unsigned long> seed;
    std::vector<std::string> modes;

    app.add_option("--scenario", scenario, "scenario: rotating | bell | closed");
    app.add_option("--config", config_path, "config file (key = value lines or flat JSON)");
    app.add_option("--correction", correction,
                   "correction mode: none | general | unitary-frame | analytic");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--dt", dt, "fixed step for rk4_fixed");
    app.add_option("--rtol", rtol, "relative tolerance for rk45_adaptive");
    app.add_option("--t-final", t_final, "override the end of the protocol span");
    app.add_option("--grid-points", grid_points, "number of sample times");
    app.add_option("--seed", seed, "seed for randomized checks");

    CLI::App* run = app.add_subcommand("run", "integrate a scenario and write artifacts");
    CLI::App* compare =
        app.add_subcommand("compare", "run several correction modes on one grid");
    compare->add_option("--modes", modes, "comma-separated correction modes")
        ->delimiter(',');
    CLI::App* inspect =
        app.add_subcommand("inspect-spectrum", "dump tracked eigenvalues along the span");
    CLI::App* check = app.add_subcommand("check", "run the seeded invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << error_json(ErrorCode::ConfigInvalid, e.what()) << std::endl;
        return 2;
    }

    try {
        RunConfig config;
        if (config_path) config.apply(read_config_file(*config_path));
        if (scenario) config.scenario = *scenario;
        if (correction) config.correction = parse_correction_mode(*correction);
        if (out_dir) config.out_dir = *out_dir;
        if (dt) config.dt = *dt;
        if (rtol) config.rtol = *rtol;
        if (t_final) config.t_final = *t_final;
        if (grid_points) config.grid_points = *grid_points;
        if (seed) config.seed = *seed;
        config.validate();

        if (run->parsed()) return cmd_run(config);
        if (compare->parsed()) return cmd_compare(config, modes);
        if (inspect->parsed()) return cmd_inspect_spectrum(config);
        if (check->parsed()) return cmd_check(config);
        fail(ErrorCode::ConfigInvalid, "no subcommand given");
    } catch (const Error& e) {
        std::cerr << error_json(e.code(), e.what()) << std::endl;
        return e.code() == ErrorCode::ConfigInvalid ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << error_json(ErrorCode::NumericalFailure, e.what()) << std::endl;
        return 3;
    }
    return 0;
}

} // namespace tqd
