// gdp: classify, profile, peakon, simulate and fscan front ends.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gdp/diagnostics.hpp"
#include "gdp/errors.hpp"
#include "gdp/io.hpp"
#include "gdp/params.hpp"
#include "gdp/pdesim.hpp"
#include "gdp/peakon.hpp"
#include "gdp/twave.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kNoWave = 3, kNumerical = 4 };

struct CommonArgs {
    std::string scenario;
    std::string out;
    std::string format;
    std::optional<double> alpha, gamma, c0, c1, c2, c3, epsilon, amplitude;
};

void add_param_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--scenario", a.scenario, "TOML or JSON scenario file");
    cmd->add_option("--alpha", a.alpha);
    cmd->add_option("--gamma", a.gamma);
    cmd->add_option("--c0", a.c0);
    cmd->add_option("--c1", a.c1);
    cmd->add_option("--c2", a.c2);
    cmd->add_option("--c3", a.c3);
    cmd->add_option("--epsilon", a.epsilon);
    cmd->add_option("-A,--amplitude", a.amplitude);
}

// Scenario file (if any) with command-line overrides on top.
gdp::Scenario resolve(const CommonArgs& a) {
    gdp::Scenario s;
    if (!a.scenario.empty()) s = gdp::load_scenario(a.scenario);
    auto& c = s.coefficients;
    if (a.alpha) c.alpha = *a.alpha;
    if (a.gamma) c.gamma = *a.gamma;
    if (a.c0) c.c0 = *a.c0;
    if (a.c1) c.c1 = *a.c1;
    if (a.c2) c.c2 = *a.c2;
    if (a.c3) c.c3 = *a.c3;
    if (a.epsilon) c.epsilon = *a.epsilon;
    if (a.amplitude) s.amplitude = *a.amplitude;
    if (!a.out.empty()) s.output_dir = a.out;
    if (!a.format.empty()) s.format = a.format;
    return s;
}

double require_amplitude(const gdp::Scenario& s) {
    if (!s.amplitude) throw gdp::ConfigError("an amplitude is required (-A or amplitude = ...)");
    return *s.amplitude;
}

fs::path output_dir(const gdp::Scenario& s) {
    fs::path dir = s.output_dir.empty() ? fs::path(".") : fs::path(s.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw gdp::ConfigError("cannot write " + path.string());
    return os;
}

std::string text_report(const gdp::WaveSpec& w) {
    std::ostringstream os;
    os.precision(12);
    os << "regime     " << gdp::to_string(w.regime) << '\n'
       << "criterion  " << w.criterion << '\n'
       << "A          " << w.amplitude << '\n'
       << "g*         " << w.g_star << '\n'
       << "q          " << w.q << '\n'
       << "p          " << w.p << '\n'
       << "V          " << w.velocity << '\n';
    for (const auto& msg : w.warnings) os << "warning    " << msg << '\n';
    return os.str();
}

struct Sweep {
    double from = 0.0;
    double to = 0.0;
    int count = 0;
};

Sweep parse_sweep(const std::string& text) {
    static const std::regex re(R"(^A=([^:]+):([^:]+):(\d+)$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw gdp::ConfigError("--grid expects A=a:b:n");
    Sweep s{std::stod(m[1]), std::stod(m[2]), std::stoi(m[3])};
    if (s.count < 1 || !(s.from > 0.0) || !(s.to >= s.from))
        throw gdp::ConfigError("--grid needs 0 < a <= b and n >= 1");
    return s;
}

int cmd_classify(const CommonArgs& a, const std::string& grid) {
    const auto s = resolve(a);
    const auto params = s.params();
    if (!grid.empty()) {
        // Plot-ready amplitude sweep with the comparison function Psi(A).
        const auto sw = parse_sweep(grid);
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!s.output_dir.empty()) {
            file = open_out(output_dir(s) / "classify_grid.csv");
            os = &file;
        }
        *os << "A,regime,g_star,q,p,V,psi\n";
        for (int i = 0; i < sw.count; ++i) {
            const double A = sw.count == 1 ? sw.from : sw.from + (sw.to - sw.from) * i / (sw.count - 1);
            const auto w = gdp::classify_wave(params, A);
            double ps = std::nan("");
            try {
                ps = gdp::psi(params, A);
            } catch (const gdp::Error&) {
            }
            *os << gdp::format_double(A) << ',' << gdp::to_string(w.regime.kind) << ','
                << gdp::format_double(w.g_star) << ',' << gdp::format_double(w.q) << ','
                << gdp::format_double(w.p) << ',' << gdp::format_double(w.velocity) << ','
                << gdp::format_double(ps) << '\n';
        }
        return kOk;
    }
    const auto w = gdp::classify_wave(params, require_amplitude(s));
    const std::string body = s.format == "json" ? gdp::to_json(w).dump(2) + "\n" : text_report(w);
    std::cout << body;
    if (!s.output_dir.empty()) open_out(output_dir(s) / (s.format == "json" ? "classify.json" : "classify.txt")) << body;
    return w.regime.kind == gdp::RegimeKind::NoWave ? kNoWave : kOk;
}

void write_profile(const gdp::Scenario& s, const gdp::Profile& profile, const json& meta, const std::string& stem) {
    const auto dir = output_dir(s);
    if (s.format == "json") {
        json j = meta;
        j["eta"] = profile.eta;
        j["omega"] = profile.omega;
        open_out(dir / (stem + ".json")) << j.dump(2) << '\n';
    } else {
        auto csv = open_out(dir / (stem + ".csv"));
        gdp::write_profile_csv(csv, profile);
        open_out(dir / (stem + ".meta.json")) << meta.dump(2) << '\n';
    }
}

gdp::Profile sampled_peakon(const gdp::PeakonSpec& spec, const gdp::ProfileOptions& opts) {
    const double eta_max = std::log(1.0 / opts.tail_tol) / spec.r;
    return gdp::peakon_sampled_profile(spec, eta_max, opts.nodes);
}

json peakon_json(const gdp::PeakonSpec& spec) {
    return {{"regime", "Peakon"},     {"A", spec.amplitude}, {"V", spec.velocity},
            {"r", spec.r},            {"beta", spec.beta},   {"arbitrary_amplitude", spec.arbitrary_amplitude}};
}

int cmd_profile(const CommonArgs& a) {
    const auto s = resolve(a);
    const auto params = s.params();
    const auto w = gdp::classify_wave(params, require_amplitude(s));
    switch (w.regime.kind) {
    case gdp::RegimeKind::SmoothSoliton: {
        const auto profile = gdp::build_profile(params, w, s.profile);
        write_profile(s, profile, gdp::profile_metadata(profile, w), "profile");
        std::cout << text_report(w) << "decay_rate " << profile.decay_rate << '\n';
        return kOk;
    }
    case gdp::RegimeKind::Peakon: {
        const auto spec = gdp::peakon_amplitude(params, w.amplitude);
        const auto profile = sampled_peakon(spec, s.profile);
        json meta = gdp::profile_metadata(profile, w);
        meta["decay_rate"] = spec.r;
        write_profile(s, profile, meta, "profile");
        std::cout << text_report(w);
        return kOk;
    }
    default:
        std::cerr << text_report(w);
        return kNoWave;
    }
}

int cmd_peakon(const CommonArgs& a) {
    const auto s = resolve(a);
    const auto params = s.params();
    const auto spec = gdp::peakon_amplitude(params, s.amplitude);
    const auto jumps = gdp::verify_jump_conditions(spec, params);
    json j = peakon_json(spec);
    j["jump_first"] = jumps.first;
    j["jump_second"] = jumps.second;
    std::cout << j.dump(2) << '\n';
    if (!s.output_dir.empty()) write_profile(s, sampled_peakon(spec, s.profile), j, "peakon");
    return kOk;
}

int cmd_simulate(const CommonArgs& a) {
    if (a.scenario.empty()) throw gdp::ConfigError("simulate needs --scenario");
    const auto s = resolve(a);
    const auto config = s.sim_config();
    const auto dir = output_dir(s);
    const bool as_json = s.format == "json";

    auto diag = open_out(dir / "diagnostics.csv");
    gdp::write_diagnostics_header(diag);
    std::ofstream snaps;
    if (!as_json) snaps = open_out(dir / "snapshots.csv");
    bool first = true;
    // Streamed so that a NonFinite abort leaves every completed snapshot on disk.
    auto sink = [&](const gdp::Snapshot& snap) {
        gdp::write_diagnostics_row(diag, snap.diag);
        diag.flush();
        if (!as_json) {
            gdp::write_snapshot_csv(snaps, snap, config.grid, first);
            snaps.flush();
        }
        first = false;
    };

    const auto traj = gdp::run_simulation(config, sink);
    if (as_json) open_out(dir / "trajectory.json") << gdp::trajectory_json(traj).dump() << '\n';
    std::cout << "steps " << traj.steps << ", dt " << traj.dt << ", snapshots " << traj.snapshots.size() << '\n';

    if (config.waves.size() >= 2) {
        const auto windows = s.windows ? *s.windows
                                       : gdp::default_collision_windows(traj, gdp::interaction_separation(config.params));
        const auto report = gdp::measure_collision(traj, windows);
        const std::string text = gdp::to_text(report);
        open_out(dir / "collision.txt") << text;
        open_out(dir / "collision.json") << gdp::to_json(report).dump(2) << '\n';
        std::cout << text;
    }
    return kOk;
}

int cmd_fscan(const CommonArgs& a, std::optional<int> points) {
    const auto s = resolve(a);
    const auto params = s.params();
    const double A = require_amplitude(s);
    const int n = points.value_or(s.fscan_points);
    if (n < 2) throw gdp::ConfigError("fscan needs at least 2 points");
    const auto d = gdp::derive_constants(params);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!s.output_dir.empty()) {
        file = open_out(output_dir(s) / "fscan.csv");
        os = &file;
    }
    *os << "g,q,F\n";
    // F(g, q(g)) on the open interval (0, 1).
    if (params.alpha() > 0.0) {
        const auto poly = gdp::SelfConsistencyPoly::from(params, A);
        const double scale = (1.0 - d.r) * (2.0 - d.r);
        for (int i = 1; i <= n; ++i) {
            const double g = static_cast<double>(i) / (n + 1);
            *os << gdp::format_double(g) << ',' << gdp::format_double(poly.q_of(g)) << ','
                << gdp::format_double(poly.value(g) / scale) << '\n';
        }
    } else {
        const auto sol = gdp::solve_q_star_alpha_zero(params, A);
        const gdp::FPoly f(d.r, sol.q_star);
        for (int i = 1; i <= n; ++i) {
            const double g = static_cast<double>(i) / (n + 1);
            *os << gdp::format_double(g) << ',' << gdp::format_double(sol.q_star) << ','
                << gdp::format_double(f.value(g)) << '\n';
        }
    }
    return kOk;
}

int exit_code_for(const gdp::Error& e) {
    const auto& k = e.kind();
    if (k == "ValidationError" || k == "DegenerateParameters" || k == "InvalidAmplitude" || k == "ConfigError")
        return kInvalid;
    if (k == "NoRoot" || k == "NoPeakon") return kNoWave;
    return kNumerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling waves and collisions for the general Degasperis-Procesi model"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string grid;
    std::optional<int> points;

    auto* classify = app.add_subcommand("classify", "Regime, g*, q, p and V for an amplitude");
    add_param_flags(classify, args);
    classify->add_option("--grid", grid, "amplitude sweep A=a:b:n (CSV with Psi(A))");
    classify->add_option("--out", args.out, "also write the report here");
    classify->add_option("--format", args.format)->check(CLI::IsMember({"text", "json"}));

    auto* profile = app.add_subcommand("profile", "Sampled traveling-wave profile");
    add_param_flags(profile, args);
    profile->add_option("--out", args.out);
    profile->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* peakon = app.add_subcommand("peakon", "Closed-form peaked wave and its jump residuals");
    add_param_flags(peakon, args);
    peakon->add_option("--out", args.out);
    peakon->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* simulate = app.add_subcommand("simulate", "Periodic simulation from a scenario");
    add_param_flags(simulate, args);
    simulate->add_option("--out", args.out);
    simulate->add_option("--format", args.format)->check(CLI::IsMember({"csv", "json"}));

    auto* fscan = app.add_subcommand("fscan", "Tabulate F(g, q(g)) on (0, 1)");
    add_param_flags(fscan, args);
    fscan->add_option("--points", points);
    fscan->add_option("--out", args.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*classify) return cmd_classify(args, grid);
        if (*profile) return cmd_profile(args);
        if (*peakon) return cmd_peakon(args);
        if (*simulate) return cmd_simulate(args);
        if (*fscan) return cmd_fscan(args, points);
    } catch (const gdp::Error& e) {
        std::cerr << "gdp: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "gdp: " << e.what() << '\n';
        return kNumerical;
    }
    return kInvalid;
}
