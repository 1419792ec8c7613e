#include "gdp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "gdp/errors.hpp"

namespace gdp {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

} // namespace

void write_profile_csv(std::ostream& os, const Profile& profile) {
    os << "eta,omega,u\n";
    for (std::size_t j = 0; j < profile.eta.size(); ++j) {
        os << format_double(profile.eta[j]) << ',' << format_double(profile.omega[j]) << ','
           << format_double(profile.amplitude * profile.omega[j]) << '\n';
    }
}

Profile read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty profile " + path.string());
    const auto header = split_csv(line);
    std::size_t ce = header.size(), co = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "eta") ce = i;
        if (header[i] == "omega") co = i;
    }
    if (ce == header.size() || co == header.size()) throw ConfigError("profile CSV needs eta and omega columns");
    Profile p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw ConfigError("ragged row in " + path.string());
        p.eta.push_back(parse_double(cells[ce]));
        p.omega.push_back(parse_double(cells[co]));
    }
    const std::size_t n = p.eta.size();
    if (n < 5 || n % 2 == 0) throw ConfigError("profile CSV needs an odd number (>= 5) of rows");
    if (p.eta[n / 2] != 0.0) throw ConfigError("profile CSV must be symmetric about eta = 0");
    const double h = p.eta[1] - p.eta[0];
    for (std::size_t j = 1; j < n; ++j)
        if (!(p.eta[j] > p.eta[j - 1])) throw ConfigError("eta must be strictly increasing");
    p.domega.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j >= 2 && j + 2 < n)
            p.domega[j] = (-p.omega[j + 2] + 8 * p.omega[j + 1] - 8 * p.omega[j - 1] + p.omega[j - 2]) / (12 * h);
        else if (j == 0)
            p.domega[j] = (p.omega[1] - p.omega[0]) / (p.eta[1] - p.eta[0]);
        else if (j + 1 == n)
            p.domega[j] = (p.omega[j] - p.omega[j - 1]) / (p.eta[j] - p.eta[j - 1]);
        else
            p.domega[j] = (p.omega[j + 1] - p.omega[j - 1]) / (p.eta[j + 1] - p.eta[j - 1]);
    }
    try {
        p.decay_rate = fit_decay_rate(p);
    } catch (const InsufficientTail&) {
        p.decay_rate = 0.0;
    }
    p.tail_rate = p.decay_rate;
    p.tail_tol = p.omega.back();
    return p;
}

json to_json(const StructuralParams& params) {
    const auto& c = params.coefficients();
    return {{"alpha", c.alpha}, {"gamma", c.gamma}, {"c0", c.c0}, {"c1", c.c1},
            {"c2", c.c2},       {"c3", c.c3},       {"epsilon", c.epsilon}};
}

json to_json(const WaveSpec& wave) {
    json j;
    j["regime"] = std::string(to_string(wave.regime.kind));
    if (wave.regime.kind == RegimeKind::Peakon) j["arbitrary_amplitude"] = wave.regime.arbitrary_amplitude;
    j["A"] = num(wave.amplitude);
    j["V"] = num(wave.velocity);
    j["p"] = num(wave.p);
    j["q"] = num(wave.q);
    j["g_star"] = num(wave.g_star);
    j["criterion"] = wave.criterion;
    j["warnings"] = wave.warnings;
    return j;
}

json profile_metadata(const Profile& profile, const WaveSpec& wave) {
    json j = to_json(wave);
    j["decay_rate"] = num(profile.decay_rate);
    j["tail_rate"] = num(profile.tail_rate);
    j["tail_tol"] = num(profile.tail_tol);
    j["nodes"] = profile.eta.size();
    j["eta_max"] = num(profile.eta_max());
    j["cusped"] = profile.cusped;
    return j;
}

json to_json(const CollisionReport& report) {
    json j;
    j["windows"] = {{"pre", {report.windows.pre_begin, report.windows.pre_end}},
                    {"post", {report.windows.post_begin, report.windows.post_end}}};
    j["waves"] = json::array();
    for (const auto& w : report.waves) {
        j["waves"].push_back({{"amplitude_pre", w.amplitude_pre},
                              {"amplitude_post", w.amplitude_post},
                              {"velocity_pre", w.velocity_pre},
                              {"velocity_post", w.velocity_post},
                              {"relative_amplitude_change", w.relative_amplitude_change},
                              {"relative_velocity_change", w.relative_velocity_change},
                              {"phase_shift", w.phase_shift}});
    }
    j["max_relative_amplitude_change"] = report.max_relative_amplitude_change();
    return j;
}

void write_snapshot_csv(std::ostream& os, const Snapshot& snap, const Grid& grid, bool header) {
    if (header) os << "t,x,u\n";
    const std::string t = format_double(snap.t);
    for (int j = 0; j < grid.nodes; ++j)
        os << t << ',' << format_double(grid.x(j)) << ',' << format_double(snap.u[static_cast<std::size_t>(j)]) << '\n';
}

void write_diagnostics_header(std::ostream& os) {
    os << "t,mass,E,D,peak1_x,peak1_u,peak2_x,peak2_u\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec) {
    os << format_double(rec.t) << ',' << format_double(rec.mass) << ',' << format_double(rec.E) << ','
       << format_double(rec.D);
    for (std::size_t i = 0; i < 2; ++i) {
        if (i < rec.peaks.size())
            os << ',' << format_double(rec.peaks[i].x) << ',' << format_double(rec.peaks[i].value);
        else
            os << ",,";
    }
    os << '\n';
}

json trajectory_json(const Trajectory& traj) {
    json j;
    j["grid"] = {{"length", traj.grid.length}, {"nodes", traj.grid.nodes}};
    j["dt"] = traj.dt;
    j["steps"] = traj.steps;
    j["snapshots"] = json::array();
    for (const auto& s : traj.snapshots) {
        json peaks = json::array();
        for (const auto& p : s.diag.peaks) peaks.push_back({{"x", p.x}, {"u", p.value}});
        j["snapshots"].push_back({{"t", s.t},
                                  {"u", s.u},
                                  {"mass", s.diag.mass},
                                  {"E", s.diag.E},
                                  {"D", s.diag.D},
                                  {"peaks", peaks}});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

json toml_node_to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json j = json::object();
        for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_node_to_json(v);
        return j;
    }
    if (const auto* a = node.as_array()) {
        json j = json::array();
        for (auto&& v : *a) j.push_back(toml_node_to_json(v));
        return j;
    }
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_string()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    throw ConfigError("unsupported TOML value type (dates and times are not accepted)");
}

class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + " must be a table");
    }

    void allow(std::initializer_list<const char*> keys) {
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where_);
    }

    bool has(const char* key) const { return obj_.contains(key); }

    double number(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number()) throw ConfigError(where_ + "." + key + " must be a number");
        return v.get<double>();
    }
    double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + " must be an integer");
        return v.get<int>();
    }

    std::string string(const char* key) const {
        const auto& v = at(key);
        if (!v.is_string()) throw ConfigError(where_ + "." + key + " must be a string");
        return v.get<std::string>();
    }

    std::pair<double, double> pair(const char* key) const {
        const auto& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError(where_ + "." + key + " must be a two-number array");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    const json& at(const char* key) const {
        if (!obj_.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where_);
        return obj_.at(key);
    }

private:
    const json& obj_;
    std::string where_;
};

} // namespace

json toml_to_json(const std::string& toml_text) {
    try {
        const toml::table tbl = toml::parse(toml_text);
        return toml_node_to_json(tbl);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(os.str());
    }
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
    Reader top(doc, "scenario");
    top.allow({"params", "amplitude", "grid", "time", "waves", "profile", "simulation", "collision", "output", "fscan"});
    Scenario s;

    Reader p(top.at("params"), "params");
    p.allow({"alpha", "gamma", "c0", "c1", "c2", "c3", "epsilon"});
    s.coefficients.alpha = p.number("alpha");
    s.coefficients.gamma = p.number("gamma");
    s.coefficients.c0 = p.number("c0");
    s.coefficients.c1 = p.number("c1");
    s.coefficients.c2 = p.number("c2");
    s.coefficients.c3 = p.number("c3");
    s.coefficients.epsilon = p.number("epsilon", 0.1);
    try {
        (void)StructuralParams(s.coefficients);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("params: ") + e.what());
    }

    if (top.has("amplitude")) s.amplitude = top.number("amplitude");
    if (top.has("grid")) {
        Reader g(top.at("grid"), "grid");
        g.allow({"length", "nodes"});
        s.grid_length = g.number("length");
        s.grid_nodes = g.integer("nodes");
    }
    if (top.has("time")) {
        Reader t(top.at("time"), "time");
        t.allow({"t_end", "cfl", "snapshot_interval"});
        s.t_end = t.number("t_end");
        s.cfl = t.number("cfl", s.cfl);
        s.snapshot_interval = t.number("snapshot_interval", s.snapshot_interval);
    }
    if (top.has("waves")) {
        const auto& arr = top.at("waves");
        if (!arr.is_array()) throw ConfigError("waves must be an array of tables");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader w(arr[i], "waves[" + std::to_string(i) + "]");
            w.allow({"amplitude", "x0", "profile_csv"});
            WaveSeed seed;
            seed.amplitude = w.number("amplitude");
            seed.x0 = w.number("x0");
            if (w.has("profile_csv")) {
                std::filesystem::path csv = w.string("profile_csv");
                if (csv.is_relative() && !base_dir.empty()) csv = base_dir / csv;
                seed.profile_csv = csv.string();
            }
            s.waves.push_back(seed);
        }
    }
    if (top.has("profile")) {
        Reader pr(top.at("profile"), "profile");
        pr.allow({"nodes", "tail_tol"});
        if (pr.has("nodes")) s.profile.nodes = pr.integer("nodes");
        s.profile.tail_tol = pr.number("tail_tol", s.profile.tail_tol);
    }
    if (top.has("simulation")) {
        Reader sim(top.at("simulation"), "simulation");
        sim.allow({"filter_strength", "seam_tol", "peak_threshold"});
        s.filter_strength = sim.number("filter_strength", s.filter_strength);
        s.seam_tol = sim.number("seam_tol", s.seam_tol);
        s.peak_threshold = sim.number("peak_threshold", s.peak_threshold);
    }
    if (top.has("collision")) {
        Reader c(top.at("collision"), "collision");
        c.allow({"pre_window", "post_window"});
        const auto pre = c.pair("pre_window");
        const auto post = c.pair("post_window");
        s.windows = CollisionWindows{pre.first, pre.second, post.first, post.second};
    }
    if (top.has("output")) {
        Reader o(top.at("output"), "output");
        o.allow({"dir", "format"});
        if (o.has("dir")) s.output_dir = o.string("dir");
        if (o.has("format")) s.format = o.string("format");
        if (s.format != "csv" && s.format != "json") throw ConfigError("output.format must be csv or json");
    }
    if (top.has("fscan")) {
        Reader f(top.at("fscan"), "fscan");
        f.allow({"points"});
        s.fscan_points = f.integer("points");
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    if (path.extension() == ".toml") {
        doc = toml_to_json(text);
    } else {
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("JSON parse error: ") + e.what());
        }
    }
    return parse_scenario(doc, path.parent_path());
}

SimConfig Scenario::sim_config() const {
    if (!grid_length || !grid_nodes) throw ConfigError("simulation needs a [grid] section");
    if (!t_end) throw ConfigError("simulation needs a [time] section");
    if (waves.empty()) throw ConfigError("simulation needs at least one [[waves]] entry");
    SimConfig cfg{params(), Grid(*grid_length, *grid_nodes), *t_end, cfl, snapshot_interval, waves,
                  filter_strength, seam_tol, peak_threshold, profile};
    return cfg;
}

} // namespace gdp
