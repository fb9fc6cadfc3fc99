#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "csoc/cli.hpp"
#include "csoc/errors.hpp"
#include "csoc/lagrangian.hpp"

namespace csoc::cli {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string shortest4(const Real4& a) {
    return shortest(a[0]) + "," + shortest(a[1]) + "," + shortest(a[2]) + "," + shortest(a[3]);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) throw ConfigError(key + ": not a number: '" + raw + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ConfigError(key + ": not a non-negative integer: '" + raw + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    int v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) throw ConfigError(key + ": not an integer: '" + raw + "'");
    return v;
}

Real4 parse_real4(const std::string& key, const std::string& raw) {
    Real4 out{};
    std::stringstream ss(raw);
    std::string item;
    std::size_t i = 0;
    while (std::getline(ss, item, ',')) {
        if (i == 4) throw ConfigError(key + ": expected four comma-separated numbers");
        out[i++] = parse_double(key, item);
    }
    if (i != 4) throw ConfigError(key + ": expected four comma-separated numbers");
    return out;
}

}  // namespace

Metric ScenarioConfig::metric_value() const {
    if (metric == "minus-plus") return Metric::minus_plus();
    if (metric == "plus-minus") return Metric::plus_minus();
    throw ConfigError("physics.metric must be minus-plus or plus-minus, got '" + metric + "'");
}

void ScenarioConfig::validate() const {
    if (scenario != "all" && !is_scenario(scenario)) throw ConfigError("unknown scenario '" + scenario + "'");
    (void)metric_value();
    if (!(hbar > 0.0) || !(m > 0.0) || !(c > 0.0)) throw ConfigError("physics: hbar, m and c must be positive");
    if (epsilon != 1 && epsilon != -1) throw ConfigError("diffusion.epsilon must be +1 or -1");
    if (diffusion != "postulated" && diffusion != "explicit")
        throw ConfigError("diffusion.mode must be postulated or explicit, got '" + diffusion + "'");
    for (std::size_t mu = 0; mu < 4; ++mu)
        if (sigma_x[mu] < 0.0 || sigma_y[mu] < 0.0) throw ConfigError("diffusion: sigma entries must be >= 0");
    if (!(tau_f > 0.0) || !(half_width > 0.0)) throw ConfigError("domain: tau_f and half_width must be positive");
    if (probes < 1) throw ConfigError("run.probes must be at least 1");
    if (jobs < 1) throw ConfigError("run.jobs must be at least 1");
    if (n_samples < 10000) throw ConfigError("monte-carlo.n_samples must be at least 10000");
    if (n_paths < 2 || n_steps < 1) throw ConfigError("monte-carlo: n_paths >= 2 and n_steps >= 1 required");
    if (!(d_tau > 0.0)) throw ConfigError("monte-carlo.d_tau must be positive");
    if (output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
    try {
        (void)potential_from_name(potential);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("physics.potential: ") + e.what());
    }
}

std::string ScenarioConfig::to_ini() const {
    std::ostringstream os;
    os << "[run]\n"
       << "scenario = " << scenario << "\n"
       << "seed = " << seed << "\n"
       << "probes = " << probes << "\n"
       << "jobs = " << jobs << "\n"
       << "output_dir = " << output_dir << "\n\n"
       << "[physics]\n"
       << "hbar = " << shortest(hbar) << "\n"
       << "m = " << shortest(m) << "\n"
       << "c = " << shortest(c) << "\n"
       << "q = " << shortest(q) << "\n"
       << "metric = " << metric << "\n"
       << "potential = " << potential << "\n\n"
       << "[diffusion]\n"
       << "mode = " << diffusion << "\n"
       << "epsilon = " << epsilon << "\n"
       << "sigma_x = " << shortest4(sigma_x) << "\n"
       << "sigma_y = " << shortest4(sigma_y) << "\n\n"
       << "[domain]\n"
       << "tau_f = " << shortest(tau_f) << "\n"
       << "half_width = " << shortest(half_width) << "\n\n"
       << "[monte-carlo]\n"
       << "n_samples = " << n_samples << "\n"
       << "n_paths = " << n_paths << "\n"
       << "n_steps = " << n_steps << "\n"
       << "d_tau = " << shortest(d_tau) << "\n"
       << "drift_v = " << shortest4(drift_v) << "\n"
       << "drift_u = " << shortest4(drift_u) << "\n";
    return os.str();
}

void apply_override(ScenarioConfig& cfg, const std::string& dotted_key, const std::string& raw) {
    const std::string& k = dotted_key;
    const std::string v = trim(raw);
    if (k == "run.scenario") cfg.scenario = v;
    else if (k == "run.seed") cfg.seed = parse_uint(k, v);
    else if (k == "run.probes") cfg.probes = parse_uint(k, v);
    else if (k == "run.jobs") cfg.jobs = parse_uint(k, v);
    else if (k == "run.output_dir") cfg.output_dir = v;
    else if (k == "physics.hbar") cfg.hbar = parse_double(k, v);
    else if (k == "physics.m") cfg.m = parse_double(k, v);
    else if (k == "physics.c") cfg.c = parse_double(k, v);
    else if (k == "physics.q") cfg.q = parse_double(k, v);
    else if (k == "physics.metric") cfg.metric = v;
    else if (k == "physics.potential") cfg.potential = v;
    else if (k == "diffusion.mode") cfg.diffusion = v;
    else if (k == "diffusion.epsilon") cfg.epsilon = parse_int(k, v);
    else if (k == "diffusion.sigma_x") cfg.sigma_x = parse_real4(k, v);
    else if (k == "diffusion.sigma_y") cfg.sigma_y = parse_real4(k, v);
    else if (k == "domain.tau_f") cfg.tau_f = parse_double(k, v);
    else if (k == "domain.half_width") cfg.half_width = parse_double(k, v);
    else if (k == "monte-carlo.n_samples") cfg.n_samples = parse_uint(k, v);
    else if (k == "monte-carlo.n_paths") cfg.n_paths = parse_uint(k, v);
    else if (k == "monte-carlo.n_steps") cfg.n_steps = parse_uint(k, v);
    else if (k == "monte-carlo.d_tau") cfg.d_tau = parse_double(k, v);
    else if (k == "monte-carlo.drift_v") cfg.drift_v = parse_real4(k, v);
    else if (k == "monte-carlo.drift_u") cfg.drift_u = parse_real4(k, v);
    else throw ConfigError("unknown config key '" + k + "'");
}

ScenarioConfig ScenarioConfig::from_ini(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        apply_override(cfg, section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_ini(ss.str());
}

nlohmann::ordered_json ScenarioConfig::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["probes"] = probes;
    j["jobs"] = jobs;
    j["output_dir"] = output_dir;
    j["hbar"] = hbar;
    j["m"] = m;
    j["c"] = c;
    j["q"] = q;
    j["metric"] = metric;
    j["potential"] = potential;
    j["diffusion"] = diffusion;
    j["epsilon"] = epsilon;
    j["sigma_x"] = sigma_x;
    j["sigma_y"] = sigma_y;
    j["tau_f"] = tau_f;
    j["half_width"] = half_width;
    j["n_samples"] = n_samples;
    j["n_paths"] = n_paths;
    j["n_steps"] = n_steps;
    j["d_tau"] = d_tau;
    j["drift_v"] = drift_v;
    j["drift_u"] = drift_u;
    return j;
}

}  // namespace csoc::cli
