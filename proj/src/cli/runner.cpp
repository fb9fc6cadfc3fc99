#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "csoc/cli.hpp"
#include "csoc/errors.hpp"
#include "csoc/philox.hpp"

#ifndef CSOC_VERSION
#define CSOC_VERSION "0.0.0"
#endif

namespace csoc::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string library_version() { return CSOC_VERSION; }

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << content;
}

}  // namespace

int run(const ScenarioConfig& cfg, std::ostream& log) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    const fs::path out(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        log << "config error: cannot create output directory '" << out.string() << "': " << ec.message() << "\n";
        return kConfigError;
    }

    const std::vector<std::string> todo =
        cfg.scenario == "all" ? scenario_names() : std::vector<std::string>{cfg.scenario};

    json manifest;
    manifest["tool"] = "csoc";
    manifest["version"] = library_version();
    manifest["rng"] = Philox4x32::name;
    manifest["seed"] = cfg.seed;
    manifest["scenario"] = cfg.scenario;
    manifest["config"] = cfg.to_json();
    manifest["started_at"] = utc_now();
    json runs = json::array();
    json failed = json::array();

    int code = kOk;
    for (const auto& name : todo) {
        json entry;
        entry["scenario"] = name;
        const auto t0 = std::chrono::steady_clock::now();
        ScenarioResult res;
        std::string error;
        int scenario_code = kOk;
        try {
            res = run_scenario(name, cfg);
            scenario_code = res.passed ? kOk : kCheckFailed;
        } catch (const ConfigError& e) {
            error = e.what();
            scenario_code = kConfigError;
        } catch (const DomainError& e) {
            error = e.what();
            scenario_code = kDomainError;
        } catch (const PreconditionError& e) {
            error = e.what();
            scenario_code = kDomainError;
        } catch (const std::runtime_error& e) {
            // singular, branch and convergence failures of the numerics
            error = e.what();
            scenario_code = kDomainError;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (!error.empty()) {
            res.name = name;
            res.report = json{{"scenario", name}, {"passed", false}, {"error", error}};
        }
        const std::string report_file = name + ".json";
        try {
            write_file(out / report_file, res.report.dump(2) + "\n");
            for (const auto& t : res.tables) write_file(out / t.file, t.content);
        } catch (const ConfigError& e) {
            log << "config error: " << e.what() << "\n";
            return kConfigError;
        }

        entry["passed"] = scenario_code == kOk;
        entry["exit_code"] = scenario_code;
        entry["report"] = report_file;
        json tables = json::array();
        for (const auto& t : res.tables) tables.push_back(t.file);
        entry["tables"] = tables;
        entry["seconds"] = secs;
        if (!error.empty()) entry["error"] = error;
        runs.push_back(entry);

        log << (scenario_code == kOk ? "PASS " : "FAIL ") << name;
        if (!error.empty()) log << " (" << error << ")";
        log << " [" << std::fixed << std::setprecision(2) << secs << " s]\n";
        log.unsetf(std::ios::floatfield);

        if (scenario_code != kOk) failed.push_back(name);
        code = std::max(code, scenario_code);
    }

    manifest["finished_at"] = utc_now();
    manifest["runs"] = runs;
    manifest["failed"] = failed;
    manifest["exit_code"] = code;
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    write_file(out / "config.ini", cfg.to_ini());
    return code;
}

}  // namespace csoc::cli
